#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>

namespace cloudecode {

struct Color {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    auto operator<=>(const Color&) const = default;
};

// Largest per-channel absolute difference; the similarity metric used by
// the segmenter (tolerances are given in per-channel units).
inline int max_channel_distance(Color a, Color b) {
    int dr = std::abs(int(a.r) - int(b.r));
    int dg = std::abs(int(a.g) - int(b.g));
    int db = std::abs(int(a.b) - int(b.b));
    return std::max({dr, dg, db});
}

// Euclidean RGB distance, used by the letter-similarity weight.
inline double euclidean_distance(Color a, Color b) {
    double dr = double(a.r) - double(b.r);
    double dg = double(a.g) - double(b.g);
    double db = double(a.b) - double(b.b);
    return std::sqrt(dr * dr + dg * dg + db * db);
}

}  // namespace cloudecode
