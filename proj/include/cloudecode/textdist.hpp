#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace cloudecode {

inline std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Classic Levenshtein distance, two-row dynamic program.
inline int levenshtein(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    std::vector<int> prev(a.size() + 1), cur(a.size() + 1);
    for (size_t i = 0; i <= a.size(); ++i) prev[i] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
        cur[0] = static_cast<int>(j);
        for (size_t i = 1; i <= a.size(); ++i) {
            int sub = prev[i - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[i] = std::min({prev[i] + 1, cur[i - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[a.size()];
}

inline int levenshtein_ci(std::string_view a, std::string_view b) {
    return levenshtein(to_lower_ascii(a), to_lower_ascii(b));
}

// Distance divided by the longer length; 0 for two empty strings.
inline double normalized_levenshtein_ci(std::string_view a, std::string_view b) {
    size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 0.0;
    return double(levenshtein_ci(a, b)) / double(longest);
}

}  // namespace cloudecode
