// Independent test oracles. Everything here recomputes results through a
// different route than the library (recursive flood fill vs. scan labeling,
// exhaustive enumeration vs. assignment solver, direct re-evaluation of the
// formulas) and must stay decoupled from the implementation it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "cloudecode/color.hpp"
#include "cloudecode/raster.hpp"
#include "cloudecode/wordgraph.hpp"

namespace oracle {

using Point = std::pair<int, int>;
using PointSet = std::set<Point>;

// Flood fill from each unvisited foreground pixel; stack-based recursion.
inline std::vector<PointSet> flood_fill_components(const cloudecode::RasterImage& image,
                                                   cloudecode::Color background,
                                                   cloudecode::Connectivity connectivity,
                                                   int tolerance, int min_pixel_count) {
    using cloudecode::max_channel_distance;
    const int w = image.width, h = image.height;
    std::vector<char> seen(static_cast<size_t>(w) * h, 0);
    auto foreground = [&](int x, int y) {
        return max_channel_distance(image.at(x, y), background) > tolerance;
    };

    std::vector<PointSet> components;
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            if (seen[static_cast<size_t>(sy) * w + sx] || !foreground(sx, sy)) continue;
            PointSet comp;
            std::vector<Point> stack{{sx, sy}};
            seen[static_cast<size_t>(sy) * w + sx] = 1;
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                comp.insert({x, y});
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        if (connectivity == cloudecode::Connectivity::four && dx != 0 && dy != 0)
                            continue;
                        int nx = x + dx, ny = y + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        if (seen[static_cast<size_t>(ny) * w + nx]) continue;
                        if (!foreground(nx, ny)) continue;
                        if (max_channel_distance(image.at(x, y), image.at(nx, ny)) > tolerance)
                            continue;
                        seen[static_cast<size_t>(ny) * w + nx] = 1;
                        stack.push_back({nx, ny});
                    }
                }
            }
            if (static_cast<int>(comp.size()) >= min_pixel_count) components.push_back(std::move(comp));
        }
    }
    return components;
}

inline PointSet region_points(const cloudecode::ComponentRegion& region) {
    PointSet points;
    for (int y = 0; y < region.bbox.h; ++y)
        for (int x = 0; x < region.bbox.w; ++x)
            if (region.mask.at(x, y)) points.insert({region.bbox.x + x, region.bbox.y + y});
    return points;
}

// Minimum matching total over all injections of the smaller side into the
// larger; brute force over permutations.
inline double exhaustive_min_matching(const std::vector<std::vector<double>>& w) {
    size_t rows = w.size();
    size_t cols = rows == 0 ? 0 : w[0].size();
    if (rows == 0 || cols == 0) return 0.0;
    bool transpose = rows > cols;
    size_t n = transpose ? cols : rows;
    size_t m = transpose ? rows : cols;
    auto at = [&](size_t i, size_t j) { return transpose ? w[j][i] : w[i][j]; };

    std::vector<size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) total += at(i, perm[i]);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Straight re-evaluation of the five-term similarity.
inline double edge_weight_recomputed(const cloudecode::GlyphNode& a, const cloudecode::GlyphNode& b,
                                     const cloudecode::WeightParams& p) {
    double dx = std::fabs(a.x - b.x) / p.x_scale;
    double dy = std::fabs(a.y - b.y) / p.y_scale;
    double dr = double(a.color.r) - double(b.color.r);
    double dg = double(a.color.g) - double(b.color.g);
    double db = double(a.color.b) - double(b.color.b);
    double dcolor = std::sqrt(dr * dr + dg * dg + db * db) / p.color_scale;
    double dheight = std::fabs(double(a.height) - double(b.height)) / p.size_scale;
    double dwidth = std::fabs(double(a.width) - double(b.width)) / p.size_scale;
    return dx + dy + dcolor + dheight + dwidth;
}

// Root mean square error, re-evaluated directly.
inline double rmse_recomputed(const std::vector<std::pair<double, double>>& pairs) {
    double sum = 0.0;
    for (const auto& [e, g] : pairs) sum += (e - g) * (e - g);
    return std::sqrt(sum / double(pairs.size()));
}

}  // namespace oracle
