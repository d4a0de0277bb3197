#include "cloudecode/bitgrid.hpp"

#include <algorithm>
#include <cmath>

namespace cloudecode {

BitGrid scale_nearest(const BitGrid& src, int dw, int dh) {
    BitGrid dst(dw, dh);
    if (src.empty() || dw <= 0 || dh <= 0) return dst;
    for (int y = 0; y < dh; ++y) {
        int sy = std::min(src.height() - 1, static_cast<int>((y + 0.5) * src.height() / dh));
        for (int x = 0; x < dw; ++x) {
            int sx = std::min(src.width() - 1, static_cast<int>((x + 0.5) * src.width() / dw));
            if (src.at(sx, sy)) dst.set(x, y);
        }
    }
    return dst;
}

Box tight_bounds(const BitGrid& grid) {
    int minx = grid.width(), miny = grid.height(), maxx = -1, maxy = -1;
    for (int y = 0; y < grid.height(); ++y)
        for (int x = 0; x < grid.width(); ++x)
            if (grid.at(x, y)) {
                minx = std::min(minx, x);
                miny = std::min(miny, y);
                maxx = std::max(maxx, x);
                maxy = std::max(maxy, y);
            }
    if (maxx < 0) return Box{0, 0, 0, 0};
    return Box{minx, miny, maxx - minx + 1, maxy - miny + 1};
}

BitGrid crop_tight(const BitGrid& grid, Box* origin) {
    Box b = tight_bounds(grid);
    if (origin) *origin = b;
    BitGrid out(b.w, b.h);
    for (int y = 0; y < b.h; ++y)
        for (int x = 0; x < b.w; ++x)
            if (grid.at(b.x + x, b.y + y)) out.set(x, y);
    return out;
}

BitGrid fit_to_box(const BitGrid& tight, int ref_size) {
    BitGrid out(ref_size, ref_size);
    if (tight.empty()) return out;
    int longest = std::max(tight.width(), tight.height());
    int dw = std::clamp(static_cast<int>(std::lround(double(tight.width()) * ref_size / longest)), 1, ref_size);
    int dh = std::clamp(static_cast<int>(std::lround(double(tight.height()) * ref_size / longest)), 1, ref_size);
    BitGrid scaled = scale_nearest(tight, dw, dh);
    int ox = (ref_size - dw) / 2;
    int oy = (ref_size - dh) / 2;
    for (int y = 0; y < dh; ++y)
        for (int x = 0; x < dw; ++x)
            if (scaled.at(x, y)) out.set(ox + x, oy + y);
    return out;
}

double jaccard(const BitGrid& a, const BitGrid& b) {
    std::int64_t inter = 0, uni = 0;
    const auto& ca = a.cells();
    const auto& cb = b.cells();
    for (size_t i = 0; i < ca.size(); ++i) {
        bool va = ca[i] != 0;
        bool vb = cb[i] != 0;
        if (va && vb) ++inter;
        if (va || vb) ++uni;
    }
    if (uni == 0) return 1.0;
    return double(inter) / double(uni);
}

}  // namespace cloudecode
