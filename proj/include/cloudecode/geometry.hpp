#pragma once

#include <algorithm>
#include <compare>

namespace cloudecode {

// Axis-aligned pixel rectangle. (x, y) is the top-left corner, width/height
// count pixels, so the right/bottom edges are exclusive.
struct Box {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    auto operator<=>(const Box&) const = default;

    int right() const { return x + w; }
    int bottom() const { return y + h; }
    long long area() const { return static_cast<long long>(w) * h; }
    double cx() const { return x + w / 2.0; }
    double cy() const { return y + h / 2.0; }

    bool contains(int px, int py) const {
        return px >= x && px < right() && py >= y && py < bottom();
    }

    // True when the boxes, each grown by `margin` pixels, overlap.
    bool intersects(const Box& o, int margin = 0) const {
        return x - margin < o.right() + margin && o.x - margin < right() + margin &&
               y - margin < o.bottom() + margin && o.y - margin < bottom() + margin;
    }

    static Box union_of(const Box& a, const Box& b) {
        if (a.w == 0 || a.h == 0) return b;
        if (b.w == 0 || b.h == 0) return a;
        int nx = std::min(a.x, b.x);
        int ny = std::min(a.y, b.y);
        int nr = std::max(a.right(), b.right());
        int nb = std::max(a.bottom(), b.bottom());
        return Box{nx, ny, nr - nx, nb - ny};
    }
};

// Overlap length of the two x-extents, 0 when disjoint.
inline int x_overlap(const Box& a, const Box& b) {
    return std::max(0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
}

// Vertical gap in pixel rows between two vertically disjoint boxes;
// negative when they overlap or touch in y.
inline int vertical_gap(const Box& a, const Box& b) {
    const Box& top = a.y <= b.y ? a : b;
    const Box& bot = a.y <= b.y ? b : a;
    return bot.y - top.bottom();
}

}  // namespace cloudecode
