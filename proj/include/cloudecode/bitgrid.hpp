#pragma once

#include <cstdint>
#include <vector>

#include "cloudecode/geometry.hpp"

namespace cloudecode {

// Dense binary mask. One byte per cell; the grids handled here are small
// (glyph templates, letter regions), so compactness does not matter.
class BitGrid {
public:
    BitGrid() = default;
    BitGrid(int w, int h) : w_(w), h_(h), cells_(static_cast<size_t>(w) * h, 0) {}

    int width() const { return w_; }
    int height() const { return h_; }
    bool empty() const { return w_ == 0 || h_ == 0; }

    bool at(int x, int y) const { return cells_[static_cast<size_t>(y) * w_ + x] != 0; }
    void set(int x, int y, bool v = true) { cells_[static_cast<size_t>(y) * w_ + x] = v ? 1 : 0; }

    std::int64_t count() const {
        std::int64_t n = 0;
        for (auto c : cells_) n += c;
        return n;
    }

    bool operator==(const BitGrid&) const = default;

    const std::vector<std::uint8_t>& cells() const { return cells_; }

private:
    int w_ = 0;
    int h_ = 0;
    std::vector<std::uint8_t> cells_;
};

// Nearest-neighbor resample to dw x dh. Sampling uses cell centers, so the
// result is independent of traversal order.
BitGrid scale_nearest(const BitGrid& src, int dw, int dh);

// Tight bounding box of the set cells; w==h==0 when the grid is blank.
Box tight_bounds(const BitGrid& grid);

// Crop to the tight bounding box. `origin` (optional) receives the offset of
// the crop within the source grid.
BitGrid crop_tight(const BitGrid& grid, Box* origin = nullptr);

// Aspect-preserving fit of a tight mask into a ref_size x ref_size box:
// scale so the larger dimension spans the box, center the other. Returns the
// padded square grid.
BitGrid fit_to_box(const BitGrid& tight, int ref_size);

// |a AND b| / |a OR b| over same-size grids; 1.0 when both are blank.
double jaccard(const BitGrid& a, const BitGrid& b);

}  // namespace cloudecode
