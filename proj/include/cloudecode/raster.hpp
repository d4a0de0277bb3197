#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cloudecode/bitgrid.hpp"
#include "cloudecode/color.hpp"
#include "cloudecode/geometry.hpp"

namespace cloudecode {

// Row-major 8-bit RGB pixel grid, the decoder's sole input format.
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // 3 bytes per pixel

    static RasterImage filled(int w, int h, Color c);

    Color at(int x, int y) const {
        size_t i = (static_cast<size_t>(y) * width + x) * 3;
        return Color{pixels[i], pixels[i + 1], pixels[i + 2]};
    }

    void set(int x, int y, Color c) {
        size_t i = (static_cast<size_t>(y) * width + x) * 3;
        pixels[i] = c.r;
        pixels[i + 1] = c.g;
        pixels[i + 2] = c.b;
    }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

// Decode a PNG (8-bit RGB/RGBA, also palette/gray via expansion). Alpha is
// composited over opaque white.
RasterImage load_image(const std::filesystem::path& path);

// Encode as 8-bit RGB PNG with fixed settings so output bytes are stable.
void write_image(const std::filesystem::path& path, const RasterImage& image);

// Most frequent color on the outermost pixel ring; ties resolved by
// lexicographic (r, g, b) order.
Color detect_background(const RasterImage& image);

enum class Connectivity { four = 4, eight = 8 };

// One connected same-color foreground segment.
struct ComponentRegion {
    Box bbox;       // tight
    BitGrid mask;   // bbox-local, dimensions equal bbox w/h
    std::int64_t pixel_count = 0;
    std::uint64_t color_sum[3] = {0, 0, 0};  // per-channel sums over mask pixels

    Color mean_color() const;
    bool contains(int x, int y) const {
        return bbox.contains(x, y) && mask.at(x - bbox.x, y - bbox.y);
    }
};

// Scan-order connected-component labeling. Foreground pixels are those whose
// max-channel distance from `background` exceeds `color_tolerance`; two
// foreground pixels join the same component iff adjacent under `connectivity`
// and within `color_tolerance` of each other. Components smaller than
// `min_pixel_count` are dropped as noise. Result sorted by (min_y, min_x).
std::vector<ComponentRegion> extract_components(const RasterImage& image, Color background,
                                                Connectivity connectivity, int color_tolerance,
                                                int min_pixel_count = 4);

// Reattach detached letter marks (the dots of i and j) to their stems.
// A pair merges when the boxes overlap >= 50% in x-extent, are vertically
// disjoint with a small gap, have similar mean color, and the smaller part
// is well under the larger one in pixel count (so stacked letters of a
// vertical word never fuse). Applied until a fixpoint. Result re-sorted by
// (min_y, min_x).
std::vector<ComponentRegion> merge_diacritics(std::vector<ComponentRegion> components, int max_gap,
                                              int color_tolerance);

}  // namespace cloudecode
