#include "cloudecode/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <map>
#include <memory>
#include <numeric>

#include "cloudecode/errors.hpp"

namespace cloudecode {

RasterImage RasterImage::filled(int w, int h, Color c) {
    RasterImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<size_t>(w) * h * 3);
    for (size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = c.r;
        img.pixels[i + 1] = c.g;
        img.pixels[i + 2] = c.b;
    }
    return img;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

RasterImage load_image(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open image file: " + path.string());

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw DecodeError("not a PNG file: " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DecodeError("png reader allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError("png reader allocation failed");
    }

    std::vector<std::uint8_t> rgba;
    std::vector<png_bytep> rows;
    png_uint_32 w = 0, h = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("malformed PNG: " + path.string());
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    w = png_get_image_width(png, info);
    h = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    // Normalize everything to 8-bit RGBA.
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_filler(png, 0xFF, PNG_FILLER_AFTER);
    png_read_update_info(png, info);

    rgba.resize(static_cast<size_t>(w) * h * 4);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = rgba.data() + static_cast<size_t>(y) * w * 4;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (w == 0 || h == 0) throw ConfigError("zero-dimension image: " + path.string());

    RasterImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.pixels.resize(static_cast<size_t>(w) * h * 3);
    for (size_t p = 0, q = 0; p < rgba.size(); p += 4, q += 3) {
        unsigned a = rgba[p + 3];
        // Composite over opaque white.
        img.pixels[q] = static_cast<std::uint8_t>((rgba[p] * a + 255u * (255u - a) + 127u) / 255u);
        img.pixels[q + 1] = static_cast<std::uint8_t>((rgba[p + 1] * a + 255u * (255u - a) + 127u) / 255u);
        img.pixels[q + 2] = static_cast<std::uint8_t>((rgba[p + 2] * a + 255u * (255u - a) + 127u) / 255u);
    }
    return img;
}

void write_image(const std::filesystem::path& path, const RasterImage& image) {
    if (image.width <= 0 || image.height <= 0)
        throw ConfigError("cannot write zero-dimension image");

    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw IoError("cannot open file for writing: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DecodeError("png writer allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw DecodeError("png writer allocation failed");
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png write failed: " + path.string());
    }

    png_init_io(png, fp.get());
    // Fixed settings; identical input must produce identical bytes.
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_SUB);
    png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_bytep> rows(image.height);
    for (int y = 0; y < image.height; ++y)
        rows[y] = const_cast<png_bytep>(image.pixels.data() + static_cast<size_t>(y) * image.width * 3);
    png_write_image(png, rows.data());
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
}

Color detect_background(const RasterImage& image) {
    std::map<Color, int> counts;
    int w = image.width, h = image.height;
    for (int x = 0; x < w; ++x) {
        ++counts[image.at(x, 0)];
        if (h > 1) ++counts[image.at(x, h - 1)];
    }
    for (int y = 1; y + 1 < h; ++y) {
        ++counts[image.at(0, y)];
        if (w > 1) ++counts[image.at(w - 1, y)];
    }
    Color best{};
    int best_count = -1;
    for (const auto& [color, n] : counts) {
        // std::map iterates in lexicographic (r,g,b) order, so on a tie the
        // smaller color is kept.
        if (n > best_count) {
            best = color;
            best_count = n;
        }
    }
    return best;
}

Color ComponentRegion::mean_color() const {
    if (pixel_count == 0) return Color{};
    auto channel = [&](int i) {
        return static_cast<std::uint8_t>((color_sum[i] + pixel_count / 2) / pixel_count);
    };
    return Color{channel(0), channel(1), channel(2)};
}

namespace {

// Union-find over provisional labels.
struct LabelSet {
    std::vector<std::int32_t> parent;

    std::int32_t make() {
        parent.push_back(static_cast<std::int32_t>(parent.size()));
        return parent.back();
    }

    std::int32_t find(std::int32_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }

    void join(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

ComponentRegion build_region(const RasterImage& image, const std::vector<std::pair<int, int>>& points) {
    int minx = points[0].first, maxx = points[0].first;
    int miny = points[0].second, maxy = points[0].second;
    for (const auto& [x, y] : points) {
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
    }
    ComponentRegion region;
    region.bbox = Box{minx, miny, maxx - minx + 1, maxy - miny + 1};
    region.mask = BitGrid(region.bbox.w, region.bbox.h);
    region.pixel_count = static_cast<std::int64_t>(points.size());
    for (const auto& [x, y] : points) {
        region.mask.set(x - minx, y - miny);
        Color c = image.at(x, y);
        region.color_sum[0] += c.r;
        region.color_sum[1] += c.g;
        region.color_sum[2] += c.b;
    }
    return region;
}

void sort_regions(std::vector<ComponentRegion>& regions) {
    std::sort(regions.begin(), regions.end(), [](const ComponentRegion& a, const ComponentRegion& b) {
        return std::tie(a.bbox.y, a.bbox.x, a.bbox.h, a.bbox.w, a.pixel_count) <
               std::tie(b.bbox.y, b.bbox.x, b.bbox.h, b.bbox.w, b.pixel_count);
    });
}

}  // namespace

std::vector<ComponentRegion> extract_components(const RasterImage& image, Color background,
                                                Connectivity connectivity, int color_tolerance,
                                                int min_pixel_count) {
    const int w = image.width, h = image.height;
    std::vector<std::int32_t> label(static_cast<size_t>(w) * h, -1);
    LabelSet sets;

    auto is_foreground = [&](int x, int y) {
        return max_channel_distance(image.at(x, y), background) > color_tolerance;
    };
    auto similar = [&](int x0, int y0, int x1, int y1) {
        return max_channel_distance(image.at(x0, y0), image.at(x1, y1)) <= color_tolerance;
    };

    // Pass 1: scan top-to-bottom, left-to-right, union with already-labeled
    // neighbors (W and N for 4-way, plus NW and NE for 8-way).
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!is_foreground(x, y)) continue;
            std::int32_t current = -1;
            auto consider = [&](int nx, int ny) {
                if (nx < 0 || nx >= w || ny < 0) return;
                std::int32_t nl = label[static_cast<size_t>(ny) * w + nx];
                if (nl < 0 || !similar(x, y, nx, ny)) return;
                if (current < 0)
                    current = sets.find(nl);
                else
                    sets.join(current, nl);
            };
            consider(x - 1, y);
            consider(x, y - 1);
            if (connectivity == Connectivity::eight) {
                consider(x - 1, y - 1);
                consider(x + 1, y - 1);
            }
            if (current < 0) current = sets.make();
            label[static_cast<size_t>(y) * w + x] = current;
        }
    }

    // Pass 2: gather pixels per root.
    std::vector<std::vector<std::pair<int, int>>> members(sets.parent.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::int32_t l = label[static_cast<size_t>(y) * w + x];
            if (l >= 0) members[sets.find(l)].emplace_back(x, y);
        }

    std::vector<ComponentRegion> regions;
    for (const auto& points : members) {
        if (points.empty()) continue;
        if (static_cast<int>(points.size()) < min_pixel_count) continue;
        regions.push_back(build_region(image, points));
    }
    sort_regions(regions);
    return regions;
}

namespace {

ComponentRegion merge_pair(const ComponentRegion& a, const ComponentRegion& b) {
    ComponentRegion merged;
    merged.bbox = Box::union_of(a.bbox, b.bbox);
    merged.mask = BitGrid(merged.bbox.w, merged.bbox.h);
    for (const ComponentRegion* part : {&a, &b})
        for (int y = 0; y < part->bbox.h; ++y)
            for (int x = 0; x < part->bbox.w; ++x)
                if (part->mask.at(x, y))
                    merged.mask.set(part->bbox.x - merged.bbox.x + x, part->bbox.y - merged.bbox.y + y);
    merged.pixel_count = a.pixel_count + b.pixel_count;
    for (int i = 0; i < 3; ++i) merged.color_sum[i] = a.color_sum[i] + b.color_sum[i];
    return merged;
}

// A detached mark sits a sliver above its stem: the gap is small relative to
// the taller part. Stacked letters of a vertical word are separated by a good
// fraction of their own height, so they never satisfy this.
constexpr double k_mark_gap_ratio = 0.3;

bool mergeable(const ComponentRegion& a, const ComponentRegion& b, int max_gap, int color_tolerance) {
    int overlap = x_overlap(a.bbox, b.bbox);
    if (overlap * 2 < std::min(a.bbox.w, b.bbox.w)) return false;
    int gap = vertical_gap(a.bbox, b.bbox);
    if (gap < 0 || gap > max_gap) return false;
    int max_h = std::max(a.bbox.h, b.bbox.h);
    if (gap > k_mark_gap_ratio * max_h) return false;
    return max_channel_distance(a.mean_color(), b.mean_color()) <= color_tolerance;
}

}  // namespace

std::vector<ComponentRegion> merge_diacritics(std::vector<ComponentRegion> components, int max_gap,
                                              int color_tolerance) {
    bool changed = true;
    while (changed) {
        changed = false;
        // Pick the closest mergeable pair first; index order breaks ties.
        int best_i = -1, best_j = -1, best_gap = max_gap + 1;
        for (size_t i = 0; i < components.size(); ++i) {
            for (size_t j = i + 1; j < components.size(); ++j) {
                if (!mergeable(components[i], components[j], max_gap, color_tolerance)) continue;
                int gap = vertical_gap(components[i].bbox, components[j].bbox);
                if (gap < best_gap) {
                    best_gap = gap;
                    best_i = static_cast<int>(i);
                    best_j = static_cast<int>(j);
                }
            }
        }
        if (best_i >= 0) {
            components[best_i] = merge_pair(components[best_i], components[best_j]);
            components.erase(components.begin() + best_j);
            changed = true;
        }
    }
    sort_regions(components);
    return components;
}

}  // namespace cloudecode
