#pragma once

#include <string>
#include <vector>

#include "cloudecode/bitgrid.hpp"
#include "cloudecode/bitmap_font.hpp"
#include "cloudecode/raster.hpp"

namespace cloudecode {

inline constexpr const char* k_default_alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

struct Classification {
    char letter = 0;
    double confidence = 0.0;  // Jaccard overlap against the winning template
};

// Scale-normalized binary templates for a known font.
struct GlyphAtlas {
    std::string font_id;
    std::string alphabet;
    int ref_size = 0;
    std::vector<BitGrid> templates;  // parallel to alphabet, each ref_size x ref_size

    // Source font plus the precomputed size-calibration factors (see
    // calibrate_font_size in sizing.hpp).
    BitmapFont font;
    int calibration_reference = 0;
    double calibration_factor_h = 0.0;
    double calibration_factor_v = 0.0;
};

// Render each alphabet character, crop tight, fit into the reference box and
// binarize. Throws ConfigError for an unloadable font, an empty alphabet, or
// a character the font does not cover.
GlyphAtlas build_atlas(const std::string& font_spec, const std::string& alphabet, int ref_size,
                       int calibration_reference = 48);

// The same crop/scale procedure applied to a letter region, so regions and
// templates are directly comparable.
BitGrid normalize_mask(const ComponentRegion& region, int ref_size);

// Best Jaccard match over the alphabet; ties go to the earlier alphabet
// position. Purely mask-based: region color never matters.
Classification classify(const ComponentRegion& region, const GlyphAtlas& atlas);

}  // namespace cloudecode
