#include "cloudecode/glyph.hpp"

#include <cmath>

#include "cloudecode/errors.hpp"

namespace cloudecode {

namespace {

// Mean per-letter ink-box area of the alphabet rendered at the reference
// size. Word-level, not letter-level: the decoder's raw size is word bbox
// area per letter, which includes inter-letter spacing and the full line
// band, so the calibration measures the same quantity. The alphabet is
// rendered in word-length chunks rather than one 62-letter run: a word's
// bbox is set by its own tallest and widest letters, and a single run would
// overweight the extreme glyphs.
double mean_letter_area(const BitmapFont& font, const std::string& alphabet, int reference_size,
                        Orientation orientation) {
    constexpr size_t k_chunk_length = 6;
    double total = 0.0;
    for (size_t start = 0; start < alphabet.size(); start += k_chunk_length) {
        std::string chunk = alphabet.substr(start, k_chunk_length);
        RenderedWord word = render_word(font, chunk, reference_size, orientation);
        total += double(tight_bounds(word.mask).area());
    }
    return total / double(alphabet.size());
}

}  // namespace

GlyphAtlas build_atlas(const std::string& font_spec, const std::string& alphabet, int ref_size,
                       int calibration_reference) {
    if (alphabet.empty()) throw ConfigError("atlas alphabet is empty");
    if (ref_size < 8) throw ConfigError("atlas ref_size must be >= 8");
    if (calibration_reference < 8) throw ConfigError("calibration reference size must be >= 8");

    GlyphAtlas atlas;
    atlas.font = resolve_font(font_spec);
    atlas.font_id = atlas.font.id;
    atlas.alphabet = alphabet;
    atlas.ref_size = ref_size;
    atlas.templates.reserve(alphabet.size());

    for (char c : alphabet) {
        if (!atlas.font.has(c))
            throw ConfigError(std::string("character '") + c + "' missing from font " + atlas.font_id);
        BitGrid em = render_glyph_em(atlas.font, c, 1.0);
        BitGrid tight = crop_tight(em);
        if (tight.empty() || tight.count() == 0)
            throw ConfigError(std::string("character '") + c + "' renders blank in font " + atlas.font_id);
        atlas.templates.push_back(fit_to_box(tight, ref_size));
    }

    atlas.calibration_reference = calibration_reference;
    atlas.calibration_factor_h =
        calibration_reference /
        std::sqrt(mean_letter_area(atlas.font, alphabet, calibration_reference, Orientation::horizontal));
    atlas.calibration_factor_v =
        calibration_reference /
        std::sqrt(mean_letter_area(atlas.font, alphabet, calibration_reference, Orientation::vertical));
    return atlas;
}

BitGrid normalize_mask(const ComponentRegion& region, int ref_size) {
    // The region mask is bbox-tight by construction.
    return fit_to_box(region.mask, ref_size);
}

Classification classify(const ComponentRegion& region, const GlyphAtlas& atlas) {
    BitGrid norm = normalize_mask(region, atlas.ref_size);
    Classification best{atlas.alphabet[0], -1.0};
    for (size_t i = 0; i < atlas.templates.size(); ++i) {
        double score = jaccard(norm, atlas.templates[i]);
        if (score > best.confidence) {
            best.letter = atlas.alphabet[i];
            best.confidence = score;
        }
    }
    return best;
}

}  // namespace cloudecode
