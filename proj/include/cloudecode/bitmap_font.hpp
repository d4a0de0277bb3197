#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cloudecode/bitgrid.hpp"
#include "cloudecode/geometry.hpp"

namespace cloudecode {

enum class Orientation { horizontal, vertical };

inline const char* orientation_name(Orientation o) {
    return o == Orientation::horizontal ? "horizontal" : "vertical";
}

// One glyph of a bitmap font: tight ink art plus its first row's position
// inside the em box (for baseline alignment).
struct FontGlyph {
    int top = 0;
    BitGrid art;
};

struct BitmapFont {
    std::string id;
    int em_height = 0;
    int baseline = 0;
    std::map<char, FontGlyph> glyphs;

    bool has(char c) const { return glyphs.count(c) != 0; }
    const FontGlyph& glyph(char c) const { return glyphs.at(c); }
};

// The font shipped with the artifact; tests and the default pipeline use it
// so no external font files are needed.
const BitmapFont& builtin_font();

// Load a font from a JSON file:
//   {"id": "...", "em_height": 20, "baseline": 16,
//    "glyphs": {"a": {"top": 6, "rows": [".##.", ...]}, ...}}
BitmapFont load_font(const std::filesystem::path& path);

// "builtin:default" (or "builtin") selects the built-in font, anything else
// is treated as a path to a JSON font file.
BitmapFont resolve_font(const std::string& font_spec);

// Nearest-neighbor render of one glyph into its scaled em box. The returned
// grid spans the full em height (width is the glyph's scaled art width), so
// grids of different glyphs rendered at the same scale share a baseline.
BitGrid render_glyph_em(const BitmapFont& font, char c, double scale);

struct LetterPlacement {
    char ch = 0;
    Box bbox;  // tight ink box, relative to the rendered word's origin
};

struct RenderedWord {
    BitGrid mask;  // tight
    std::vector<LetterPlacement> letters;
};

// Render a word at `font_size` pixels per em. Horizontal words advance left
// to right; vertical words stack em boxes so the word reads bottom to top.
RenderedWord render_word(const BitmapFont& font, std::string_view text, int font_size,
                         Orientation orientation);

}  // namespace cloudecode
