#include "cloudecode/bitmap_font.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cloudecode/errors.hpp"

namespace cloudecode {

namespace {

// Built-in sans bitmap font on a 20-row em grid, baseline at row 16.
// Caps and digits span rows 2..15, x-height letters rows 6..15, descenders
// reach row 19. Case pairs are drawn with different proportions on purpose:
// scale normalization removes absolute size, so shape and aspect are all a
// classifier gets.
constexpr const char* k_builtin_font_data = R"(
glyph A 2
...####...
...####...
..##..##..
..##..##..
..##..##..
.##....##.
.##....##.
.########.
.########.
##......##
##......##
##......##
##......##
##......##

glyph B 2
#######..
########.
##....##.
##....##.
##....##.
########.
#######..
##....##.
##....##.
##....##.
##....##.
##....##.
########.
#######..

glyph C 2
..#####..
.#######.
##.....##
##.......
##.......
##.......
##.......
##.......
##.......
##.......
##.......
##.....##
.#######.
..#####..

glyph D 2
######...
#######..
##...##..
##....##.
##....##.
##....##.
##....##.
##....##.
##....##.
##....##.
##....##.
##...##..
#######..
######...

glyph E 2
########
########
##......
##......
##......
#######.
#######.
##......
##......
##......
##......
##......
########
########

glyph F 2
########
########
##......
##......
##......
#######.
#######.
##......
##......
##......
##......
##......
##......
##......

glyph G 2
..#####..
.#######.
##.....##
##.......
##.......
##.......
##..#####
##..#####
##.....##
##.....##
##.....##
##.....##
.#######.
..#####..

glyph H 2
##.....##
##.....##
##.....##
##.....##
##.....##
#########
#########
##.....##
##.....##
##.....##
##.....##
##.....##
##.....##
##.....##

glyph I 2
######
######
..##..
..##..
..##..
..##..
..##..
..##..
..##..
..##..
..##..
..##..
######
######

glyph J 2
....####
....####
......##
......##
......##
......##
......##
......##
......##
##....##
##....##
##....##
.######.
..####..

glyph K 2
##....##.
##...##..
##..##...
##.##....
####.....
###......
###......
####.....
##.##....
##..##...
##...##..
##....##.
##.....##
##.....##

glyph L 2
##......
##......
##......
##......
##......
##......
##......
##......
##......
##......
##......
##......
########
########

glyph M 2
##.......##
###.....###
####...####
##.##.##.##
##.##.##.##
##..###..##
##..###..##
##...#...##
##.......##
##.......##
##.......##
##.......##
##.......##
##.......##

glyph N 2
##......##
###.....##
####....##
####....##
##.##...##
##.##...##
##..##..##
##..##..##
##...##.##
##...##.##
##....####
##....####
##.....###
##......##

glyph O 2
..######..
.########.
##......##
##......##
##......##
##......##
##......##
##......##
##......##
##......##
##......##
##......##
.########.
..######..

glyph P 2
#########.
##########
##......##
##......##
##......##
##......##
##########
#########.
##........
##........
##........
##........
##........
##........

glyph Q 2
..######..
.########.
##......##
##......##
##......##
##......##
##......##
##......##
##......##
##..##..##
##...##.##
.###.####.
..######..
.....###..
......####

glyph R 2
########.
#########
##.....##
##.....##
##.....##
#########
########.
##.##....
##..##...
##..##...
##...##..
##...##..
##....##.
##.....##

glyph S 2
..######.
.########
##.....##
##.......
###......
.#####...
..#####..
....#####
.......##
.......##
##.....##
#########
.#######.
..#####..

glyph T 2
##########
##########
....##....
....##....
....##....
....##....
....##....
....##....
....##....
....##....
....##....
....##....
....##....
....##....

glyph U 2
##....##
##....##
##....##
##....##
##....##
##....##
##....##
##....##
##....##
##....##
##....##
##....##
.######.
..####..

glyph V 2
##......##
##......##
##......##
##......##
.##....##.
.##....##.
.##....##.
..##..##..
..##..##..
..##..##..
...####...
...####...
....##....
....##....

glyph W 2
##.........##
##.........##
##.........##
##.........##
##.........##
##.........##
##...###...##
##...###...##
##..##.##..##
##..##.##..##
.####...####.
.####...####.
..##.....##..
..##.....##..

glyph X 2
##......##
###....###
.##....##.
..##..##..
..##..##..
...####...
....##....
....##....
...####...
..##..##..
..##..##..
.##....##.
###....###
##......##

glyph Y 2
##......##
##......##
.##....##.
.##....##.
..##..##..
..##..##..
...####...
...####...
....##....
....##....
....##....
....##....
....##....
....##....

glyph Z 2
#########
#########
......##.
.....##..
.....##..
....##...
...##....
...##....
..##.....
.##......
.##......
##.......
#########
#########

glyph a 6
..####..
.######.
......##
......##
.#######
########
##....##
##...###
########
.####.##

glyph b 2
##......
##......
##......
##......
##.###..
#######.
###...##
##....##
##....##
##....##
##....##
###...##
#######.
##.###..

glyph c 6
..######.
.########
##.....##
##.......
##.......
##.......
##.......
##.......
.########
..######.

glyph d 2
......##
......##
......##
......##
..###.##
.#######
##...###
##....##
##....##
##....##
##....##
##...###
.#######
..###.##

glyph e 6
..#####..
.#######.
##.....##
##.....##
#########
#########
##.......
##.......
.########
..######.

glyph f 2
...####
..#####
..##...
..##...
######.
######.
..##...
..##...
..##...
..##...
..##...
..##...
..##...
..##...

glyph g 6
..###.##
.#######
##...###
##....##
##....##
##....##
##...###
.#######
..###.##
......##
......##
##....##
########
.#####..

glyph h 2
##......
##......
##......
##......
##.###..
#######.
###...##
##....##
##....##
##....##
##....##
##....##
##....##
##....##

glyph i 2
####
####
####
....
.##.
.##.
.##.
.##.
.##.
.##.
.##.
.##.
.##.
.##.

glyph j 2
...###
...###
...###
......
....##
....##
....##
....##
....##
....##
....##
....##
....##
....##
....##
##..##
######
.####.

glyph k 2
##......
##......
##......
##......
##...##.
##..##..
##.##...
####....
####....
##.##...
##..##..
##..##..
##...##.
##....##

glyph l 2
##
##
##
##
##
##
##
##
##
##
##
##
##
##

glyph m 6
############
############
##...##...##
##...##...##
##...##...##
##...##...##
##...##...##
##...##...##
##...##...##
##...##...##

glyph n 6
##.###..
#######.
###...##
##....##
##....##
##....##
##....##
##....##
##....##
##....##

glyph o 6
..######..
.########.
##......##
##......##
##......##
##......##
##......##
##......##
.########.
..######..

glyph p 6
##.###..
#######.
###...##
##....##
##....##
##....##
###...##
#######.
##.###..
##......
##......
##......
##......
##......

glyph q 6
..###.##.
.#######.
##...###.
##....##.
##....##.
##....##.
##...###.
.#######.
..###.##.
......##.
......##.
......##.
......###
.......##

glyph r 6
##.###
######
###...
##....
##....
##....
##....
##....
##....
##....

glyph s 6
.########.
##########
##........
###.......
.#######..
..#######.
.......###
........##
##########
.########.

glyph t 3
.##...
.##...
######
######
.##...
.##...
.##...
.##...
.##...
.##...
.##...
.#####
..####

glyph u 6
##.....##
##.....##
##.....##
##.....##
##.....##
##.....##
##.....##
###...###
.########
..####.##

glyph v 6
##......##
##......##
.##....##.
.##....##.
..##..##..
..##..##..
..##..##..
...####...
...####...
....##....

glyph w 6
##...##...##
##...##...##
##...##...##
##...##...##
##...##...##
##...##...##
##...##...##
##...##...##
############
############

glyph x 6
##......##
###....###
.##....##.
..##..##..
...####...
...####...
..##..##..
.##....##.
###....###
##......##

glyph y 6
##.....##
##.....##
.##...##.
.##...##.
..##.##..
..##.##..
...###...
...###...
....##...
....##...
...##....
...##....
.###.....
.##......

glyph z 6
#########
#########
......##.
.....##..
....##...
...##....
..##.....
.##......
#########
#########

glyph 0 2
..#####..
.#######.
##.....##
##....###
##...####
##..##.##
##.##..##
####...##
###....##
##.....##
##.....##
##.....##
.#######.
..#####..

glyph 1 2
...##..
..###..
.####..
...##..
...##..
...##..
...##..
...##..
...##..
...##..
...##..
...##..
#######
#######

glyph 2 2
..#####..
.#######.
##.....##
##.....##
.......##
......###
.....###.
....###..
...###...
..###....
.###.....
###......
#########
#########

glyph 3 2
..#####..
.#######.
##.....##
.......##
.......##
...#####.
...#####.
.......##
.......##
.......##
##.....##
##.....##
.#######.
..#####..

glyph 4 2
.....##..
....###..
...####..
...####..
..##.##..
..##.##..
.##..##..
.##..##..
##...##..
#########
#########
.....##..
.....##..
.....##..

glyph 5 2
########.
########.
##.......
##.......
##.......
#######..
########.
......###
.......##
.......##
##.....##
###...###
.#######.
..#####..

glyph 6 2
...#####.
..######.
.##......
##.......
##.......
##.####..
#######..
###...##.
##.....##
##.....##
##.....##
###...###
.#######.
..#####..

glyph 7 2
#########
#########
.......##
......##.
......##.
.....##..
.....##..
....##...
....##...
...##....
...##....
..##.....
..##.....
..##.....

glyph 8 2
..#####..
.#######.
##.....##
##.....##
.##...##.
..#####..
..#####..
.##...##.
##.....##
##.....##
##.....##
##.....##
.#######.
..#####..

glyph 9 2
..#####..
.#######.
##.....##
##.....##
##.....##
.########
..####.##
.......##
.......##
......##.
.....###.
....###..
..####...
.####....
)";

BitmapFont parse_font(const std::string& id, int em_height, int baseline, const std::string& data) {
    BitmapFont font;
    font.id = id;
    font.em_height = em_height;
    font.baseline = baseline;

    std::istringstream in(data);
    std::string line;
    char current = 0;
    int top = 0;
    std::vector<std::string> rows;

    auto flush = [&]() {
        if (current == 0) return;
        if (rows.empty()) throw ConfigError(std::string("font glyph '") + current + "' has no rows");
        size_t width = 0;
        for (const auto& r : rows) width = std::max(width, r.size());
        BitGrid art(static_cast<int>(width), static_cast<int>(rows.size()));
        for (size_t y = 0; y < rows.size(); ++y)
            for (size_t x = 0; x < rows[y].size(); ++x)
                if (rows[y][x] == '#') art.set(static_cast<int>(x), static_cast<int>(y));
        if (art.count() == 0) throw ConfigError(std::string("font glyph '") + current + "' is blank");
        font.glyphs[current] = FontGlyph{top, std::move(art)};
        current = 0;
        rows.clear();
    };

    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line.rfind("glyph ", 0) == 0) {
            flush();
            std::istringstream header(line.substr(6));
            std::string ch;
            header >> ch >> top;
            if (ch.size() != 1 || header.fail())
                throw ConfigError("bad font glyph header: " + line);
            current = ch[0];
        } else {
            rows.push_back(line);
        }
    }
    flush();
    return font;
}

}  // namespace

const BitmapFont& builtin_font() {
    static const BitmapFont font = parse_font("builtin:default", 20, 16, k_builtin_font_data);
    return font;
}

BitmapFont load_font(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open font file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad font file " + path.string() + ": " + e.what());
    }
    BitmapFont font;
    try {
        font.id = doc.value("id", path.stem().string());
        font.em_height = doc.at("em_height").get<int>();
        font.baseline = doc.at("baseline").get<int>();
        for (const auto& [key, g] : doc.at("glyphs").items()) {
            if (key.size() != 1) throw ConfigError("font glyph keys must be single characters: " + key);
            auto rows = g.at("rows").get<std::vector<std::string>>();
            size_t width = 0;
            for (const auto& r : rows) width = std::max(width, r.size());
            if (rows.empty() || width == 0)
                throw ConfigError("font glyph '" + key + "' is blank");
            BitGrid art(static_cast<int>(width), static_cast<int>(rows.size()));
            for (size_t y = 0; y < rows.size(); ++y)
                for (size_t x = 0; x < rows[y].size(); ++x)
                    if (rows[y][x] == '#') art.set(static_cast<int>(x), static_cast<int>(y));
            if (art.count() == 0) throw ConfigError("font glyph '" + key + "' is blank");
            font.glyphs[key[0]] = FontGlyph{g.value("top", 0), std::move(art)};
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad font file " + path.string() + ": " + e.what());
    }
    if (font.em_height <= 0 || font.glyphs.empty())
        throw ConfigError("bad font file " + path.string() + ": empty font");
    return font;
}

BitmapFont resolve_font(const std::string& font_spec) {
    if (font_spec == "builtin" || font_spec == "builtin:default") return builtin_font();
    return load_font(font_spec);
}

BitGrid render_glyph_em(const BitmapFont& font, char c, double scale) {
    const FontGlyph& g = font.glyph(c);
    int em_h = std::max(1, static_cast<int>(std::lround(font.em_height * scale)));
    int dw = std::max(1, static_cast<int>(std::lround(g.art.width() * scale)));
    BitGrid out(dw, em_h);
    for (int y = 0; y < em_h; ++y) {
        int em_row = std::min(font.em_height - 1,
                              static_cast<int>((y + 0.5) * font.em_height / em_h));
        int art_row = em_row - g.top;
        if (art_row < 0 || art_row >= g.art.height()) continue;
        for (int x = 0; x < dw; ++x) {
            int sx = std::min(g.art.width() - 1, static_cast<int>((x + 0.5) * g.art.width() / dw));
            if (g.art.at(sx, art_row)) out.set(x, y);
        }
    }
    return out;
}

namespace {

// Spacing in em units; clamped to at least one blank pixel so adjacent
// letters never touch and stay separate connected components.
constexpr double k_letter_gap_em = 0.15;
constexpr double k_stack_gap_em = 0.30;

}  // namespace

RenderedWord render_word(const BitmapFont& font, std::string_view text, int font_size,
                         Orientation orientation) {
    if (text.empty()) throw ConfigError("cannot render an empty word");
    for (char c : text)
        if (!font.has(c))
            throw ConfigError(std::string("character '") + c + "' missing from font " + font.id);

    double scale = double(font_size) / font.em_height;
    std::vector<BitGrid> grids;
    grids.reserve(text.size());
    for (char c : text) grids.push_back(render_glyph_em(font, c, scale));
    int em_h = grids.front().height();

    BitGrid canvas;
    std::vector<Box> positions(text.size());  // em-grid placements on the canvas

    if (orientation == Orientation::horizontal) {
        int gap = std::max(1, static_cast<int>(std::lround(k_letter_gap_em * font_size)));
        int total_w = 0;
        for (const auto& g : grids) total_w += g.width();
        total_w += gap * static_cast<int>(text.size() - 1);
        canvas = BitGrid(total_w, em_h);
        int x = 0;
        for (size_t i = 0; i < grids.size(); ++i) {
            positions[i] = Box{x, 0, grids[i].width(), em_h};
            x += grids[i].width() + gap;
        }
    } else {
        // First letter at the bottom; the word reads bottom to top. Letters
        // stack by their ink boxes (not full em boxes), so the centers of
        // stacked letters sit about as far apart as those of a row.
        int gap = std::max(2, static_cast<int>(std::lround(k_stack_gap_em * font_size)));
        int max_w = 0;
        for (const auto& g : grids) max_w = std::max(max_w, g.width());
        std::vector<Box> inks(grids.size());
        int total_h = gap * static_cast<int>(text.size() - 1);
        for (size_t i = 0; i < grids.size(); ++i) {
            inks[i] = tight_bounds(grids[i]);
            total_h += inks[i].h;
        }
        canvas = BitGrid(max_w, total_h);
        int cursor = total_h;
        for (size_t i = 0; i < grids.size(); ++i) {
            cursor -= inks[i].h;
            // Em grid placed so its ink lands at the cursor.
            positions[i] =
                Box{(max_w - grids[i].width()) / 2, cursor - inks[i].y, grids[i].width(), em_h};
            cursor -= gap;
        }
    }

    RenderedWord word;
    word.letters.resize(text.size());
    for (size_t i = 0; i < grids.size(); ++i) {
        Box ink;
        BitGrid tight = crop_tight(grids[i], &ink);
        for (int y = 0; y < tight.height(); ++y)
            for (int x = 0; x < tight.width(); ++x)
                if (tight.at(x, y)) canvas.set(positions[i].x + ink.x + x, positions[i].y + ink.y + y);
        word.letters[i] = LetterPlacement{
            text[i], Box{positions[i].x + ink.x, positions[i].y + ink.y, ink.w, ink.h}};
    }

    Box word_ink;
    word.mask = crop_tight(canvas, &word_ink);
    for (auto& letter : word.letters) {
        letter.bbox.x -= word_ink.x;
        letter.bbox.y -= word_ink.y;
    }
    return word;
}

}  // namespace cloudecode
