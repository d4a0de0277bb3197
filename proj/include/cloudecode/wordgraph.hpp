#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cloudecode/bitmap_font.hpp"
#include "cloudecode/color.hpp"
#include "cloudecode/geometry.hpp"
#include "cloudecode/glyph.hpp"
#include "cloudecode/raster.hpp"

namespace cloudecode {

// One classified letter: position, tight box, and mean ink color.
struct GlyphNode {
    int id = 0;
    std::optional<char> letter;  // empty = below the confidence floor
    double confidence = 0.0;
    double x = 0.0;  // bbox center
    double y = 0.0;
    int width = 0;
    int height = 0;
    std::int64_t area = 0;  // width * height
    Color color;
    Box bbox;
};

// Normalizers for the five similarity terms.
struct WeightParams {
    double x_scale = 1.0;
    double y_scale = 1.0;
    double color_scale = 1.0;
    double size_scale = 1.0;
};

struct SweepConfig {
    double k = 1.0;    // pixels the sweep line advances per step
    double tau = 1.0;  // maximum edge weight that still extends a word
    Orientation orientation = Orientation::horizontal;
};

// An ordered chain of letters forming one word. Horizontal chains are
// strictly increasing in x, vertical chains strictly decreasing in y
// (vertical words read bottom to top).
struct WordCluster {
    std::vector<GlyphNode> nodes;
    Orientation orientation = Orientation::horizontal;
    Box bbox;
};

// Pair each region with its classification; ids are dense 0..n-1 in
// (min_y, min_x) order. Classifications under `confidence_floor` become
// unknown letters (the node still carries position, size and color).
std::vector<GlyphNode> build_nodes(const std::vector<ComponentRegion>& components,
                                   const std::vector<Classification>& classifications,
                                   double confidence_floor = 0.35);

// W = |dx|/x_scale + |dy|/y_scale + rgb_distance/color_scale
//     + |dheight|/size_scale + |dwidth|/size_scale
double edge_weight(const GlyphNode& a, const GlyphNode& b, const WeightParams& p);

// Minimum-total-weight matching of size min(|left|, |right|); among minimal
// matchings the lexicographically smallest pair set is returned. Pairs are
// (left id, right id), sorted.
std::vector<std::pair<int, int>> match_bipartite(
    const std::vector<int>& left, const std::vector<int>& right,
    const std::function<double(int, int)>& weight);

// Per-step snapshot of the sweep, for debug dumps.
struct SweepStepTrace {
    int step = 0;
    double line = 0.0;
    std::vector<int> visited;
    std::vector<std::vector<int>> chains;
};

// The sweep-line word builder. The line advances k pixels per step (left to
// right horizontally, bottom to top vertically); each newly visited node
// either extends an open chain — when its minimum-weight match against the
// open chain heads is within tau — or opens a new chain. Matched heads are
// consumed. Every input node ends up in exactly one returned cluster.
std::vector<WordCluster> sweep_extract(const std::vector<GlyphNode>& nodes,
                                       const SweepConfig& config, const WeightParams& params,
                                       std::vector<SweepStepTrace>* trace = nullptr);

// Join the horizontal and vertical passes: keep clusters in descending
// length (ties: horizontal first, then smaller min node id), skip any
// cluster sharing a node with one already kept, and emit leftovers as
// single-letter clusters. Output covers every node exactly once.
std::vector<WordCluster> resolve_orientations(const std::vector<WordCluster>& horizontal,
                                              const std::vector<WordCluster>& vertical);

// Letters in reading order; unknown letters render as '?'.
std::string chain_to_word(const WordCluster& cluster);

}  // namespace cloudecode
