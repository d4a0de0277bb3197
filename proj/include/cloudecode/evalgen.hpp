#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cloudecode/bitmap_font.hpp"
#include "cloudecode/color.hpp"
#include "cloudecode/raster.hpp"
#include "cloudecode/sizing.hpp"

namespace cloudecode {

struct CloudEntry {
    std::string text;
    int font_size = 0;
};

struct GroundTruthEntry {
    std::string text;
    int font_size = 0;
    Box bbox;  // tight ink box
    Orientation orientation = Orientation::horizontal;
    Color color;
    std::vector<Box> letters;  // per-letter tight ink boxes
};

struct GroundTruth {
    Color background;
    std::vector<GroundTruthEntry> entries;
};

struct LayoutConfig {
    int width = 960;
    int height = 960;
    Color background{240, 240, 240};
    std::vector<Color> palette;    // defaults to a high-contrast set
    double p_vertical = 0.15;      // per-entry probability of a stacked word
    int spiral_step = 4;           // candidate grid pitch of the placement search
    std::string font = "builtin:default";

    LayoutConfig();
};

// Deterministic word-cloud synthesis: words are placed largest-first on a
// rectangular spiral around the image center; the first position whose
// padded box overlaps nothing wins. Throws LayoutError (naming the word)
// when a word cannot be placed inside the canvas.
std::pair<RasterImage, GroundTruth> synthesize_cloud(const std::vector<CloudEntry>& entries,
                                                     const LayoutConfig& layout,
                                                     std::uint64_t seed);

struct MatchedPair {
    int predicted_index = -1;
    int gt_index = -1;
    int edit_distance = 0;
    double estimated_size = 0.0;
    double gt_size = 0.0;
};

// Greedy matching in ascending (edit distance, size gap) order over all
// prediction x ground-truth pairs with normalized case-insensitive edit
// distance <= 0.5; each side is used at most once.
std::vector<MatchedPair> match_words(const std::vector<DecodedWord>& predicted,
                                     const GroundTruth& gt);

// sqrt(sum((s_e - s_gt)^2) / n). Throws ConfigError on an empty list.
double rmse(const std::vector<std::pair<double, double>>& pairs);

struct EvalReport {
    std::optional<double> rmse;  // empty when nothing matched
    double recovery_rate = 0.0;  // exact (case-insensitive) text matches / gt size
    std::vector<MatchedPair> pairs;
    std::vector<std::string> pair_predicted_texts;
    std::vector<std::string> pair_gt_texts;
    std::vector<std::string> unmatched_gt;
    std::vector<std::string> spurious_predictions;
    int gt_count = 0;
    int predicted_count = 0;
};

EvalReport evaluate(const CloudData& decoded, const GroundTruth& gt);

nlohmann::json ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& doc);
nlohmann::json eval_report_to_json(const EvalReport& report);

}  // namespace cloudecode
