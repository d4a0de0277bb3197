#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cloudecode/config.hpp"
#include "cloudecode/glyph.hpp"
#include "cloudecode/raster.hpp"
#include "cloudecode/wordgraph.hpp"

namespace cloudecode {

struct DecodedWord {
    std::string text;
    double raw_size = 0.0;            // word bbox area per letter, pixels^2
    double font_size_estimate = 0.0;  // calibrated, in font-size pixels
    Box bbox;
    Orientation orientation = Orientation::horizontal;
};

struct CloudData {
    std::vector<DecodedWord> words;  // sorted by descending weight
    std::string image;               // source path, as given
    std::string config_hash;
};

// Area of the word's tight bounding box divided by its letter count.
double estimate_size(const WordCluster& cluster);

// sqrt(raw_size) scaled so that words rendered at the atlas calibration
// reference size come out near that size. The factor is precomputed per
// atlas (and per orientation, since stacked words have different per-letter
// geometry than rows).
double calibrate_font_size(double raw_size, const GlyphAtlas& atlas,
                           Orientation orientation = Orientation::horizontal);

// Optional introspection of a decode run.
struct DecodeStats {
    int components = 0;
    int nodes = 0;
    int clusters = 0;
    bool partition_ok = false;
    PipelineConfig effective_config;  // all auto values resolved
    std::vector<SweepStepTrace> sweep_horizontal;
    std::vector<SweepStepTrace> sweep_vertical;
    std::vector<GlyphNode> node_list;
    std::vector<ComponentRegion> component_list;
};

// The full pipeline: background -> components -> diacritic merge ->
// classification -> nodes -> both sweeps -> orientation resolution ->
// word text and size. A blank image decodes to an empty word list.
CloudData decode_cloud(const RasterImage& image, const PipelineConfig& config,
                       DecodeStats* stats = nullptr);

nlohmann::json cloud_to_json(const CloudData& cloud);
CloudData cloud_from_json(const nlohmann::json& doc);
std::string cloud_to_csv(const CloudData& cloud);

}  // namespace cloudecode
