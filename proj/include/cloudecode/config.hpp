#pragma once

#include <string>

#include <json.hpp>

#include "cloudecode/raster.hpp"

namespace cloudecode {

// -1 on a tunable means "derive from the image" (medians of the detected
// letters). The effective, fully resolved values can be dumped and fed back
// in to reproduce a run exactly.
struct WeightConfig {
    double x_scale = -1.0;
    double y_scale = -1.0;
    double color_scale = 60.0;
    double size_scale = -1.0;
};

struct SweepSettings {
    double k = -1.0;           // horizontal pass step
    double k_vertical = -1.0;  // vertical pass step
    double tau = 3.0;
};

struct AtlasConfig {
    std::string font = "builtin:default";
    std::string alphabet;  // defaults to k_default_alphabet, set in ctor
    int ref_size = 48;
    int calibration_reference = 48;
};

struct PipelineConfig {
    int connectivity = 8;  // 4 or 8
    int color_tolerance = 48;
    int min_pixel_count = 4;
    int diacritic_max_gap = -1;  // -1: derived from median letter height
    double confidence_floor = 0.35;
    AtlasConfig atlas;
    WeightConfig weights;           // horizontal pass
    WeightConfig weights_vertical;  // vertical pass (axes swapped)
    SweepSettings sweep;
    std::string format = "json";  // json | csv

    PipelineConfig();

    // Throws ConfigError on out-of-range values.
    void validate() const;
};

// Strict parse: unknown keys anywhere are rejected.
PipelineConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const PipelineConfig& config);

// FNV-1a 64 hex digest of the canonical JSON dump; stamped into decode
// output metadata.
std::string config_hash(const PipelineConfig& config);

}  // namespace cloudecode
