#include "cloudecode/config.hpp"

#include <cstdint>
#include <cstdio>
#include <set>

#include "cloudecode/errors.hpp"
#include "cloudecode/glyph.hpp"

namespace cloudecode {

PipelineConfig::PipelineConfig() { atlas.alphabet = k_default_alphabet; }

namespace {

void require_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown config key \"" + key + "\" in " + where);
}

double get_number(const nlohmann::json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(std::string("config key \"") + key + "\" must be numeric");
    return obj[key].get<double>();
}

void check(bool ok, const char* message) {
    if (!ok) throw ConfigError(message);
}

}  // namespace

void PipelineConfig::validate() const {
    check(connectivity == 4 || connectivity == 8, "connectivity must be 4 or 8");
    check(color_tolerance >= 0 && color_tolerance <= 255, "color_tolerance must be in [0, 255]");
    check(min_pixel_count >= 0, "min_pixel_count must be >= 0");
    check(diacritic_max_gap >= -1, "diacritic_max_gap must be >= 0 (or -1 for auto)");
    check(confidence_floor >= 0.0 && confidence_floor <= 1.0, "confidence_floor must be in [0, 1]");
    check(!atlas.alphabet.empty(), "atlas.alphabet must not be empty");
    check(atlas.ref_size >= 8, "atlas.ref_size must be >= 8");
    check(atlas.calibration_reference >= 8, "atlas.calibration_reference must be >= 8");
    for (const WeightConfig* w : {&weights, &weights_vertical}) {
        check(w->x_scale > 0 || w->x_scale == -1, "weight scales must be > 0 (or -1 for auto)");
        check(w->y_scale > 0 || w->y_scale == -1, "weight scales must be > 0 (or -1 for auto)");
        check(w->color_scale > 0, "color_scale must be > 0");
        check(w->size_scale > 0 || w->size_scale == -1, "weight scales must be > 0 (or -1 for auto)");
    }
    check(sweep.k >= 1 || sweep.k == -1, "sweep.k must be >= 1 (or -1 for auto)");
    check(sweep.k_vertical >= 1 || sweep.k_vertical == -1,
          "sweep.k_vertical must be >= 1 (or -1 for auto)");
    check(sweep.tau > 0, "sweep.tau must be > 0");
    check(format == "json" || format == "csv", "format must be \"json\" or \"csv\"");
}

namespace {

WeightConfig weights_from_json(const nlohmann::json& obj, const std::string& where,
                               const WeightConfig& defaults) {
    require_keys(obj, {"x_scale", "y_scale", "color_scale", "size_scale"}, where);
    WeightConfig w = defaults;
    w.x_scale = get_number(obj, "x_scale", w.x_scale);
    w.y_scale = get_number(obj, "y_scale", w.y_scale);
    w.color_scale = get_number(obj, "color_scale", w.color_scale);
    w.size_scale = get_number(obj, "size_scale", w.size_scale);
    return w;
}

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    require_keys(doc,
                 {"connectivity", "color_tolerance", "min_pixel_count", "diacritic_max_gap",
                  "confidence_floor", "atlas", "weights", "weights_vertical", "sweep", "format"},
                 "config");
    PipelineConfig c;
    c.connectivity = static_cast<int>(get_number(doc, "connectivity", c.connectivity));
    c.color_tolerance = static_cast<int>(get_number(doc, "color_tolerance", c.color_tolerance));
    c.min_pixel_count = static_cast<int>(get_number(doc, "min_pixel_count", c.min_pixel_count));
    c.diacritic_max_gap = static_cast<int>(get_number(doc, "diacritic_max_gap", c.diacritic_max_gap));
    c.confidence_floor = get_number(doc, "confidence_floor", c.confidence_floor);
    if (doc.contains("atlas")) {
        const auto& a = doc["atlas"];
        require_keys(a, {"font", "alphabet", "ref_size", "calibration_reference"}, "config.atlas");
        if (a.contains("font")) c.atlas.font = a["font"].get<std::string>();
        if (a.contains("alphabet")) c.atlas.alphabet = a["alphabet"].get<std::string>();
        c.atlas.ref_size = static_cast<int>(get_number(a, "ref_size", c.atlas.ref_size));
        c.atlas.calibration_reference =
            static_cast<int>(get_number(a, "calibration_reference", c.atlas.calibration_reference));
    }
    if (doc.contains("weights"))
        c.weights = weights_from_json(doc["weights"], "config.weights", c.weights);
    if (doc.contains("weights_vertical"))
        c.weights_vertical =
            weights_from_json(doc["weights_vertical"], "config.weights_vertical", c.weights_vertical);
    if (doc.contains("sweep")) {
        const auto& s = doc["sweep"];
        require_keys(s, {"k", "k_vertical", "tau"}, "config.sweep");
        c.sweep.k = get_number(s, "k", c.sweep.k);
        c.sweep.k_vertical = get_number(s, "k_vertical", c.sweep.k_vertical);
        c.sweep.tau = get_number(s, "tau", c.sweep.tau);
    }
    if (doc.contains("format")) c.format = doc["format"].get<std::string>();
    c.validate();
    return c;
}

nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json doc;
    doc["connectivity"] = c.connectivity;
    doc["color_tolerance"] = c.color_tolerance;
    doc["min_pixel_count"] = c.min_pixel_count;
    doc["diacritic_max_gap"] = c.diacritic_max_gap;
    doc["confidence_floor"] = c.confidence_floor;
    doc["atlas"] = {{"font", c.atlas.font},
                    {"alphabet", c.atlas.alphabet},
                    {"ref_size", c.atlas.ref_size},
                    {"calibration_reference", c.atlas.calibration_reference}};
    auto weights_json = [](const WeightConfig& w) {
        return nlohmann::json{{"x_scale", w.x_scale},
                              {"y_scale", w.y_scale},
                              {"color_scale", w.color_scale},
                              {"size_scale", w.size_scale}};
    };
    doc["weights"] = weights_json(c.weights);
    doc["weights_vertical"] = weights_json(c.weights_vertical);
    doc["sweep"] = {{"k", c.sweep.k}, {"k_vertical", c.sweep.k_vertical}, {"tau", c.sweep.tau}};
    doc["format"] = c.format;
    return doc;
}

std::string config_hash(const PipelineConfig& config) {
    std::string dump = config_to_json(config).dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

}  // namespace cloudecode
