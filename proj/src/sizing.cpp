#include "cloudecode/sizing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "cloudecode/errors.hpp"

namespace cloudecode {

double estimate_size(const WordCluster& cluster) {
    if (cluster.nodes.empty()) throw ConfigError("estimate_size: empty cluster");
    return double(cluster.bbox.area()) / double(cluster.nodes.size());
}

double calibrate_font_size(double raw_size, const GlyphAtlas& atlas, Orientation orientation) {
    if (raw_size <= 0) throw ConfigError("calibrate_font_size: raw_size must be > 0");
    double factor = orientation == Orientation::horizontal ? atlas.calibration_factor_h
                                                           : atlas.calibration_factor_v;
    return std::sqrt(raw_size) * factor;
}

namespace {

double median_extent(const std::vector<ComponentRegion>& regions, bool width) {
    if (regions.empty()) return 0.0;
    std::vector<int> v;
    v.reserve(regions.size());
    for (const auto& r : regions) v.push_back(width ? r.bbox.w : r.bbox.h);
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

// Fallbacks keep the resolved config meaningful on blank images.
constexpr double k_fallback_width = 8.0;
constexpr double k_fallback_height = 16.0;

}  // namespace

CloudData decode_cloud(const RasterImage& image, const PipelineConfig& config, DecodeStats* stats) {
    config.validate();
    if (image.width < 1 || image.height < 1 || image.pixels.size() !=
        static_cast<size_t>(image.width) * image.height * 3)
        throw ConfigError("decode_cloud: malformed image buffer");

    GlyphAtlas atlas = build_atlas(config.atlas.font, config.atlas.alphabet, config.atlas.ref_size,
                                   config.atlas.calibration_reference);

    Color background = detect_background(image);
    Connectivity connectivity =
        config.connectivity == 4 ? Connectivity::four : Connectivity::eight;
    std::vector<ComponentRegion> components = extract_components(
        image, background, connectivity, config.color_tolerance, config.min_pixel_count);

    PipelineConfig effective = config;

    // Diacritic gap scales with letter size when left on auto.
    double median_h_raw = median_extent(components, false);
    if (effective.diacritic_max_gap < 0)
        effective.diacritic_max_gap =
            std::max(5, static_cast<int>(std::lround(0.35 * (median_h_raw > 0 ? median_h_raw
                                                                              : k_fallback_height))));
    components = merge_diacritics(components, effective.diacritic_max_gap, config.color_tolerance);

    std::vector<Classification> classifications;
    classifications.reserve(components.size());
    for (const auto& region : components) classifications.push_back(classify(region, atlas));

    std::vector<GlyphNode> nodes = build_nodes(components, classifications, config.confidence_floor);

    double mw = median_extent(components, true);
    double mh = median_extent(components, false);
    if (mw <= 0) mw = k_fallback_width;
    if (mh <= 0) mh = k_fallback_height;

    // Per the sweep-axis swap, the vertical pass normalizes its along-axis
    // (y) by letter heights and its cross-axis by widths. The cross and size
    // normalizers are full medians (not halves): ascender/descender center
    // offsets and letter width variance both grow with word size, and mixed
    // clouds must not shed their largest words' letters.
    auto resolve = [](double value, double fallback) { return value > 0 ? value : fallback; };
    effective.weights.x_scale = resolve(config.weights.x_scale, 2.5 * mw);
    effective.weights.y_scale = resolve(config.weights.y_scale, 1.0 * mh);
    effective.weights.size_scale = resolve(config.weights.size_scale, 2.0 * mh);
    effective.weights_vertical.x_scale = resolve(config.weights_vertical.x_scale, 2.5 * mh);
    effective.weights_vertical.y_scale = resolve(config.weights_vertical.y_scale, 1.0 * mw);
    effective.weights_vertical.size_scale = resolve(config.weights_vertical.size_scale, 2.0 * mw);
    effective.sweep.k = resolve(config.sweep.k, std::max(1.0, 0.25 * mw));
    effective.sweep.k_vertical = resolve(config.sweep.k_vertical, std::max(1.0, 0.25 * mh));

    WeightParams params_h{effective.weights.x_scale, effective.weights.y_scale,
                          effective.weights.color_scale, effective.weights.size_scale};
    // The vertical sweep runs on transposed geometry, so its x_scale is the
    // along-axis normalizer.
    WeightParams params_v{effective.weights_vertical.x_scale, effective.weights_vertical.y_scale,
                          effective.weights_vertical.color_scale,
                          effective.weights_vertical.size_scale};

    SweepConfig sweep_h{effective.sweep.k, effective.sweep.tau, Orientation::horizontal};
    SweepConfig sweep_v{effective.sweep.k_vertical, effective.sweep.tau, Orientation::vertical};

    std::vector<WordCluster> horizontal =
        sweep_extract(nodes, sweep_h, params_h, stats ? &stats->sweep_horizontal : nullptr);
    std::vector<WordCluster> vertical =
        sweep_extract(nodes, sweep_v, params_v, stats ? &stats->sweep_vertical : nullptr);
    std::vector<WordCluster> clusters = resolve_orientations(horizontal, vertical);

    // Partition invariant: every node in exactly one cluster, always checked.
    std::set<int> seen;
    size_t covered = 0;
    for (const auto& cluster : clusters)
        for (const auto& n : cluster.nodes) {
            seen.insert(n.id);
            ++covered;
        }
    if (seen.size() != nodes.size() || covered != nodes.size())
        throw DecodeError("word clusters do not partition the detected letters");

    CloudData cloud;
    cloud.config_hash = config_hash(effective);
    for (const auto& cluster : clusters) {
        DecodedWord word;
        word.text = chain_to_word(cluster);
        word.raw_size = estimate_size(cluster);
        word.font_size_estimate = calibrate_font_size(word.raw_size, atlas, cluster.orientation);
        word.bbox = cluster.bbox;
        word.orientation = cluster.orientation;
        cloud.words.push_back(std::move(word));
    }
    std::sort(cloud.words.begin(), cloud.words.end(), [](const DecodedWord& a, const DecodedWord& b) {
        if (a.font_size_estimate != b.font_size_estimate)
            return a.font_size_estimate > b.font_size_estimate;
        return std::tie(a.text, a.bbox.y, a.bbox.x) < std::tie(b.text, b.bbox.y, b.bbox.x);
    });

    if (stats) {
        stats->components = static_cast<int>(components.size());
        stats->nodes = static_cast<int>(nodes.size());
        stats->clusters = static_cast<int>(clusters.size());
        stats->partition_ok = true;
        stats->effective_config = effective;
        stats->node_list = nodes;
        stats->component_list = components;
    }
    return cloud;
}

nlohmann::json cloud_to_json(const CloudData& cloud) {
    nlohmann::json words = nlohmann::json::array();
    for (const auto& w : cloud.words) {
        words.push_back({{"text", w.text},
                         {"weight", w.font_size_estimate},
                         {"raw_size", w.raw_size},
                         {"bbox", {w.bbox.x, w.bbox.y, w.bbox.w, w.bbox.h}},
                         {"orientation", orientation_name(w.orientation)}});
    }
    nlohmann::json doc;
    doc["words"] = std::move(words);
    doc["meta"] = {{"image", cloud.image}, {"config_hash", cloud.config_hash}};
    return doc;
}

CloudData cloud_from_json(const nlohmann::json& doc) {
    CloudData cloud;
    try {
        if (doc.contains("meta")) {
            cloud.image = doc["meta"].value("image", "");
            cloud.config_hash = doc["meta"].value("config_hash", "");
        }
        for (const auto& w : doc.at("words")) {
            DecodedWord word;
            word.text = w.at("text").get<std::string>();
            word.font_size_estimate = w.at("weight").get<double>();
            word.raw_size = w.value("raw_size", 0.0);
            if (w.contains("bbox")) {
                auto b = w["bbox"];
                word.bbox = Box{b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(),
                                b.at(3).get<int>()};
            }
            word.orientation = w.value("orientation", "horizontal") == std::string("vertical")
                                   ? Orientation::vertical
                                   : Orientation::horizontal;
            cloud.words.push_back(std::move(word));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(std::string("bad cloud data JSON: ") + e.what());
    }
    return cloud;
}

std::string cloud_to_csv(const CloudData& cloud) {
    std::string out = "text,weight\n";
    char buf[64];
    for (const auto& w : cloud.words) {
        std::snprintf(buf, sizeof(buf), "%.6g", w.font_size_estimate);
        out += w.text;
        out += ',';
        out += buf;
        out += '\n';
    }
    return out;
}

}  // namespace cloudecode
