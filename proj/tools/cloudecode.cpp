#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cloudecode/config.hpp"
#include "cloudecode/errors.hpp"
#include "cloudecode/evalgen.hpp"
#include "cloudecode/glyph.hpp"
#include "cloudecode/raster.hpp"
#include "cloudecode/sizing.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace cloudecode;

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DecodeError("bad JSON in " + path.string() + ": " + e.what());
    }
    return doc;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path.string());
    out << text;
}

// --config beats CLOUDECODE_CONFIG beats built-in defaults; explicit flags
// then override individual fields.
PipelineConfig load_pipeline_config(const std::string& config_flag) {
    std::string path = config_flag;
    if (path.empty()) {
        if (const char* env = std::getenv("CLOUDECODE_CONFIG")) path = env;
    }
    if (path.empty()) return PipelineConfig{};
    return config_from_json(read_json_file(path));
}

struct DecodeOverrides {
    std::optional<int> connectivity, color_tolerance, min_pixel_count, diacritic_max_gap, ref_size;
    std::optional<double> confidence_floor, tau, k, k_vertical;
    std::optional<double> x_scale, y_scale, color_scale, size_scale;
    std::optional<std::string> font, alphabet, format;

    void apply(PipelineConfig& config) const {
        if (connectivity) config.connectivity = *connectivity;
        if (color_tolerance) config.color_tolerance = *color_tolerance;
        if (min_pixel_count) config.min_pixel_count = *min_pixel_count;
        if (diacritic_max_gap) config.diacritic_max_gap = *diacritic_max_gap;
        if (ref_size) config.atlas.ref_size = *ref_size;
        if (confidence_floor) config.confidence_floor = *confidence_floor;
        if (tau) config.sweep.tau = *tau;
        if (k) config.sweep.k = *k;
        if (k_vertical) config.sweep.k_vertical = *k_vertical;
        if (x_scale) config.weights.x_scale = *x_scale;
        if (y_scale) config.weights.y_scale = *y_scale;
        if (color_scale) config.weights.color_scale = *color_scale;
        if (size_scale) config.weights.size_scale = *size_scale;
        if (font) config.atlas.font = *font;
        if (alphabet) config.atlas.alphabet = *alphabet;
        if (format) config.format = *format;
        config.validate();
    }
};

// Component map PNG for --debug: each letter region tinted by id.
void dump_component_map(const fs::path& path, const RasterImage& image,
                        const std::vector<ComponentRegion>& components) {
    RasterImage map = RasterImage::filled(image.width, image.height, Color{255, 255, 255});
    for (size_t i = 0; i < components.size(); ++i) {
        std::uint32_t h = static_cast<std::uint32_t>(i) * 2654435761u;
        Color tint{static_cast<std::uint8_t>(40 + (h & 0x7F)),
                   static_cast<std::uint8_t>(40 + ((h >> 8) & 0x7F)),
                   static_cast<std::uint8_t>(40 + ((h >> 16) & 0x7F))};
        const ComponentRegion& region = components[i];
        for (int y = 0; y < region.bbox.h; ++y)
            for (int x = 0; x < region.bbox.w; ++x)
                if (region.mask.at(x, y)) map.set(region.bbox.x + x, region.bbox.y + y, tint);
    }
    write_image(path, map);
}

std::string sweep_trace_jsonl(const std::vector<SweepStepTrace>& trace) {
    std::string out;
    for (const auto& step : trace) {
        json line = {{"step", step.step},
                     {"line", step.line},
                     {"visited", step.visited},
                     {"chains", step.chains}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::string render_cloud_output(const CloudData& cloud, const std::string& format) {
    if (format == "csv") return cloud_to_csv(cloud);
    return cloud_to_json(cloud).dump(2) + "\n";
}

int run_decode(const std::vector<std::string>& images, const std::string& config_flag,
               const DecodeOverrides& overrides, const std::string& out,
               const std::string& debug_dir, const std::string& dump_config_path, int jobs) {
    PipelineConfig config = load_pipeline_config(config_flag);
    overrides.apply(config);

    if (images.size() > 1 && !out.empty() && !fs::is_directory(out))
        throw ConfigError("--out must be a directory when decoding multiple images");
    if (!dump_config_path.empty() && images.size() != 1)
        throw ConfigError("--dump-config needs exactly one input image");

    struct Result {
        std::string rendered;
        fs::path out_path;  // empty: stdout
    };
    std::vector<Result> results(images.size());
    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < images.size(); i = next.fetch_add(1)) {
            try {
                RasterImage image = load_image(images[i]);
                DecodeStats stats;
                CloudData cloud = decode_cloud(image, config, &stats);
                cloud.image = images[i];
                results[i].rendered = render_cloud_output(cloud, config.format);
                if (!out.empty()) {
                    fs::path base(out);
                    std::string ext = config.format == "csv" ? ".csv" : ".json";
                    results[i].out_path =
                        images.size() > 1 || fs::is_directory(base)
                            ? base / (fs::path(images[i]).stem().string() + ext)
                            : base;
                }
                if (!debug_dir.empty()) {
                    fs::create_directories(debug_dir);
                    std::string stem = fs::path(images[i]).stem().string();
                    dump_component_map(fs::path(debug_dir) / (stem + "_components.png"), image,
                                       stats.component_list);
                    write_text_file(fs::path(debug_dir) / (stem + "_sweep_h.jsonl"),
                                    sweep_trace_jsonl(stats.sweep_horizontal));
                    write_text_file(fs::path(debug_dir) / (stem + "_sweep_v.jsonl"),
                                    sweep_trace_jsonl(stats.sweep_vertical));
                }
                if (!dump_config_path.empty())
                    write_text_file(dump_config_path,
                                    config_to_json(stats.effective_config).dump(2) + "\n");
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    int thread_count = std::max(1, std::min<int>(jobs, static_cast<int>(images.size())));
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (const auto& r : results) {
        if (r.out_path.empty())
            std::cout << r.rendered;
        else
            write_text_file(r.out_path, r.rendered);
    }
    return 0;
}

std::vector<CloudEntry> parse_entries_file(const fs::path& path) {
    json doc = read_json_file(path);
    const json& list = doc.is_object() && doc.contains("entries") ? doc["entries"] : doc;
    if (!list.is_array()) throw ConfigError("entries file must hold a JSON array");
    std::vector<CloudEntry> entries;
    try {
        for (const auto& e : list)
            entries.push_back(CloudEntry{e.at("text").get<std::string>(),
                                         e.at("font_size").get<int>()});
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad entries file: ") + e.what());
    }
    return entries;
}

// "word:32,cloud:18" style inline spec.
std::vector<CloudEntry> parse_inline_entries(const std::string& spec) {
    std::vector<CloudEntry> entries;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.rfind(':');
        if (colon == std::string::npos || colon == 0)
            throw ConfigError("bad inline entry \"" + item + "\" (want word:size)");
        entries.push_back(CloudEntry{item.substr(0, colon), std::atoi(item.c_str() + colon + 1)});
    }
    if (entries.empty()) throw ConfigError("no entries in inline spec");
    return entries;
}

int run_synth(const std::string& entries_path, const std::string& inline_spec,
              std::uint64_t seed, const std::string& out_prefix, int width, int height,
              double p_vertical, const std::string& font) {
    std::vector<CloudEntry> entries;
    if (!entries_path.empty())
        entries = parse_entries_file(entries_path);
    else if (!inline_spec.empty())
        entries = parse_inline_entries(inline_spec);
    else
        throw ConfigError("synth needs --entries or --inline");

    LayoutConfig layout;
    layout.width = width;
    layout.height = height;
    layout.p_vertical = p_vertical;
    layout.font = font;
    auto [image, gt] = synthesize_cloud(entries, layout, seed);

    write_image(out_prefix + ".png", image);
    write_text_file(out_prefix + ".json", ground_truth_to_json(gt).dump(2) + "\n");
    return 0;
}

int run_eval(const std::string& decoded_path, const std::string& truth_path,
             const std::string& out) {
    json decoded_doc = read_json_file(decoded_path);
    if (!decoded_doc.is_object() || !decoded_doc.contains("words"))
        throw ConfigError("decoded JSON must be a cloud-data object with \"words\"");
    json truth_doc = read_json_file(truth_path);
    if (!truth_doc.is_object() || !truth_doc.contains("entries"))
        throw ConfigError("ground truth JSON must hold \"entries\"");
    CloudData decoded = cloud_from_json(decoded_doc);
    GroundTruth gt = ground_truth_from_json(truth_doc);
    EvalReport report = evaluate(decoded, gt);
    std::string text = eval_report_to_json(report).dump(2) + "\n";
    if (out.empty())
        std::cout << text;
    else
        write_text_file(out, text);
    return 0;
}

std::string svg_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

// Static horizontal bar chart; bar length linear in weight.
int run_redesign(const std::string& decoded_path, const std::string& out) {
    CloudData decoded = cloud_from_json(read_json_file(decoded_path));
    std::vector<DecodedWord> words = decoded.words;
    std::sort(words.begin(), words.end(), [](const DecodedWord& a, const DecodedWord& b) {
        if (a.font_size_estimate != b.font_size_estimate)
            return a.font_size_estimate > b.font_size_estimate;
        return a.text < b.text;
    });

    const int bar_h = 18, gap = 6, label_w = 140, plot_w = 600, margin = 10;
    int height = margin * 2 + (words.empty() ? bar_h : int(words.size()) * (bar_h + gap) - gap);
    double max_weight = 0;
    for (const auto& w : words) max_weight = std::max(max_weight, w.font_size_estimate);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (label_w + plot_w + margin * 2)
        << "\" height=\"" << height << "\">\n";
    svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    char buf[64];
    for (size_t i = 0; i < words.size(); ++i) {
        int y = margin + int(i) * (bar_h + gap);
        double bar = max_weight > 0 ? words[i].font_size_estimate / max_weight * plot_w : 0.0;
        std::snprintf(buf, sizeof(buf), "%.6g", bar);
        svg << "  <text x=\"" << (label_w - 6) << "\" y=\"" << (y + bar_h - 5)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\">"
            << svg_escape(words[i].text) << "</text>\n";
        svg << "  <rect x=\"" << label_w << "\" y=\"" << y << "\" width=\"" << buf
            << "\" height=\"" << bar_h << "\" fill=\"#4878a8\"/>\n";
        std::snprintf(buf, sizeof(buf), "%.4g", words[i].font_size_estimate);
        svg << "  <text x=\"" << (label_w + 4) << "\" y=\"" << (y + bar_h - 5)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"white\">" << buf
            << "</text>\n";
    }
    svg << "</svg>\n";
    write_text_file(out, svg.str());
    return 0;
}

void print_error(const Error& e) {
    json err = {{"error", {{"category", e.category_name()}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cloudecode: decode word-cloud images back into (word, weight) data"};
    app.require_subcommand(1);

    // decode
    auto* decode = app.add_subcommand("decode", "decode word-cloud PNG(s) into cloud data");
    std::vector<std::string> images;
    std::string config_flag, out_flag, debug_dir, dump_config_path;
    int jobs = 1;
    DecodeOverrides ov;
    decode->add_option("images", images, "input PNG file(s)")->required()->expected(-1);
    decode->add_option("--config", config_flag, "pipeline config JSON (or $CLOUDECODE_CONFIG)");
    decode->add_option("--out", out_flag, "output file (or directory for multiple inputs)");
    decode->add_option("--debug", debug_dir, "directory for per-stage debug artifacts");
    decode->add_option("--dump-config", dump_config_path, "write the fully resolved config");
    decode->add_option("--jobs", jobs, "parallel decodes for multiple inputs");
    decode->add_option("--format", ov.format, "json|csv");
    decode->add_option("--connectivity", ov.connectivity, "4 or 8");
    decode->add_option("--color-tolerance", ov.color_tolerance, "per-channel units, 0-255");
    decode->add_option("--min-pixel-count", ov.min_pixel_count, "noise floor in pixels");
    decode->add_option("--diacritic-max-gap", ov.diacritic_max_gap, "pixels, -1 = auto");
    decode->add_option("--confidence-floor", ov.confidence_floor, "below = unknown letter");
    decode->add_option("--font", ov.font, "atlas font (builtin:default or JSON font path)");
    decode->add_option("--alphabet", ov.alphabet, "atlas alphabet");
    decode->add_option("--ref-size", ov.ref_size, "template box size in pixels");
    decode->add_option("--tau", ov.tau, "sweep threshold");
    decode->add_option("--k", ov.k, "sweep step, -1 = auto");
    decode->add_option("--k-vertical", ov.k_vertical, "vertical sweep step, -1 = auto");
    decode->add_option("--x-scale", ov.x_scale, "weight normalizer, -1 = auto");
    decode->add_option("--y-scale", ov.y_scale, "weight normalizer, -1 = auto");
    decode->add_option("--color-scale", ov.color_scale, "weight normalizer");
    decode->add_option("--size-scale", ov.size_scale, "weight normalizer, -1 = auto");

    // synth
    auto* synth = app.add_subcommand("synth", "synthesize a cloud with ground truth");
    std::string entries_path, inline_spec, out_prefix, synth_font = "builtin:default";
    std::uint64_t seed = 1;
    int width = 960, height = 960;
    double p_vertical = 0.15;
    synth->add_option("--entries", entries_path, "JSON entries file [{text, font_size}, ...]");
    synth->add_option("--inline", inline_spec, "inline entries, e.g. \"data:48,cloud:24\"");
    synth->add_option("--seed", seed, "layout seed");
    synth->add_option("--out", out_prefix, "output prefix (<prefix>.png + <prefix>.json)")
        ->required();
    synth->add_option("--width", width, "canvas width");
    synth->add_option("--height", height, "canvas height");
    synth->add_option("--p-vertical", p_vertical, "probability of a vertical word");
    synth->add_option("--font", synth_font, "render font");

    // eval
    auto* eval = app.add_subcommand("eval", "score decoded output against ground truth");
    std::string decoded_path, truth_path, eval_out;
    eval->add_option("--decoded", decoded_path, "decoded cloud JSON")->required();
    eval->add_option("--truth", truth_path, "ground truth JSON")->required();
    eval->add_option("--out", eval_out, "write report here instead of stdout");

    // redesign
    auto* redesign = app.add_subcommand("redesign", "bar-chart SVG from decoded output");
    std::string redesign_in, redesign_out;
    redesign->add_option("--decoded", redesign_in, "decoded cloud JSON")->required();
    redesign->add_option("--out", redesign_out, "output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (decode->parsed())
            return run_decode(images, config_flag, ov, out_flag, debug_dir, dump_config_path, jobs);
        if (synth->parsed())
            return run_synth(entries_path, inline_spec, seed, out_prefix, width, height,
                             p_vertical, synth_font);
        if (eval->parsed()) return run_eval(decoded_path, truth_path, eval_out);
        if (redesign->parsed()) return run_redesign(redesign_in, redesign_out);
    } catch (const Error& e) {
        print_error(e);
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        json err = {{"error", {{"category", "processing"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 3;
    }
    return 0;
}
