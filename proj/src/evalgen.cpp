#include "cloudecode/evalgen.hpp"

#include <algorithm>
#include <cmath>

#include "cloudecode/errors.hpp"
#include "cloudecode/prng.hpp"
#include "cloudecode/textdist.hpp"

namespace cloudecode {

LayoutConfig::LayoutConfig() {
    // Mutual RGB distance >= ~130 and strong contrast against the default
    // background: color is the decoder's main cue for separating words whose
    // boxes end up adjacent, so weak palette pairs turn into merged words.
    palette = {
        Color{20, 20, 20},     // near black
        Color{210, 40, 40},    // red
        Color{20, 150, 50},    // green
        Color{50, 60, 215},    // blue
        Color{220, 170, 20},   // amber
        Color{180, 30, 190},   // purple
        Color{0, 190, 190},    // cyan
    };
}

namespace {

constexpr int k_min_font_size = 8;
constexpr int k_max_font_size = 128;

int word_padding(int font_size) { return std::max(6, static_cast<int>(std::lround(0.3 * font_size))); }

// Deterministic rectangular spiral: ring by ring outward from the center,
// each ring walked top edge left-to-right, right edge downward, bottom edge
// right-to-left, left edge upward.
std::vector<std::pair<int, int>> ring_offsets(int ring, int step) {
    std::vector<std::pair<int, int>> offsets;
    if (ring == 0) {
        offsets.emplace_back(0, 0);
        return offsets;
    }
    int r = ring * step;
    for (int dx = -r; dx <= r; dx += step) offsets.emplace_back(dx, -r);
    for (int dy = -r + step; dy <= r; dy += step) offsets.emplace_back(r, dy);
    for (int dx = r - step; dx >= -r; dx -= step) offsets.emplace_back(dx, r);
    for (int dy = r - step; dy >= -r + step; dy -= step) offsets.emplace_back(-r, dy);
    return offsets;
}

struct Placement {
    Box bbox;
    int padding = 0;
    Color color;
};

// Same-color words keep extra distance: to the decoder, color is the main
// cue separating words whose boxes end up side by side.
constexpr int k_same_color_margin = 3;

bool collides(const Box& candidate, int padding, Color color, const std::vector<Placement>& placed) {
    for (const auto& p : placed) {
        int margin = std::max(padding, p.padding);
        if (p.color == color) margin *= k_same_color_margin;
        if (candidate.intersects(p.bbox, margin)) return true;
    }
    return false;
}

}  // namespace

std::pair<RasterImage, GroundTruth> synthesize_cloud(const std::vector<CloudEntry>& entries,
                                                     const LayoutConfig& layout,
                                                     std::uint64_t seed) {
    if (layout.width < 1 || layout.height < 1) throw ConfigError("layout canvas must be nonempty");
    if (layout.palette.empty()) throw ConfigError("layout palette must not be empty");
    for (const Color& c : layout.palette)
        if (euclidean_distance(c, layout.background) < 100.0)
            throw ConfigError("palette color too close to the background");
    for (const auto& e : entries) {
        if (e.text.empty()) throw ConfigError("cloud entry with empty text");
        if (e.font_size < k_min_font_size || e.font_size > k_max_font_size)
            throw ConfigError("font size out of range [8, 128] for word \"" + e.text + "\"");
    }

    BitmapFont font = resolve_font(layout.font);
    RasterImage image = RasterImage::filled(layout.width, layout.height, layout.background);
    GroundTruth gt;
    gt.background = layout.background;
    gt.entries.resize(entries.size());

    // Largest first; input order breaks ties.
    std::vector<size_t> order(entries.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return entries[a].font_size > entries[b].font_size; });

    SplitMix64 rng(seed);
    size_t color_start = static_cast<size_t>(rng.below(layout.palette.size()));

    std::vector<Placement> placed;
    int max_ring = (std::max(layout.width, layout.height) / std::max(1, layout.spiral_step)) + 1;

    for (size_t rank = 0; rank < order.size(); ++rank) {
        const CloudEntry& entry = entries[order[rank]];
        Orientation orientation =
            rng.unit() < layout.p_vertical ? Orientation::vertical : Orientation::horizontal;
        Color color = layout.palette[(color_start + rank) % layout.palette.size()];

        RenderedWord word = render_word(font, entry.text, entry.font_size, orientation);
        int w = word.mask.width(), h = word.mask.height();
        int padding = word_padding(entry.font_size);

        bool done = false;
        for (int ring = 0; ring <= max_ring && !done; ++ring) {
            for (const auto& [dx, dy] : ring_offsets(ring, std::max(1, layout.spiral_step))) {
                int x = layout.width / 2 + dx - w / 2;
                int y = layout.height / 2 + dy - h / 2;
                Box candidate{x, y, w, h};
                if (x < 1 || y < 1 || candidate.right() > layout.width - 1 ||
                    candidate.bottom() > layout.height - 1)
                    continue;
                if (collides(candidate, padding, color, placed)) continue;

                for (int my = 0; my < h; ++my)
                    for (int mx = 0; mx < w; ++mx)
                        if (word.mask.at(mx, my)) image.set(x + mx, y + my, color);

                GroundTruthEntry& out = gt.entries[order[rank]];
                out.text = entry.text;
                out.font_size = entry.font_size;
                out.bbox = candidate;
                out.orientation = orientation;
                out.color = color;
                for (const auto& letter : word.letters)
                    out.letters.push_back(
                        Box{letter.bbox.x + x, letter.bbox.y + y, letter.bbox.w, letter.bbox.h});
                placed.push_back(Placement{candidate, padding, color});
                done = true;
                break;
            }
        }
        if (!done)
            throw LayoutError("cannot place word \"" + entry.text + "\" inside " +
                              std::to_string(layout.width) + "x" + std::to_string(layout.height));
    }
    return {std::move(image), std::move(gt)};
}

std::vector<MatchedPair> match_words(const std::vector<DecodedWord>& predicted,
                                     const GroundTruth& gt) {
    struct Candidate {
        int distance;
        double size_gap;
        int pred;
        int gti;
    };
    std::vector<Candidate> candidates;
    for (int i = 0; i < static_cast<int>(predicted.size()); ++i) {
        for (int j = 0; j < static_cast<int>(gt.entries.size()); ++j) {
            if (normalized_levenshtein_ci(predicted[i].text, gt.entries[j].text) > 0.5) continue;
            candidates.push_back(Candidate{
                levenshtein_ci(predicted[i].text, gt.entries[j].text),
                std::abs(predicted[i].font_size_estimate - double(gt.entries[j].font_size)), i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.distance, a.size_gap, a.pred, a.gti) <
               std::tie(b.distance, b.size_gap, b.pred, b.gti);
    });

    std::vector<char> pred_used(predicted.size(), 0), gt_used(gt.entries.size(), 0);
    std::vector<MatchedPair> pairs;
    for (const auto& c : candidates) {
        if (pred_used[c.pred] || gt_used[c.gti]) continue;
        pred_used[c.pred] = 1;
        gt_used[c.gti] = 1;
        pairs.push_back(MatchedPair{c.pred, c.gti, c.distance,
                                    predicted[c.pred].font_size_estimate,
                                    double(gt.entries[c.gti].font_size)});
    }
    return pairs;
}

double rmse(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.empty()) throw ConfigError("rmse: empty pair list");
    double sum = 0.0;
    for (const auto& [estimated, truth] : pairs) {
        double d = estimated - truth;
        sum += d * d;
    }
    return std::sqrt(sum / double(pairs.size()));
}

EvalReport evaluate(const CloudData& decoded, const GroundTruth& gt) {
    EvalReport report;
    report.gt_count = static_cast<int>(gt.entries.size());
    report.predicted_count = static_cast<int>(decoded.words.size());
    report.pairs = match_words(decoded.words, gt);

    if (!report.pairs.empty()) {
        std::vector<std::pair<double, double>> size_pairs;
        for (const auto& p : report.pairs) size_pairs.emplace_back(p.estimated_size, p.gt_size);
        report.rmse = rmse(size_pairs);
    }

    std::vector<char> pred_used(decoded.words.size(), 0), gt_used(gt.entries.size(), 0);
    int exact = 0;
    for (const auto& p : report.pairs) {
        pred_used[p.predicted_index] = 1;
        gt_used[p.gt_index] = 1;
        report.pair_predicted_texts.push_back(decoded.words[p.predicted_index].text);
        report.pair_gt_texts.push_back(gt.entries[p.gt_index].text);
        if (p.edit_distance == 0) ++exact;
    }
    report.recovery_rate =
        gt.entries.empty() ? 1.0 : double(exact) / double(gt.entries.size());
    for (size_t j = 0; j < gt.entries.size(); ++j)
        if (!gt_used[j]) report.unmatched_gt.push_back(gt.entries[j].text);
    for (size_t i = 0; i < decoded.words.size(); ++i)
        if (!pred_used[i]) report.spurious_predictions.push_back(decoded.words[i].text);
    return report;
}

namespace {

nlohmann::json box_to_json(const Box& b) { return nlohmann::json{b.x, b.y, b.w, b.h}; }

Box box_from_json(const nlohmann::json& j) {
    return Box{j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}

nlohmann::json color_to_json(const Color& c) { return nlohmann::json{c.r, c.g, c.b}; }

Color color_from_json(const nlohmann::json& j) {
    return Color{j.at(0).get<std::uint8_t>(), j.at(1).get<std::uint8_t>(),
                 j.at(2).get<std::uint8_t>()};
}

}  // namespace

nlohmann::json ground_truth_to_json(const GroundTruth& gt) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : gt.entries) {
        nlohmann::json letters = nlohmann::json::array();
        for (const auto& b : e.letters) letters.push_back(box_to_json(b));
        entries.push_back({{"text", e.text},
                           {"font_size", e.font_size},
                           {"bbox", box_to_json(e.bbox)},
                           {"orientation", orientation_name(e.orientation)},
                           {"color", color_to_json(e.color)},
                           {"letters", std::move(letters)}});
    }
    return nlohmann::json{{"background", color_to_json(gt.background)},
                          {"entries", std::move(entries)}};
}

GroundTruth ground_truth_from_json(const nlohmann::json& doc) {
    GroundTruth gt;
    try {
        gt.background = color_from_json(doc.at("background"));
        for (const auto& e : doc.at("entries")) {
            GroundTruthEntry entry;
            entry.text = e.at("text").get<std::string>();
            entry.font_size = e.at("font_size").get<int>();
            entry.bbox = box_from_json(e.at("bbox"));
            entry.orientation = e.value("orientation", "horizontal") == std::string("vertical")
                                    ? Orientation::vertical
                                    : Orientation::horizontal;
            entry.color = color_from_json(e.at("color"));
            if (e.contains("letters"))
                for (const auto& b : e["letters"]) entry.letters.push_back(box_from_json(b));
            gt.entries.push_back(std::move(entry));
        }
    } catch (const nlohmann::json::exception& err) {
        throw DecodeError(std::string("bad ground truth JSON: ") + err.what());
    }
    return gt;
}

nlohmann::json eval_report_to_json(const EvalReport& report) {
    nlohmann::json pairs = nlohmann::json::array();
    for (size_t i = 0; i < report.pairs.size(); ++i) {
        const auto& p = report.pairs[i];
        pairs.push_back({{"predicted", report.pair_predicted_texts[i]},
                         {"ground_truth", report.pair_gt_texts[i]},
                         {"edit_distance", p.edit_distance},
                         {"s_e", p.estimated_size},
                         {"s_gt", p.gt_size},
                         {"error", p.estimated_size - p.gt_size}});
    }
    nlohmann::json doc;
    doc["rmse"] = report.rmse ? nlohmann::json(*report.rmse) : nlohmann::json(nullptr);
    doc["recovery_rate"] = report.recovery_rate;
    doc["pairs"] = std::move(pairs);
    doc["unmatched_gt"] = report.unmatched_gt;
    doc["spurious_predictions"] = report.spurious_predictions;
    doc["gt_count"] = report.gt_count;
    doc["predicted_count"] = report.predicted_count;
    return doc;
}

}  // namespace cloudecode
