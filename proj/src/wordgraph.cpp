#include "cloudecode/wordgraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "cloudecode/errors.hpp"

namespace cloudecode {

std::vector<GlyphNode> build_nodes(const std::vector<ComponentRegion>& components,
                                   const std::vector<Classification>& classifications,
                                   double confidence_floor) {
    if (components.size() != classifications.size())
        throw ConfigError("build_nodes: components and classifications differ in length");

    // Dense ids in (min_y, min_x) order of the components.
    std::vector<size_t> order(components.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const Box& ba = components[a].bbox;
        const Box& bb = components[b].bbox;
        return std::tie(ba.y, ba.x, ba.h, ba.w) < std::tie(bb.y, bb.x, bb.h, bb.w);
    });

    std::vector<GlyphNode> nodes;
    nodes.reserve(components.size());
    for (size_t rank = 0; rank < order.size(); ++rank) {
        const ComponentRegion& region = components[order[rank]];
        const Classification& cls = classifications[order[rank]];
        GlyphNode node;
        node.id = static_cast<int>(rank);
        node.confidence = cls.confidence;
        if (cls.confidence >= confidence_floor) node.letter = cls.letter;
        node.bbox = region.bbox;
        node.x = region.bbox.cx();
        node.y = region.bbox.cy();
        node.width = region.bbox.w;
        node.height = region.bbox.h;
        node.area = region.bbox.area();
        node.color = region.mean_color();
        nodes.push_back(node);
    }
    return nodes;
}

double edge_weight(const GlyphNode& a, const GlyphNode& b, const WeightParams& p) {
    return std::abs(a.x - b.x) / p.x_scale + std::abs(a.y - b.y) / p.y_scale +
           euclidean_distance(a.color, b.color) / p.color_scale +
           std::abs(a.height - b.height) / p.size_scale +
           std::abs(a.width - b.width) / p.size_scale;
}

namespace {

constexpr double k_infinite = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path assignment with potentials; assigns every row
// (rows <= cols required). Returns the matched column per row.
std::vector<int> assign_rows(const std::vector<std::vector<double>>& cost) {
    int n = static_cast<int>(cost.size());
    int m = n == 0 ? 0 : static_cast<int>(cost[0].size());
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, k_infinite);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = k_infinite;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

// Minimum total over matchings of size min(rows, cols).
double min_matching_total(const std::vector<std::vector<double>>& w) {
    size_t rows = w.size();
    size_t cols = rows == 0 ? 0 : w[0].size();
    if (rows == 0 || cols == 0) return 0.0;
    double total = 0.0;
    if (rows <= cols) {
        auto match = assign_rows(w);
        for (size_t i = 0; i < rows; ++i) total += w[i][match[i]];
    } else {
        std::vector<std::vector<double>> t(cols, std::vector<double>(rows));
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) t[j][i] = w[i][j];
        auto match = assign_rows(t);
        for (size_t j = 0; j < cols; ++j) total += t[j][match[j]];
    }
    return total;
}

}  // namespace

std::vector<std::pair<int, int>> match_bipartite(const std::vector<int>& left,
                                                 const std::vector<int>& right,
                                                 const std::function<double(int, int)>& weight) {
    if (left.empty() || right.empty()) return {};

    // Work on id-sorted sides so "lexicographically smallest" is meaningful.
    std::vector<int> ls = left, rs = right;
    std::sort(ls.begin(), ls.end());
    std::sort(rs.begin(), rs.end());

    std::vector<std::vector<double>> w(ls.size(), std::vector<double>(rs.size()));
    for (size_t i = 0; i < ls.size(); ++i)
        for (size_t j = 0; j < rs.size(); ++j) w[i][j] = weight(ls[i], rs[j]);

    const double optimum = min_matching_total(w);
    // Optimality slack scales with the total's magnitude: the comparison
    // below reassembles the optimum through a different summation order, so
    // a purely absolute epsilon would drown once weights get large.
    const double slack = 1e-9 + 1e-12 * std::abs(optimum);
    const size_t target_size = std::min(ls.size(), rs.size());

    // Fix pairs greedily, smallest left id first, smallest right id first,
    // keeping only choices that preserve the optimal total. Each candidate is
    // checked by re-solving the residual assignment problem; the instances
    // here are small (sweep steps see a handful of nodes).
    std::vector<char> left_used(ls.size(), 0), right_used(rs.size(), 0);
    std::vector<std::pair<int, int>> result;
    double fixed_cost = 0.0;

    auto residual_total = [&](size_t skip_left, size_t take_right) {
        std::vector<std::vector<double>> sub;
        for (size_t i = 0; i < ls.size(); ++i) {
            if (left_used[i] || i == skip_left) continue;
            std::vector<double> row;
            for (size_t j = 0; j < rs.size(); ++j) {
                if (right_used[j] || j == take_right) continue;
                row.push_back(w[i][j]);
            }
            sub.push_back(std::move(row));
        }
        if (!sub.empty() && sub[0].empty()) sub.clear();
        return min_matching_total(sub);
    };

    for (size_t i = 0; i < ls.size() && result.size() < target_size; ++i) {
        // When |left| > |right| a left node may find no pair that preserves
        // the optimum; it then stays unmatched and the loop moves on.
        for (size_t j = 0; j < rs.size(); ++j) {
            if (right_used[j]) continue;
            double total = fixed_cost + w[i][j] + residual_total(i, j);
            if (total <= optimum + slack) {
                left_used[i] = 1;
                right_used[j] = 1;
                fixed_cost += w[i][j];
                result.emplace_back(ls[i], rs[j]);
                break;
            }
        }
    }
    return result;
}

namespace {

// Transposed view used by the vertical pass: along = -y (so bottom-to-top
// sweeps become left-to-right), cross = x, and width/height swap.
struct SweepView {
    double along = 0.0;
    double cross = 0.0;
    int along_extent = 0;
    int cross_extent = 0;
};

SweepView view_of(const GlyphNode& n, Orientation o) {
    if (o == Orientation::horizontal) return SweepView{n.x, n.y, n.width, n.height};
    return SweepView{-n.y, n.x, n.height, n.width};
}

}  // namespace

std::vector<WordCluster> sweep_extract(const std::vector<GlyphNode>& nodes,
                                       const SweepConfig& config, const WeightParams& params,
                                       std::vector<SweepStepTrace>* trace) {
    std::vector<WordCluster> clusters;
    if (nodes.empty()) return clusters;
    if (config.k < 1.0) throw ConfigError("sweep step k must be >= 1 pixel");
    if (config.tau < 0.0) throw ConfigError("sweep threshold tau must be >= 0");

    std::vector<SweepView> views(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) views[i] = view_of(nodes[i], config.orientation);

    // The vertical pass is the horizontal machinery on transposed geometry,
    // so weights are also taken on transposed nodes: params.x_scale always
    // normalizes the sweep axis.
    std::vector<GlyphNode> weight_nodes(nodes);
    if (config.orientation == Orientation::vertical) {
        for (auto& n : weight_nodes) {
            std::swap(n.x, n.y);
            std::swap(n.width, n.height);
        }
    }

    auto visit_order_less = [&](size_t a, size_t b) {
        return std::tie(views[a].along, views[a].cross, nodes[a].id) <
               std::tie(views[b].along, views[b].cross, nodes[b].id);
    };
    std::vector<size_t> order(nodes.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), visit_order_less);

    std::vector<std::vector<size_t>> chains;  // node indices, head = back()
    std::map<int, size_t> head_to_chain;      // head node id -> chain index

    // Gated-out pairs get a large finite weight rather than infinity: the
    // assignment solver needs finite arithmetic, and anything this heavy is
    // rejected by the tau test anyway. The neighborhood gate is relative to
    // the pair's own glyph size, so big and small words coexist in one image.
    constexpr double k_blocked = 1e7;
    auto gated_weight = [&](size_t node_idx, size_t head_idx) {
        const SweepView& nv = views[node_idx];
        const SweepView& hv = views[head_idx];
        if (!(nv.along > hv.along)) return k_blocked;  // reading order is strict
        double along_limit = 3.0 * std::max({1, nv.along_extent, hv.along_extent});
        double cross_limit = 1.5 * std::max({1, nv.cross_extent, hv.cross_extent});
        if (nv.along - hv.along > along_limit) return k_blocked;
        if (std::abs(nv.cross - hv.cross) > cross_limit) return k_blocked;
        return edge_weight(weight_nodes[node_idx], weight_nodes[head_idx], params);
    };

    size_t cursor = 0;
    double line = views[order[0]].along;
    int step = 0;
    while (cursor < order.size()) {
        std::vector<size_t> pool;
        while (cursor < order.size() && views[order[cursor]].along <= line) {
            pool.push_back(order[cursor]);
            ++cursor;
        }
        if (!pool.empty()) {
            std::vector<int> visited_ids;
            for (size_t idx : pool) visited_ids.push_back(nodes[idx].id);

            std::map<int, size_t> id_to_index;
            for (size_t idx : pool) id_to_index[nodes[idx].id] = idx;

            while (!pool.empty()) {
                std::vector<int> pool_ids, head_ids;
                for (size_t idx : pool) pool_ids.push_back(nodes[idx].id);
                // Only heads reachable from this batch take part; distant
                // chains would just pad the matching with blocked pairs.
                for (const auto& [hid, ci] : head_to_chain) {
                    size_t head_idx = chains[ci].back();
                    for (size_t idx : pool) {
                        if (gated_weight(idx, head_idx) < k_blocked) {
                            head_ids.push_back(hid);
                            break;
                        }
                    }
                }

                std::vector<std::pair<int, int>> accepted;
                if (!head_ids.empty()) {
                    std::map<int, size_t> head_index;
                    for (const auto& [hid, ci] : head_to_chain) head_index[hid] = chains[ci].back();
                    auto pairs = match_bipartite(pool_ids, head_ids, [&](int l, int r) {
                        return gated_weight(id_to_index.at(l), head_index.at(r));
                    });
                    for (const auto& [l, r] : pairs) {
                        double wv = gated_weight(id_to_index.at(l), head_index.at(r));
                        if (wv <= config.tau) accepted.emplace_back(l, r);
                    }
                }

                if (accepted.empty()) {
                    // Nothing extends: open a chain with the sweep-first node
                    // and retry, so a batch of same-word letters still chains.
                    size_t opener = pool.front();
                    chains.push_back({opener});
                    head_to_chain[nodes[opener].id] = chains.size() - 1;
                    pool.erase(pool.begin());
                    continue;
                }
                for (const auto& [l, r] : accepted) {
                    size_t chain_idx = head_to_chain.at(r);
                    size_t node_idx = id_to_index.at(l);
                    head_to_chain.erase(r);
                    chains[chain_idx].push_back(node_idx);
                    head_to_chain[nodes[node_idx].id] = chain_idx;
                    pool.erase(std::find(pool.begin(), pool.end(), node_idx));
                }
            }

            if (trace) {
                SweepStepTrace t;
                t.step = step;
                t.line = config.orientation == Orientation::horizontal ? line : -line;
                t.visited = visited_ids;
                for (const auto& chain : chains) {
                    std::vector<int> ids;
                    for (size_t idx : chain) ids.push_back(nodes[idx].id);
                    t.chains.push_back(std::move(ids));
                }
                trace->push_back(std::move(t));
            }
        }
        line += config.k;
        ++step;
    }

    // All chains close when the sweep ends.
    std::sort(chains.begin(), chains.end(),
              [&](const auto& a, const auto& b) { return nodes[a.front()].id < nodes[b.front()].id; });
    for (const auto& chain : chains) {
        WordCluster cluster;
        cluster.orientation = config.orientation;
        for (size_t idx : chain) {
            cluster.nodes.push_back(nodes[idx]);
            cluster.bbox = Box::union_of(cluster.bbox, nodes[idx].bbox);
        }
        clusters.push_back(std::move(cluster));
    }
    return clusters;
}

std::vector<WordCluster> resolve_orientations(const std::vector<WordCluster>& horizontal,
                                              const std::vector<WordCluster>& vertical) {
    struct Candidate {
        const WordCluster* cluster;
        size_t length;
        int orientation_rank;  // horizontal first
        int min_id;
    };
    std::vector<Candidate> candidates;
    std::map<int, const GlyphNode*> all_nodes;
    for (const auto* list : {&horizontal, &vertical}) {
        for (const auto& cluster : *list) {
            int min_id = std::numeric_limits<int>::max();
            for (const auto& n : cluster.nodes) {
                min_id = std::min(min_id, n.id);
                all_nodes.emplace(n.id, &n);
            }
            candidates.push_back(Candidate{&cluster, cluster.nodes.size(),
                                           cluster.orientation == Orientation::horizontal ? 0 : 1,
                                           min_id});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.length != b.length) return a.length > b.length;
        if (a.orientation_rank != b.orientation_rank) return a.orientation_rank < b.orientation_rank;
        return a.min_id < b.min_id;
    });

    std::set<int> used;
    std::vector<WordCluster> kept;
    for (const auto& c : candidates) {
        bool clash = false;
        for (const auto& n : c.cluster->nodes)
            if (used.count(n.id)) {
                clash = true;
                break;
            }
        if (clash) continue;
        for (const auto& n : c.cluster->nodes) used.insert(n.id);
        kept.push_back(*c.cluster);
    }

    // Leftovers from skipped clusters become single-letter words.
    for (const auto& [id, node] : all_nodes) {
        if (used.count(id)) continue;
        WordCluster single;
        single.orientation = Orientation::horizontal;
        single.nodes.push_back(*node);
        single.bbox = node->bbox;
        kept.push_back(std::move(single));
    }
    return kept;
}

std::string chain_to_word(const WordCluster& cluster) {
    if (cluster.nodes.empty()) throw ConfigError("chain_to_word: empty cluster");
    std::string text;
    text.reserve(cluster.nodes.size());
    for (const auto& n : cluster.nodes) text.push_back(n.letter.value_or('?'));
    return text;
}

}  // namespace cloudecode
