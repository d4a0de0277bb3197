#include <doctest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cloudecode/errors.hpp"
#include "cloudecode/prng.hpp"
#include "cloudecode/wordgraph.hpp"
#include "oracles.hpp"

using namespace cloudecode;

namespace {

GlyphNode make_node(int id, char letter, double x, double y, int w, int h,
                    Color color = Color{0, 0, 0}) {
    GlyphNode n;
    n.id = id;
    n.letter = letter;
    n.confidence = 1.0;
    n.x = x;
    n.y = y;
    n.width = w;
    n.height = h;
    n.area = static_cast<std::int64_t>(w) * h;
    n.color = color;
    n.bbox = Box{static_cast<int>(x - w / 2.0), static_cast<int>(y - h / 2.0), w, h};
    return n;
}

GlyphNode random_node(SplitMix64& rng, int id) {
    return make_node(id, 'a', rng.range(0, 400), rng.range(0, 400), rng.range(1, 40),
                     rng.range(1, 40),
                     Color{static_cast<std::uint8_t>(rng.range(0, 255)),
                           static_cast<std::uint8_t>(rng.range(0, 255)),
                           static_cast<std::uint8_t>(rng.range(0, 255))});
}

// A row of letters with fixed pitch and equal boxes, one word.
std::vector<GlyphNode> letter_row(int count, double pitch, double y = 50, int w = 10, int h = 14,
                                  Color color = Color{0, 0, 0}, int first_id = 0) {
    std::vector<GlyphNode> nodes;
    for (int i = 0; i < count; ++i)
        nodes.push_back(make_node(first_id + i, static_cast<char>('a' + i % 26), 20 + i * pitch, y,
                                  w, h, color));
    return nodes;
}

std::set<std::set<int>> cluster_id_sets(const std::vector<WordCluster>& clusters) {
    std::set<std::set<int>> out;
    for (const auto& c : clusters) {
        std::set<int> ids;
        for (const auto& n : c.nodes) ids.insert(n.id);
        out.insert(std::move(ids));
    }
    return out;
}

ComponentRegion solid_region(Box bbox, Color color) {
    ComponentRegion r;
    r.bbox = bbox;
    r.mask = BitGrid(bbox.w, bbox.h);
    for (int y = 0; y < bbox.h; ++y)
        for (int x = 0; x < bbox.w; ++x) r.mask.set(x, y);
    r.pixel_count = bbox.area();
    r.color_sum[0] = static_cast<std::uint64_t>(color.r) * r.pixel_count;
    r.color_sum[1] = static_cast<std::uint64_t>(color.g) * r.pixel_count;
    r.color_sum[2] = static_cast<std::uint64_t>(color.b) * r.pixel_count;
    return r;
}

}  // namespace

TEST_CASE("build_nodes basics") {
    CHECK(build_nodes({}, {}).empty());
    CHECK_THROWS_AS(build_nodes({solid_region(Box{0, 0, 2, 2}, Color{})}, {}), ConfigError);

    auto nodes = build_nodes({solid_region(Box{5, 7, 10, 20}, Color{0, 0, 0})},
                             {Classification{'a', 0.9}});
    REQUIRE(nodes.size() == 1);
    CHECK(nodes[0].id == 0);
    CHECK(nodes[0].x == 10.0);
    CHECK(nodes[0].y == 17.0);
    CHECK(nodes[0].width == 10);
    CHECK(nodes[0].height == 20);
    CHECK(nodes[0].area == 200);
    CHECK(nodes[0].letter == 'a');

    // Below the confidence floor the letter is unknown but the node stays.
    auto low = build_nodes({solid_region(Box{5, 7, 10, 20}, Color{0, 0, 0})},
                           {Classification{'a', 0.2}}, 0.35);
    REQUIRE(low.size() == 1);
    CHECK_FALSE(low[0].letter.has_value());
    CHECK(low[0].confidence == 0.2);
}

TEST_CASE("build_nodes assigns dense ids in scan order") {
    std::vector<ComponentRegion> comps = {
        solid_region(Box{50, 30, 5, 5}, Color{}),
        solid_region(Box{10, 10, 5, 5}, Color{}),
        solid_region(Box{30, 10, 5, 5}, Color{}),
    };
    std::vector<Classification> cls = {{'c', 1}, {'a', 1}, {'b', 1}};
    auto nodes = build_nodes(comps, cls);
    REQUIRE(nodes.size() == 3);
    CHECK(nodes[0].letter == 'a');  // (10,10)
    CHECK(nodes[1].letter == 'b');  // (30,10)
    CHECK(nodes[2].letter == 'c');  // (50,30)
    for (int i = 0; i < 3; ++i) CHECK(nodes[i].id == i);
}

TEST_CASE("edge_weight matches the five-term formula") {
    WeightParams p{10, 5, 60, 20};
    GlyphNode a = make_node(0, 'a', 100, 50, 12, 20);
    CHECK(edge_weight(a, a, p) == 0.0);

    GlyphNode b = a;
    b.x += p.x_scale;  // one normalizer of x distance, nothing else
    CHECK(edge_weight(a, b, p) == doctest::Approx(1.0).epsilon(1e-12));

    SplitMix64 rng(777);
    for (int trial = 0; trial < 1000; ++trial) {
        GlyphNode u = random_node(rng, 0), v = random_node(rng, 1);
        WeightParams q{double(rng.range(1, 50)), double(rng.range(1, 50)),
                       double(rng.range(1, 100)), double(rng.range(1, 50))};
        double got = edge_weight(u, v, q);
        CHECK(got == doctest::Approx(oracle::edge_weight_recomputed(u, v, q)).epsilon(1e-12));
        CHECK(edge_weight(v, u, q) == got);  // symmetric, exactly
    }
}

TEST_CASE("match_bipartite small cases") {
    auto w01 = [](int, int) { return 5.0; };
    auto single = match_bipartite({0}, {1}, w01);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == std::pair<int, int>{0, 1});

    // [[1,2],[2,1]] picks the diagonal, total 2.
    std::map<std::pair<int, int>, double> w{{{0, 10}, 1}, {{0, 11}, 2}, {{1, 10}, 2}, {{1, 11}, 1}};
    auto pairs = match_bipartite({0, 1}, {10, 11}, [&](int l, int r) { return w.at({l, r}); });
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == std::pair<int, int>{0, 10});
    CHECK(pairs[1] == std::pair<int, int>{1, 11});

    CHECK(match_bipartite({}, {1, 2}, w01).empty());
    CHECK(match_bipartite({1, 2}, {}, w01).empty());
}

TEST_CASE("match_bipartite equals exhaustive minimum") {
    SplitMix64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        int n = rng.range(1, 6), m = rng.range(1, 6);
        std::vector<int> left(n), right(m);
        for (int i = 0; i < n; ++i) left[i] = i;
        for (int j = 0; j < m; ++j) right[j] = 100 + j;
        std::vector<std::vector<double>> w(n, std::vector<double>(m));
        for (auto& row : w)
            for (auto& cell : row) cell = rng.range(0, 1000) / 10.0;

        auto pairs = match_bipartite(left, right, [&](int l, int r) { return w[l][r - 100]; });
        REQUIRE(pairs.size() == static_cast<size_t>(std::min(n, m)));
        double total = 0;
        std::set<int> used_l, used_r;
        for (auto [l, r] : pairs) {
            total += w[l][r - 100];
            used_l.insert(l);
            used_r.insert(r);
        }
        CHECK(used_l.size() == pairs.size());  // each side at most once
        CHECK(used_r.size() == pairs.size());
        CHECK(total == doctest::Approx(oracle::exhaustive_min_matching(w)).epsilon(1e-9));
    }
}

TEST_CASE("match_bipartite keeps cheap pairs next to huge blocked weights") {
    // One viable pair among sentinel-weight entries: the viable pair must be
    // chosen even though the totals are dominated by the sentinel magnitude.
    for (double blocked : {1e7, 1e12}) {
        std::map<std::pair<int, int>, double> w;
        for (int l : {0, 1})
            for (int r : {10, 11, 12}) w[{l, r}] = blocked;
        w[{0, 10}] = 1.59;
        auto pairs = match_bipartite({0, 1}, {10, 11, 12},
                                     [&](int l, int r) { return w.at({l, r}); });
        REQUIRE(pairs.size() == 2);
        CHECK(pairs[0] == std::pair<int, int>{0, 10});
    }
}

TEST_CASE("match_bipartite ties resolve to the lexicographically smallest set") {
    auto flat = [](int, int) { return 1.0; };
    auto pairs = match_bipartite({3, 1, 2}, {20, 10, 30}, flat);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0] == std::pair<int, int>{1, 10});
    CHECK(pairs[1] == std::pair<int, int>{2, 20});
    CHECK(pairs[2] == std::pair<int, int>{3, 30});
}

TEST_CASE("sweep_extract trivial inputs") {
    WeightParams p{10, 10, 60, 10};
    SweepConfig cfg{2.0, 3.0, Orientation::horizontal};
    CHECK(sweep_extract({}, cfg, p).empty());

    auto one = sweep_extract({make_node(0, 'z', 50, 50, 8, 10)}, cfg, p);
    REQUIRE(one.size() == 1);
    REQUIRE(one[0].nodes.size() == 1);
    CHECK(chain_to_word(one[0]) == "z");
}

TEST_CASE("sweep_extract groups two words apart") {
    // "alpha" and "beta" on different rows in different colors.
    auto alpha = letter_row(5, 14, 40, 10, 14, Color{200, 0, 0}, 0);
    auto beta = letter_row(4, 14, 90, 10, 14, Color{0, 0, 200}, 5);
    std::vector<GlyphNode> nodes = alpha;
    nodes.insert(nodes.end(), beta.begin(), beta.end());

    WeightParams p{20, 10, 60, 20};
    SweepConfig cfg{2.5, 3.0, Orientation::horizontal};
    auto clusters = sweep_extract(nodes, cfg, p);
    auto sets = cluster_id_sets(clusters);
    CHECK(sets == std::set<std::set<int>>{{0, 1, 2, 3, 4}, {5, 6, 7, 8}});
}

TEST_CASE("sweep_extract partitions the node set") {
    SplitMix64 rng(31337);
    WeightParams p{15, 10, 60, 15};
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<GlyphNode> nodes;
        int n = rng.range(0, 25);
        for (int i = 0; i < n; ++i) nodes.push_back(random_node(rng, i));
        for (Orientation o : {Orientation::horizontal, Orientation::vertical}) {
            auto clusters = sweep_extract(nodes, SweepConfig{3.0, 3.0, o}, p);
            std::set<int> seen;
            size_t covered = 0;
            for (const auto& c : clusters) {
                REQUIRE_FALSE(c.nodes.empty());
                for (const auto& node : c.nodes) {
                    seen.insert(node.id);
                    ++covered;
                }
            }
            CHECK(seen.size() == nodes.size());
            CHECK(covered == nodes.size());
        }
    }
}

TEST_CASE("cluster node order is strict in the reading direction") {
    auto nodes = letter_row(6, 13);
    auto h = sweep_extract(nodes, SweepConfig{2.0, 3.0, Orientation::horizontal},
                           WeightParams{20, 10, 60, 20});
    for (const auto& c : h)
        for (size_t i = 1; i < c.nodes.size(); ++i) CHECK(c.nodes[i].x > c.nodes[i - 1].x);

    // Vertical stack, bottom to top.
    std::vector<GlyphNode> stack;
    for (int i = 0; i < 5; ++i)
        stack.push_back(make_node(i, static_cast<char>('a' + i), 50, 200 - i * 18, 10, 12));
    auto v = sweep_extract(stack, SweepConfig{2.0, 3.0, Orientation::vertical},
                           WeightParams{20, 10, 60, 20});
    REQUIRE(v.size() == 1);
    for (size_t i = 1; i < v[0].nodes.size(); ++i) CHECK(v[0].nodes[i].y < v[0].nodes[i - 1].y);
    CHECK(chain_to_word(v[0]) == "abcde");
}

TEST_CASE("tau zero yields singletons and cluster count shrinks with tau") {
    auto nodes = letter_row(8, 12);
    WeightParams p{20, 10, 60, 20};

    auto singles = sweep_extract(nodes, SweepConfig{2.0, 0.0, Orientation::horizontal}, p);
    CHECK(singles.size() == nodes.size());

    size_t prev = 1000;
    for (double tau : {0.0, 0.3, 0.6, 1.0, 2.0, 4.0, 1e9}) {
        auto clusters = sweep_extract(nodes, SweepConfig{2.0, tau, Orientation::horizontal}, p);
        CHECK(clusters.size() <= prev);
        prev = clusters.size();
    }
    CHECK(prev == 1);  // with tau unbounded the row is one chain
}

TEST_CASE("grouping is translation invariant") {
    SplitMix64 rng(2718);
    std::vector<GlyphNode> nodes;
    for (int i = 0; i < 15; ++i) nodes.push_back(random_node(rng, i));
    WeightParams p{15, 10, 60, 15};
    SweepConfig cfg{3.0, 3.0, Orientation::horizontal};
    auto base = cluster_id_sets(sweep_extract(nodes, cfg, p));

    std::vector<GlyphNode> shifted = nodes;
    for (auto& n : shifted) {
        n.x += 137;
        n.y += 58;
        n.bbox.x += 137;
        n.bbox.y += 58;
    }
    CHECK(cluster_id_sets(sweep_extract(shifted, cfg, p)) == base);
}

TEST_CASE("sweep_extract is deterministic") {
    SplitMix64 rng(99);
    std::vector<GlyphNode> nodes;
    for (int i = 0; i < 20; ++i) nodes.push_back(random_node(rng, i));
    WeightParams p{15, 10, 60, 15};
    SweepConfig cfg{2.0, 3.0, Orientation::horizontal};
    auto a = sweep_extract(nodes, cfg, p);
    auto b = sweep_extract(nodes, cfg, p);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].nodes.size() == b[i].nodes.size());
        for (size_t j = 0; j < a[i].nodes.size(); ++j) CHECK(a[i].nodes[j].id == b[i].nodes[j].id);
    }
}

TEST_CASE("resolve_orientations") {
    auto row = letter_row(5, 14);
    WeightParams p{20, 10, 60, 20};
    auto h = sweep_extract(row, SweepConfig{2.0, 3.0, Orientation::horizontal}, p);
    REQUIRE(h.size() == 1);

    SUBCASE("empty vertical list passes horizontal through") {
        auto resolved = resolve_orientations(h, {});
        CHECK(cluster_id_sets(resolved) == cluster_id_sets(h));
    }

    SUBCASE("longer chain wins over singletons") {
        auto v = sweep_extract(row, SweepConfig{2.0, 0.0, Orientation::vertical}, p);
        REQUIRE(v.size() == 5);
        auto resolved = resolve_orientations(h, v);
        REQUIRE(resolved.size() == 1);
        CHECK(resolved[0].nodes.size() == 5);
        CHECK(resolved[0].orientation == Orientation::horizontal);
    }

    SUBCASE("disjoint horizontal and vertical words both survive") {
        std::vector<GlyphNode> stack;
        for (int i = 0; i < 4; ++i)
            stack.push_back(make_node(100 + i, static_cast<char>('w' - i), 300, 200 - i * 18, 10, 12));
        auto v = sweep_extract(stack, SweepConfig{2.0, 3.0, Orientation::vertical}, p);
        REQUIRE(v.size() == 1);
        auto resolved = resolve_orientations(h, v);
        REQUIRE(resolved.size() == 2);
        size_t total = 0;
        for (const auto& c : resolved) total += c.nodes.size();
        CHECK(total == 9);
    }

    SUBCASE("every node appears exactly once after resolution") {
        auto v = sweep_extract(row, SweepConfig{2.0, 1e9, Orientation::vertical}, p);
        auto resolved = resolve_orientations(h, v);
        std::set<int> seen;
        size_t covered = 0;
        for (const auto& c : resolved)
            for (const auto& n : c.nodes) {
                seen.insert(n.id);
                ++covered;
            }
        CHECK(seen.size() == 5);
        CHECK(covered == 5);
    }
}

TEST_CASE("chain_to_word reading order") {
    WordCluster cluster;
    cluster.orientation = Orientation::horizontal;
    cluster.nodes = {make_node(0, 'c', 10, 50, 8, 10), make_node(1, 'a', 20, 50, 8, 10),
                     make_node(2, 't', 30, 50, 8, 10)};
    CHECK(chain_to_word(cluster) == "cat");

    WordCluster single;
    single.nodes = {make_node(0, 'z', 5, 5, 4, 4)};
    CHECK(chain_to_word(single) == "z");

    WordCluster with_unknown = cluster;
    with_unknown.nodes[1].letter.reset();
    CHECK(chain_to_word(with_unknown) == "c?t");

    CHECK_THROWS_AS(chain_to_word(WordCluster{}), ConfigError);
}
