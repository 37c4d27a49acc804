#include <catch2/catch_amalgamated.hpp>

#include "aic/synth_city.hpp"
#include "aic/tessellation.hpp"
#include "test_util.hpp"

using namespace aic;

namespace {

StreetGraph path_graph(std::vector<double> times) {
    StreetGraph g;
    for (u32 i = 0; i <= times.size(); ++i)
        g.add_node(i, Point{double(i) * 100.0, 0.0}, NodeKind::residential);
    for (u32 i = 0; i < times.size(); ++i) g.add_edge(i, i + 1, 100.0, times[i]);
    return g;
}

SeedSelection seeds_at(std::vector<u32> nodes) {
    SeedSelection s;
    for (u32 i = 0; i < nodes.size(); ++i) s.seeds.emplace_back(i, nodes[i]);
    return s;
}

StreetGraph random_graph(RngStream& rng, u32 n, double extra_edge_prob) {
    StreetGraph g;
    for (u32 i = 0; i < n; ++i)
        g.add_node(i, Point{rng.uniform(0, 1000), rng.uniform(0, 1000)}, NodeKind::residential);
    // random spanning tree keeps it connected
    for (u32 i = 1; i < n; ++i) {
        u32 j = u32(rng.below(i));
        g.add_edge(i, j, 100.0, rng.uniform(1.0, 50.0));
    }
    u32 extra = u32(extra_edge_prob * n);
    for (u32 k = 0; k < extra; ++k) {
        u32 a = u32(rng.below(n)), b = u32(rng.below(n));
        if (a != b) g.add_edge(a, b, 100.0, rng.uniform(1.0, 50.0));
    }
    return g;
}

// independent oracle: one full Dijkstra per seed, argmin with index tiebreak
std::vector<u32> voronoi_oracle(const StreetGraph& g, const SeedSelection& seeds) {
    std::vector<u32> own(g.size(), kNone32);
    std::vector<double> best(g.size(), std::numeric_limits<double>::infinity());
    for (u32 s = 0; s < seeds.seeds.size(); ++s) {
        auto d = g.shortest_times_from(seeds.seeds[s].second);
        for (u32 n = 0; n < g.size(); ++n) {
            if (d[n] < best[n]) {
                best[n] = d[n];
                own[n] = s;
            }
        }
    }
    return own;
}

}  // namespace

TEST_CASE("voronoi tie goes to the lower seed index") {
    StreetGraph g = path_graph({1.0, 1.0});
    Tessellation t = build_network_voronoi(g, seeds_at({0, 2}));
    REQUIRE(t.ownership[0] == 0);
    REQUIRE(t.ownership[2] == 1);
    REQUIRE(t.ownership[1] == 0);  // tied at 1.0, lower index wins
}

TEST_CASE("single seed owns everything") {
    StreetGraph g = path_graph({1, 2, 3, 4});
    Tessellation t = build_network_voronoi(g, seeds_at({3}));
    REQUIRE(t.n_cells() == 1);
    for (u32 n = 0; n < g.size(); ++n) REQUIRE(t.ownership[n] == 0);
}

TEST_CASE("empty seed set rejected") {
    StreetGraph g = path_graph({1});
    REQUIRE_THROWS_AS(build_network_voronoi(g, SeedSelection{}), ValidationError);
}

TEST_CASE("voronoi matches the per-seed oracle on random graphs") {
    RngStream rng(2024, salts::global, 77);
    for (int rep = 0; rep < 10; ++rep) {
        u32 n = 50 + u32(rng.below(200));
        StreetGraph g = random_graph(rng, n, 1.5);
        u32 k = 2 + u32(rng.below(8));
        std::set<u32> nodes;
        while (nodes.size() < k) nodes.insert(u32(rng.below(n)));
        SeedSelection seeds = seeds_at(std::vector<u32>(nodes.begin(), nodes.end()));
        Tessellation t = build_network_voronoi(g, seeds);
        auto oracle = voronoi_oracle(g, seeds);
        for (u32 node = 0; node < n; ++node) REQUIRE(t.ownership[node] == oracle[node]);
    }
}

TEST_CASE("voronoi is identical for any worker count") {
    RngStream rng(7, salts::global, 3);
    StreetGraph g = random_graph(rng, 300, 2.0);
    SeedSelection seeds = seeds_at({5, 50, 120, 200, 250, 299});
    Tessellation t1 = build_network_voronoi(g, seeds, 1);
    for (unsigned w : {2u, 4u, 8u, 13u}) {
        Tessellation tw = build_network_voronoi(g, seeds, w);
        REQUIRE(tw.ownership == t1.ownership);
    }
}

TEST_CASE("each seed owns at least its own node") {
    RngStream rng(8, salts::global, 4);
    StreetGraph g = random_graph(rng, 100, 1.0);
    SeedSelection seeds = seeds_at({1, 2, 3, 4, 5});
    Tessellation t = build_network_voronoi(g, seeds);
    for (u32 s = 0; s < 5; ++s) REQUIRE(t.ownership[seeds.seeds[s].second] == s);
}

TEST_CASE("kmeans K=1 and K=N") {
    StreetGraph g = path_graph({1, 1, 1, 1, 1});
    auto r1 = build_kmeans(g, 1, 42);
    REQUIRE(r1.tess.n_cells() == 1);
    REQUIRE(r1.tess.cells[0].member_nodes.size() == g.size());

    auto rn = build_kmeans(g, g.size(), 42);
    REQUIRE(rn.tess.n_cells() == g.size());
    REQUIRE(rn.wcss == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("kmeans recovers two well-separated clouds") {
    StreetGraph g;
    RngStream rng(5, salts::global, 9);
    for (u32 i = 0; i < 6; ++i)
        g.add_node(i, Point{rng.uniform(0, 10), rng.uniform(0, 10)}, NodeKind::residential);
    for (u32 i = 6; i < 12; ++i)
        g.add_node(i, Point{1000 + rng.uniform(0, 10), rng.uniform(0, 10)}, NodeKind::residential);
    for (u32 i = 0; i + 1 < 12; ++i) g.add_edge(i, i + 1, 1, 1);

    auto r = build_kmeans(g, 2, 1, 4);
    u32 c0 = r.tess.ownership[0];
    for (u32 i = 0; i < 6; ++i) REQUIRE(r.tess.ownership[i] == c0);
    for (u32 i = 6; i < 12; ++i) REQUIRE(r.tess.ownership[i] != c0);

    // exhaustive bipartition oracle over the 12 nodes
    double best = std::numeric_limits<double>::infinity();
    for (u32 mask = 1; mask < (1u << 12) - 1; ++mask) {
        Point m0{0, 0}, m1{0, 0};
        int n0 = 0, n1 = 0;
        for (u32 i = 0; i < 12; ++i) {
            Point p = g.nodes[i].position;
            if (mask & (1u << i)) {
                m0.x += p.x;
                m0.y += p.y;
                ++n0;
            } else {
                m1.x += p.x;
                m1.y += p.y;
                ++n1;
            }
        }
        m0 = {m0.x / n0, m0.y / n0};
        m1 = {m1.x / n1, m1.y / n1};
        double j = 0;
        for (u32 i = 0; i < 12; ++i)
            j += dist2(g.nodes[i].position, (mask & (1u << i)) ? m0 : m1);
        best = std::min(best, j);
    }
    REQUIRE(r.wcss == Catch::Approx(best).epsilon(1e-9));
}

TEST_CASE("kmeans wcss is monotone within a run and best-of-restarts wins") {
    RngStream rng(10, salts::global, 11);
    StreetGraph g = random_graph(rng, 200, 0.5);
    auto r = build_kmeans(g, 8, 123, 6);
    for (std::size_t i = 1; i < r.wcss_history.size(); ++i)
        REQUIRE(r.wcss_history[i] <= r.wcss_history[i - 1] + 1e-9);
    for (int restarts = 1; restarts <= 3; ++restarts) {
        auto single = build_kmeans(g, 8, 123, restarts);
        REQUIRE(r.wcss <= single.wcss + 1e-9);
    }
}

TEST_CASE("kmeans K out of range") {
    StreetGraph g = path_graph({1, 1});
    REQUIRE_THROWS_AS(build_kmeans(g, 0, 1), ConfigError);
    REQUIRE_THROWS_AS(build_kmeans(g, 4, 1), ConfigError);
}

namespace {

City small_city(u32 grid = 8, i64 pop = 1000) {
    SynthCityParams p;
    p.grid_size = grid;
    p.population = pop;
    p.seed = 3;
    return generate_synthetic_city(p);
}

Tessellation cbg_tess_with_schedules(const City& city) {
    Tessellation t = build_cbg_tessellation(city);
    for (const auto& e : city.patterns.entries) t.cells[e.cbg].schedule.add(e.poi, e.weekly_count);
    return t;
}

double total_mass(const Tessellation& t) {
    double s = 0;
    for (const Cell& c : t.cells) s += c.schedule.total();
    return s;
}

}  // namespace

TEST_CASE("rmcbg identity at current count") {
    City city = small_city();
    Tessellation cbg = cbg_tess_with_schedules(city);
    Tessellation same = merge_random_cbgs(cbg, city.graph, cbg.n_cells(), 5);
    REQUIRE(same.n_cells() == cbg.n_cells());
    REQUIRE(same.ownership == cbg.ownership);
}

TEST_CASE("two adjacent cells merge into schedule sum") {
    City city = small_city();
    Tessellation cbg = cbg_tess_with_schedules(city);
    Tessellation merged = merge_random_cbgs(cbg, city.graph, 1, 5);
    REQUIRE(merged.n_cells() == 1);
    REQUIRE(merged.cells[0].schedule.total() == Catch::Approx(total_mass(cbg)).epsilon(1e-12));
    double frac_total = 0;
    for (const auto& [cbg_idx, f] : merged.cells[0].source_cbg_fractions) frac_total += f;
    REQUIRE(frac_total == Catch::Approx(double(cbg.n_cells())).epsilon(1e-12));
}

TEST_CASE("rmcbg reaches an arbitrary target with mass conserved") {
    SynthCityParams p;
    p.grid_size = 20;
    p.population = 93000;  // produces 62 cbg blocks
    p.seed = 9;
    City city = generate_synthetic_city(p);
    Tessellation cbg = cbg_tess_with_schedules(city);
    if (cbg.n_cells() >= 62) {
        Tessellation merged = merge_random_cbgs(cbg, city.graph, 52, 17);
        REQUIRE(merged.n_cells() == 52);
        REQUIRE(total_mass(merged) == Catch::Approx(total_mass(cbg)).epsilon(1e-9));
        merged.check_total();
    } else {
        Tessellation merged = merge_random_cbgs(cbg, city.graph, cbg.n_cells() - 10, 17);
        REQUIRE(merged.n_cells() == cbg.n_cells() - 10);
        REQUIRE(total_mass(merged) == Catch::Approx(total_mass(cbg)).epsilon(1e-9));
    }
}

TEST_CASE("overlay of identical tessellations is the identity") {
    City city = small_city();
    Tessellation cbg = cbg_tess_with_schedules(city);
    Tessellation out = overlay_cbg_vd(cbg, cbg, city.graph);
    REQUIRE(out.n_cells() == cbg.n_cells());
    for (u32 c = 0; c < out.n_cells(); ++c) {
        REQUIRE(out.cells[c].member_nodes == cbg.cells[c].member_nodes);
        REQUIRE(out.cells[c].schedule.total() ==
                Catch::Approx(cbg.cells[c].schedule.total()).epsilon(1e-12));
    }
}

TEST_CASE("overlay cell count bounds and conservation") {
    City city = small_city(10, 3000);
    Tessellation cbg = cbg_tess_with_schedules(city);
    SeedSelection seeds = select_vd_seeds_by_category(
        city.pois, {PoiCategory::grocery_retail, PoiCategory::education, PoiCategory::religious});
    Tessellation vd = build_network_voronoi(city.graph, seeds);
    Tessellation out = overlay_cbg_vd(cbg, vd, city.graph);
    REQUIRE(out.n_cells() >= std::max(cbg.n_cells(), vd.n_cells()));
    REQUIRE(total_mass(out) == Catch::Approx(total_mass(cbg)).epsilon(1e-9));
    // fractions across the whole tessellation sum to 1 per source CBG
    std::vector<double> per_cbg(cbg.n_cells(), 0.0);
    for (const Cell& c : out.cells)
        for (const auto& [cbg_idx, f] : c.source_cbg_fractions) per_cbg[cbg_idx] += f;
    for (double f : per_cbg) REQUIRE(f == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("overlay rejects mismatched node universes") {
    City a = small_city(8);
    City b = small_city(10);
    Tessellation ta = build_cbg_tessellation(a);
    Tessellation tb = build_cbg_tessellation(b);
    REQUIRE_THROWS_AS(overlay_cbg_vd(ta, tb, a.graph), ValidationError);
}

TEST_CASE("single-cell rasterization is uniform") {
    StreetGraph g = path_graph({1, 1, 1});
    Tessellation t = build_network_voronoi(g, seeds_at({0}));
    PixelMap pm = rasterize(t, g, 25.0);
    for (i32 v : pm.grid) REQUIRE(v == 0);
}

TEST_CASE("two stamped ends split at the midpoint with ties to lower id") {
    // two isolated seed pixels on a strip; growth must meet in the middle
    StreetGraph g;
    g.add_node(0, Point{0, 0}, NodeKind::residential);
    g.add_node(1, Point{1000, 0}, NodeKind::residential);
    g.add_edge(0, 1, 1000, 100);
    Tessellation t;
    t.kind = TessKind::VD_r;
    t.cells.resize(2);
    t.cells[0].id = 0;
    t.cells[1].id = 1;
    t.ownership = {0, 1};
    t.rebuild_members();
    PixelMap pm = rasterize(t, g, 100.0);  // 11 pixels wide strip
    REQUIRE(pm.width == 11);
    // edge stamping claims the halves; the seam column goes to the smaller id
    u32 boundary = 0;
    for (u32 x = 0; x + 1 < pm.width; ++x)
        if (pm.at(x, 0) == 0 && pm.at(x + 1, 0) == 1) boundary = x;
    REQUIRE(boundary >= 4);
    REQUIRE(boundary <= 6);
    for (u32 x = 0; x < pm.width; ++x) REQUIRE(pm.at(x, 0) == (x <= boundary ? 0 : 1));
}

TEST_CASE("pixel area fractions partition to one") {
    City city = small_city();
    Tessellation cbg = build_cbg_tessellation(city);
    PixelMap pm = rasterize(cbg, city.graph, 25.0);
    std::vector<u64> count(cbg.n_cells(), 0);
    for (i32 v : pm.grid) {
        REQUIRE(v >= 0);
        ++count[u32(v)];
    }
    double sum = 0;
    for (u64 c : count) sum += double(c) / double(pm.grid.size());
    REQUIRE(sum == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("split schedule follows the area fractions") {
    Schedule parent;
    parent.add(0, 100.0);
    parent.add(1, 50.0);
    auto kids = split_schedule(parent, {0.1, 0.9});
    REQUIRE(kids[0].entries[0] == Catch::Approx(10.0));
    REQUIRE(kids[0].entries[1] == Catch::Approx(5.0));
    REQUIRE(kids[1].entries[0] == Catch::Approx(90.0));
    REQUIRE(kids[1].entries[1] == Catch::Approx(45.0));
}

TEST_CASE("split with fraction one is the identity") {
    Schedule parent;
    parent.add(3, 42.0);
    auto kids = split_schedule(parent, {1.0});
    REQUIRE(kids.size() == 1);
    REQUIRE(kids[0].entries == parent.entries);
}

TEST_CASE("demographic split uses largest remainder with index tiebreak") {
    Demographics d{};
    d[int(AgeBucket::adult)] = 7;
    auto kids = split_demographics(d, {0.5, 0.5});
    REQUIRE(kids[0][1] == 4);
    REQUIRE(kids[1][1] == 3);
}

TEST_CASE("fraction sum violations are rejected") {
    Schedule parent;
    parent.add(0, 1.0);
    REQUIRE_THROWS_AS(split_schedule(parent, {0.5, 0.4}), ValidationError);
}

TEST_CASE("merge inverts split exactly") {
    Schedule parent;
    parent.add(0, 100.0);
    parent.add(1, 50.0);
    parent.add(7, 0.125);
    auto kids = split_schedule(parent, {0.1, 0.9});
    Schedule roundtrip = merge_schedules(kids);
    for (const auto& [poi, f] : parent.entries)
        REQUIRE(roundtrip.entries[poi] == f);  // exact, not approximate
}

TEST_CASE("merge of disjoint schedules is a union; empty merge is empty") {
    Schedule a, b;
    a.add(0, 1.0);
    b.add(5, 2.0);
    Schedule u = merge_schedules({a, b});
    REQUIRE(u.entries.size() == 2);
    REQUIRE(merge_schedules({}).entries.empty());
}

TEST_CASE("seed selection by category and by frequency") {
    City city = small_city();
    SeedSelection by_cat = select_vd_seeds_by_category(
        city.pois, {PoiCategory::grocery_retail, PoiCategory::education, PoiCategory::religious});
    u32 expected = 0;
    std::set<u32> nodes;
    for (const Poi& p : city.pois)
        if (is_local_category(p.category) && nodes.insert(p.node).second) ++expected;
    REQUIRE(by_cat.seeds.size() == expected);

    std::vector<Poi> pois(4);
    for (int i = 0; i < 4; ++i) {
        pois[i].id = "poi_000" + std::to_string(i + 1);
        pois[i].node = u32(i);
        double daily[] = {10, 30, 20, 5};
        pois[i].hourly_visits[12] = daily[i] / 7.0;
    }
    SeedSelection top = select_vd_seeds_by_frequency(pois, 3);
    REQUIRE(top.seeds.size() == 3);
    REQUIRE(top.seeds[0].first == 1);
    REQUIRE(top.seeds[1].first == 2);
    REQUIRE(top.seeds[2].first == 0);
    REQUIRE_THROWS_AS(select_vd_seeds_by_frequency(pois, 9), ConfigError);
}

TEST_CASE("cell_of_location round-trips every node") {
    City city = small_city();
    SeedSelection seeds = select_vd_seeds_by_category(
        city.pois, {PoiCategory::grocery_retail, PoiCategory::education});
    Tessellation vd = build_network_voronoi(city.graph, seeds);
    PixelMap pm = rasterize(vd, city.graph, 10.0);
    for (u32 n = 0; n < city.graph.size(); ++n)
        REQUIRE(pm.cell_of_location(city.graph.nodes[n].position) == vd.ownership[n]);
    REQUIRE_THROWS_AS(pm.cell_of_location(Point{-1e6, -1e6}), ValidationError);
}

TEST_CASE("source fractions from pixel overlap sum to one per cbg") {
    City city = small_city(10, 3000);
    Tessellation cbg = build_cbg_tessellation(city);
    SeedSelection seeds = select_vd_seeds_by_category(city.pois, {PoiCategory::grocery_retail});
    Tessellation vd = build_network_voronoi(city.graph, seeds);
    attach_source_cbg_fractions(vd, cbg, city.graph, 20.0);
    std::vector<double> per_cbg(cbg.n_cells(), 0.0);
    i64 demo_total = 0;
    for (const Cell& c : vd.cells) {
        for (const auto& [idx, f] : c.source_cbg_fractions) {
            REQUIRE(f >= 0.0);
            REQUIRE(f <= 1.0 + 1e-12);
            per_cbg[idx] += f;
        }
        for (i64 v : c.demographic_share) demo_total += v;
    }
    for (double f : per_cbg) REQUIRE(f == Catch::Approx(1.0).epsilon(1e-9));
    i64 pop_total = 0;
    for (const auto& c : city.cbgs) pop_total += c.population;
    REQUIRE(demo_total == pop_total);
}
