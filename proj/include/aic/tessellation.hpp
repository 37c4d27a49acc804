#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "aic/geodata.hpp"
#include "aic/parallel.hpp"
#include "aic/rng.hpp"
#include "aic/schedule.hpp"

namespace aic {

enum class TessKind : u8 {
    NT = 0,
    CBG,
    VD_r,
    VD_s,
    VD_i,
    KMEANS_r,
    KMEANS_s,
    KMEANS_i,
    RMCBG,
    CBGVD,
};

inline const char* tess_kind_name(TessKind k) {
    switch (k) {
        case TessKind::NT: return "NT";
        case TessKind::CBG: return "CBG";
        case TessKind::VD_r: return "VD_r";
        case TessKind::VD_s: return "VD_s";
        case TessKind::VD_i: return "VD_i";
        case TessKind::KMEANS_r: return "KMEANS_r";
        case TessKind::KMEANS_s: return "KMEANS_s";
        case TessKind::KMEANS_i: return "KMEANS_i";
        case TessKind::RMCBG: return "RMCBG";
        case TessKind::CBGVD: return "CBGVD";
    }
    return "?";
}

inline TessKind tess_kind_from_name(std::string_view s) {
    for (int i = 0; i <= int(TessKind::CBGVD); ++i)
        if (s == tess_kind_name(TessKind(i))) return TessKind(i);
    throw ConfigError("unknown tessellation kind: " + std::string(s));
}

struct Cell {
    u32 id = 0;
    std::vector<u32> member_nodes;  // sorted dense node indices
    Schedule schedule;
    Demographics demographic_share{};
    std::map<u32, double> source_cbg_fractions;  // cbg index -> share of that CBG's area
};

struct Tessellation {
    TessKind kind = TessKind::CBG;
    std::vector<Cell> cells;
    std::vector<u32> ownership;  // node index -> cell id

    u32 n_cells() const { return u32(cells.size()); }

    void rebuild_members() {
        for (Cell& c : cells) c.member_nodes.clear();
        for (u32 n = 0; n < ownership.size(); ++n) cells[ownership[n]].member_nodes.push_back(n);
        for (Cell& c : cells) std::sort(c.member_nodes.begin(), c.member_nodes.end());
    }

    void check_total() const {
        for (u32 n = 0; n < ownership.size(); ++n)
            if (ownership[n] >= cells.size())
                throw ValidationError("node " + std::to_string(n) + " owned by no cell");
        for (const Cell& c : cells)
            if (c.member_nodes.empty())
                throw ValidationError("cell " + std::to_string(c.id) + " has no member nodes");
    }
};

struct SeedSelection {
    enum class Mode : u8 { by_category, by_visit_frequency };
    Mode mode = Mode::by_category;
    std::vector<std::pair<u32, u32>> seeds;  // (poi index, node index), distinct nodes
};

// ---------------------------------------------------------------------------
// Seed selection

inline SeedSelection select_vd_seeds_by_category(const std::vector<Poi>& pois,
                                                 const std::vector<PoiCategory>& categories) {
    SeedSelection sel;
    sel.mode = SeedSelection::Mode::by_category;
    std::set<u32> taken_nodes;
    for (u32 i = 0; i < pois.size(); ++i) {
        bool match = false;
        for (PoiCategory c : categories) match |= pois[i].category == c;
        if (!match) continue;
        if (taken_nodes.insert(pois[i].node).second) sel.seeds.emplace_back(i, pois[i].node);
    }
    if (sel.seeds.empty()) throw ConfigError("no POIs in the requested seed categories");
    return sel;
}

inline SeedSelection select_vd_seeds_by_frequency(const std::vector<Poi>& pois, u32 count) {
    if (count == 0 || count > pois.size())
        throw ConfigError("requested " + std::to_string(count) + " seeds from " +
                          std::to_string(pois.size()) + " POIs");
    std::vector<u32> order(pois.size());
    for (u32 i = 0; i < pois.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](u32 a, u32 b) {
        double ta = pois[a].weekly_visit_total(), tb = pois[b].weekly_visit_total();
        if (ta != tb) return ta > tb;
        return pois[a].id < pois[b].id;
    });
    SeedSelection sel;
    sel.mode = SeedSelection::Mode::by_visit_frequency;
    std::set<u32> taken_nodes;
    for (u32 i = 0; i < count; ++i) {
        u32 p = order[i];
        if (taken_nodes.insert(pois[p].node).second) sel.seeds.emplace_back(p, pois[p].node);
    }
    return sel;
}

// ---------------------------------------------------------------------------
// Network Voronoi

// Multi-source shortest-path claim over the street graph. Each node is won by
// the seed with minimum commuting time, ties to the smaller seed index. The
// per-node claim is a commutative lexicographic min, so seed subsets can be
// expanded concurrently and merged in any order without changing the result.
inline Tessellation build_network_voronoi(const StreetGraph& graph, const SeedSelection& seeds,
                                          unsigned workers = 1) {
    if (seeds.seeds.empty()) throw ValidationError("voronoi needs a non-empty seed set");
    const u32 n = graph.size();
    const u32 s = u32(seeds.seeds.size());
    graph.adjacency();  // materialize before workers share it
    constexpr double inf = std::numeric_limits<double>::infinity();

    struct Claim {
        double time = std::numeric_limits<double>::infinity();
        u32 seed = kNone32;
        bool better_than(const Claim& o) const {
            if (time != o.time) return time < o.time;
            return seed < o.seed;
        }
    };

    auto expand_subset = [&](u32 first_seed, u32 last_seed, std::vector<Claim>& best) {
        using Item = std::pair<std::pair<double, u32>, u32>;  // ((time, seed), node)
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        for (u32 i = first_seed; i < last_seed; ++i) {
            u32 node = seeds.seeds[i].second;
            Claim c{0.0, i};
            if (c.better_than(best[node])) {
                best[node] = c;
                heap.push({{0.0, i}, node});
            }
        }
        const auto& adj = graph.adjacency();
        while (!heap.empty()) {
            auto [key, node] = heap.top();
            heap.pop();
            Claim cur{key.first, key.second};
            if (best[node].time != cur.time || best[node].seed != cur.seed) continue;
            for (const auto& nb : adj[node]) {
                Claim cand{cur.time + nb.travel_time, cur.seed};
                if (cand.better_than(best[nb.node])) {
                    best[nb.node] = cand;
                    heap.push({{cand.time, cand.seed}, nb.node});
                }
            }
        }
    };

    std::vector<Claim> best(n);
    if (workers <= 1 || s == 1) {
        expand_subset(0, s, best);
    } else {
        unsigned w = std::min<unsigned>(workers, s);
        std::vector<std::vector<Claim>> local(w, std::vector<Claim>(n));
        ThreadPool pool(w);
        u32 chunk = (s + w - 1) / w;
        pool.for_each_index(w, [&](std::size_t t) {
            u32 b = u32(t) * chunk;
            u32 e = std::min(s, b + chunk);
            if (b < e) expand_subset(b, e, local[t]);
        });
        for (const auto& table : local)
            for (u32 node = 0; node < n; ++node)
                if (table[node].better_than(best[node])) best[node] = table[node];
    }

    Tessellation t;
    t.kind = TessKind::VD_r;
    t.cells.resize(s);
    for (u32 i = 0; i < s; ++i) t.cells[i].id = i;
    t.ownership.resize(n);
    for (u32 node = 0; node < n; ++node) {
        if (best[node].seed == kNone32)
            throw ValidationError("voronoi: node unreachable from every seed");
        t.ownership[node] = best[node].seed;
    }
    t.rebuild_members();
    t.check_total();
    return t;
}

// ---------------------------------------------------------------------------
// Euclidean K-means over node positions

struct KmeansResult {
    Tessellation tess;
    double wcss = 0.0;
    std::vector<double> wcss_history;  // per accepted iteration of the best run
};

inline KmeansResult build_kmeans(const StreetGraph& graph, u32 k, u64 seed, int restarts = 4) {
    const u32 n = graph.size();
    std::set<std::pair<double, double>> distinct;
    for (const StreetNode& nd : graph.nodes) distinct.insert({nd.position.x, nd.position.y});
    if (k < 1 || k > distinct.size())
        throw ConfigError("k-means: K=" + std::to_string(k) + " outside [1, " +
                          std::to_string(distinct.size()) + "]");

    auto run_once = [&](u64 restart_idx, std::vector<u32>& assign_out,
                        std::vector<double>& history) -> double {
        RngStream rng(seed, salts::tessellation, restart_idx);
        std::vector<Point> centroids;
        centroids.reserve(k);
        // k-means++ seeding
        std::vector<double> d2(n, std::numeric_limits<double>::infinity());
        u32 first = u32(rng.below(n));
        centroids.push_back(graph.nodes[first].position);
        for (u32 c = 1; c < k; ++c) {
            double total = 0.0;
            for (u32 i = 0; i < n; ++i) {
                d2[i] = std::min(d2[i], dist2(graph.nodes[i].position, centroids.back()));
                total += d2[i];
            }
            u32 pick = 0;
            if (total > 0.0) {
                double x = rng.uniform01() * total, acc = 0.0;
                for (u32 i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (x < acc || i == n - 1) {
                        pick = i;
                        break;
                    }
                }
                // never re-pick a zero-distance point while others remain
                if (d2[pick] == 0.0) {
                    for (u32 i = 0; i < n; ++i)
                        if (d2[i] > 0.0) {
                            pick = i;
                            break;
                        }
                }
            } else {
                pick = u32(rng.below(n));
            }
            centroids.push_back(graph.nodes[pick].position);
        }

        std::vector<u32> assign(n, 0);
        double wcss = std::numeric_limits<double>::infinity();
        history.clear();
        for (int iter = 0; iter < 200; ++iter) {
            bool changed = false;
            for (u32 i = 0; i < n; ++i) {
                u32 bestc = 0;
                double bestd = dist2(graph.nodes[i].position, centroids[0]);
                for (u32 c = 1; c < k; ++c) {
                    double d = dist2(graph.nodes[i].position, centroids[c]);
                    if (d < bestd) {
                        bestd = d;
                        bestc = c;
                    }
                }
                if (assign[i] != bestc) {
                    assign[i] = bestc;
                    changed = true;
                }
            }
            // repair empty clusters with the farthest point of the largest one
            std::vector<u32> count(k, 0);
            for (u32 i = 0; i < n; ++i) ++count[assign[i]];
            for (u32 c = 0; c < k; ++c) {
                if (count[c] > 0) continue;
                u32 largest = u32(std::max_element(count.begin(), count.end()) - count.begin());
                u32 far_node = kNone32;
                double far_d = -1.0;
                for (u32 i = 0; i < n; ++i) {
                    if (assign[i] != largest) continue;
                    double d = dist2(graph.nodes[i].position, centroids[largest]);
                    if (d > far_d) {
                        far_d = d;
                        far_node = i;
                    }
                }
                assign[far_node] = c;
                centroids[c] = graph.nodes[far_node].position;
                --count[largest];
                ++count[c];
                changed = true;
            }
            // update means
            std::vector<Point> sums(k, Point{0, 0});
            for (u32 i = 0; i < n; ++i) {
                sums[assign[i]].x += graph.nodes[i].position.x;
                sums[assign[i]].y += graph.nodes[i].position.y;
            }
            for (u32 c = 0; c < k; ++c)
                centroids[c] = {sums[c].x / double(count[c]), sums[c].y / double(count[c])};
            double j = 0.0;
            for (u32 i = 0; i < n; ++i) j += dist2(graph.nodes[i].position, centroids[assign[i]]);
            history.push_back(j);
            wcss = j;
            if (!changed) break;
        }
        assign_out = assign;
        return wcss;
    };

    KmeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    std::vector<u32> assign;
    std::vector<double> history;
    for (int r = 0; r < std::max(1, restarts); ++r) {
        double w = run_once(u64(r), assign, history);
        if (w < best.wcss) {
            best.wcss = w;
            best.wcss_history = history;
            best.tess.ownership = assign;
        }
    }
    best.tess.kind = TessKind::KMEANS_s;
    best.tess.cells.assign(k, Cell{});
    for (u32 c = 0; c < k; ++c) best.tess.cells[c].id = c;
    best.tess.rebuild_members();
    best.tess.check_total();
    return best;
}

// ---------------------------------------------------------------------------
// CBG tessellation and random merging

inline Tessellation build_cbg_tessellation(const City& city) {
    Tessellation t;
    t.kind = TessKind::CBG;
    t.cells.resize(city.n_cbgs());
    t.ownership = city.cbg_of_node;
    for (u32 c = 0; c < city.n_cbgs(); ++c) {
        Cell& cell = t.cells[c];
        cell.id = c;
        cell.source_cbg_fractions[c] = 1.0;
        std::vector<i64> byage = apportion(
            city.cbgs[c].population,
            {city.cbgs[c].age_distribution[0], city.cbgs[c].age_distribution[1],
             city.cbgs[c].age_distribution[2]});
        for (int b = 0; b < kAgeBuckets; ++b) cell.demographic_share[b] = byage[std::size_t(b)];
    }
    t.rebuild_members();
    for (u32 c = 0; c < city.n_cbgs(); ++c)
        if (t.cells[c].member_nodes.empty() && city.cbgs[c].population > 0)
            throw ValidationError("cbg " + city.cbgs[c].id +
                                  " has population but contains no street node");
    // prune node-less zero-population cells so ownership stays total
    if (std::any_of(t.cells.begin(), t.cells.end(),
                    [](const Cell& c) { return c.member_nodes.empty(); })) {
        Tessellation pruned;
        pruned.kind = t.kind;
        std::vector<u32> remap(t.cells.size(), kNone32);
        for (Cell& c : t.cells) {
            if (c.member_nodes.empty()) continue;
            remap[c.id] = u32(pruned.cells.size());
            c.id = remap[c.id];
            pruned.cells.push_back(std::move(c));
        }
        pruned.ownership.resize(t.ownership.size());
        for (u32 n = 0; n < t.ownership.size(); ++n) pruned.ownership[n] = remap[t.ownership[n]];
        t = std::move(pruned);
    }
    t.check_total();
    return t;
}

// Cell adjacency: two cells are adjacent iff some street edge joins their
// member nodes.
inline std::vector<std::set<u32>> cell_adjacency(const Tessellation& t, const StreetGraph& graph) {
    std::vector<std::set<u32>> adj(t.cells.size());
    for (const StreetEdge& e : graph.edges) {
        u32 a = t.ownership[e.u], b = t.ownership[e.v];
        if (a != b) {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    return adj;
}

inline Tessellation merge_random_cbgs(const Tessellation& cbg_tess, const StreetGraph& graph,
                                      u32 target_count, u64 seed) {
    if (target_count > cbg_tess.n_cells())
        throw ConfigError("merge target exceeds current cell count");
    Tessellation t = cbg_tess;
    t.kind = TessKind::RMCBG;
    if (target_count == t.n_cells()) return t;

    RngStream rng(seed, salts::tessellation, 0x4D455247ull);
    // union-find over original cell ids
    std::vector<u32> parent(t.cells.size());
    for (u32 i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](u32 x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto adj = cell_adjacency(t, graph);
    u32 remaining = t.n_cells();
    while (remaining > target_count) {
        std::vector<u32> roots;
        for (u32 i = 0; i < parent.size(); ++i)
            if (find(i) == i && !adj[i].empty()) roots.push_back(i);
        if (roots.empty())
            throw ValidationError("rmcbg: no adjacent cell pairs left with " +
                                  std::to_string(remaining) + " cells remaining");
        u32 a = roots[rng.below(roots.size())];
        std::vector<u32> nbs(adj[a].begin(), adj[a].end());
        u32 b = nbs[rng.below(nbs.size())];
        // merge b into a
        parent[b] = a;
        for (u32 nb : adj[b]) {
            if (nb == a) continue;
            adj[nb].erase(b);
            adj[nb].insert(a);
            adj[a].insert(nb);
        }
        adj[a].erase(b);
        adj[a].erase(a);
        adj[b].clear();
        --remaining;
    }

    // materialize merged cells, renumbered in ascending original-root order
    std::map<u32, u32> root_to_new;
    for (u32 i = 0; i < parent.size(); ++i) root_to_new.emplace(find(i), 0);
    u32 next = 0;
    for (auto& [root, id] : root_to_new) id = next++;
    Tessellation out;
    out.kind = TessKind::RMCBG;
    out.cells.resize(root_to_new.size());
    for (auto& [root, id] : root_to_new) out.cells[id].id = id;
    for (u32 i = 0; i < parent.size(); ++i) {
        u32 dst = root_to_new[find(i)];
        const Cell& src = cbg_tess.cells[i];
        Cell& c = out.cells[dst];
        c.schedule = merge_schedules({c.schedule, src.schedule});
        c.demographic_share = demographics_sum(c.demographic_share, src.demographic_share);
        for (const auto& [cbg, f] : src.source_cbg_fractions) c.source_cbg_fractions[cbg] += f;
    }
    out.ownership.resize(cbg_tess.ownership.size());
    for (u32 n = 0; n < out.ownership.size(); ++n)
        out.ownership[n] = root_to_new[find(cbg_tess.ownership[n])];
    out.rebuild_members();
    out.check_total();
    return out;
}

// ---------------------------------------------------------------------------
// Rasterization

inline constexpr double kDefaultRasterResolution = 25.0;  // meters per pixel

struct PixelMap {
    double resolution = kDefaultRasterResolution;
    Point origin{};
    u32 width = 0, height = 0;
    std::vector<i32> grid;  // row-major cell ids, -1 while unallocated
    u64 stamp_conflicts = 0;

    i32 at(u32 x, u32 y) const { return grid[std::size_t(y) * width + x]; }

    std::pair<u32, u32> pixel_of(Point p) const {
        double fx = (p.x - origin.x) / resolution;
        double fy = (p.y - origin.y) / resolution;
        if (fx < 0 || fy < 0 || fx >= double(width) || fy >= double(height))
            throw ValidationError("position outside pixel map bounds");
        return {u32(fx), u32(fy)};
    }

    u32 cell_of_location(Point p) const {
        auto [x, y] = pixel_of(p);
        i32 id = at(x, y);
        if (id < 0) throw ValidationError("pixel map has unallocated pixel");
        return u32(id);
    }
};

// Stamp the street geometry of every cell, then grow claims over unallocated
// pixels layer by layer (4-neighborhood). Equal-distance claims go to the
// smaller cell id; stamping collisions keep the first stamp and are counted.
inline PixelMap rasterize(const Tessellation& tess, const StreetGraph& graph, double resolution) {
    if (!(resolution > 0.0)) throw ConfigError("raster resolution must be > 0");
    PixelMap pm;
    pm.resolution = resolution;
    BoundingBox bb = graph.bounds();
    pm.origin = {bb.min_x - resolution * 0.5, bb.min_y - resolution * 0.5};
    pm.width = u32((bb.max_x - pm.origin.x) / resolution) + 1;
    pm.height = u32((bb.max_y - pm.origin.y) / resolution) + 1;
    pm.grid.assign(std::size_t(pm.width) * pm.height, -1);

    auto stamp = [&](Point p, u32 cell) {
        auto [x, y] = pm.pixel_of(p);
        i32& g = pm.grid[std::size_t(y) * pm.width + x];
        if (g < 0)
            g = i32(cell);
        else if (g != i32(cell))
            ++pm.stamp_conflicts;
    };

    // nodes first (ascending cell id via node order within cells), then edges
    for (const Cell& c : tess.cells)
        for (u32 n : c.member_nodes) stamp(graph.nodes[n].position, c.id);
    for (const StreetEdge& e : graph.edges) {
        Point a = graph.nodes[e.u].position, b = graph.nodes[e.v].position;
        double len = dist(a, b);
        int steps = std::max(1, int(len / (resolution * 0.5)));
        for (int s = 0; s <= steps; ++s) {
            double f = double(s) / double(steps);
            Point p{a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f};
            stamp(p, tess.ownership[f < 0.5 ? e.u : e.v]);
        }
    }

    // multi-source BFS growth
    std::vector<u32> frontier;
    for (u32 i = 0; i < pm.grid.size(); ++i)
        if (pm.grid[i] >= 0) frontier.push_back(i);
    std::vector<std::pair<u32, i32>> claims;
    while (!frontier.empty()) {
        claims.clear();
        for (u32 px : frontier) {
            u32 x = px % pm.width, y = px / pm.width;
            i32 owner = pm.grid[px];
            if (x > 0 && pm.grid[px - 1] < 0) claims.emplace_back(px - 1, owner);
            if (x + 1 < pm.width && pm.grid[px + 1] < 0) claims.emplace_back(px + 1, owner);
            if (y > 0 && pm.grid[px - pm.width] < 0) claims.emplace_back(px - pm.width, owner);
            if (y + 1 < pm.height && pm.grid[px + pm.width] < 0)
                claims.emplace_back(px + pm.width, owner);
        }
        std::sort(claims.begin(), claims.end());
        frontier.clear();
        for (const auto& [px, owner] : claims) {
            if (pm.grid[px] < 0) {
                pm.grid[px] = owner;
                frontier.push_back(px);
            }
        }
    }
    return pm;
}

inline void save_pixel_map(const PixelMap& pm, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SimError("cannot write pixel map: " + path);
    out << pm.width << ' ' << pm.height << ' ' << pm.resolution << ' ' << pm.origin.x << ' '
        << pm.origin.y << '\n';
    for (u32 y = 0; y < pm.height; ++y) {
        for (u32 x = 0; x < pm.width; ++x) {
            if (x) out << ' ';
            out << pm.at(x, y);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Source-CBG area fractions and the CBG x VD overlay

// Fraction of each CBG's rasterized area lying inside each cell. Per-CBG
// fractions sum to 1 because both maps partition the same pixel grid.
inline void attach_source_cbg_fractions(Tessellation& tess, const Tessellation& cbg_tess,
                                        const StreetGraph& graph,
                                        double resolution = kDefaultRasterResolution) {
    PixelMap cell_map = rasterize(tess, graph, resolution);
    PixelMap cbg_map = rasterize(cbg_tess, graph, resolution);
    std::vector<u64> cbg_pixels(cbg_tess.n_cells(), 0);
    std::map<std::pair<u32, u32>, u64> pair_pixels;  // (cell, cbg) -> count
    for (std::size_t i = 0; i < cell_map.grid.size(); ++i) {
        u32 cell = u32(cell_map.grid[i]);
        u32 cbg = u32(cbg_map.grid[i]);
        ++cbg_pixels[cbg];
        ++pair_pixels[{cell, cbg}];
    }
    for (Cell& c : tess.cells) c.source_cbg_fractions.clear();
    for (const auto& [key, count] : pair_pixels) {
        auto [cell, cbg] = key;
        tess.cells[cell].source_cbg_fractions[cbg] = double(count) / double(cbg_pixels[cbg]);
    }
    // demographic shares follow the same largest-remainder apportionment used
    // by schedule splitting
    for (Cell& c : tess.cells) c.demographic_share = Demographics{};
    for (u32 cbg = 0; cbg < cbg_tess.n_cells(); ++cbg) {
        std::vector<u32> cells_of_cbg;
        std::vector<double> fractions;
        for (const Cell& c : tess.cells) {
            auto it = c.source_cbg_fractions.find(cbg);
            if (it != c.source_cbg_fractions.end()) {
                cells_of_cbg.push_back(c.id);
                fractions.push_back(it->second);
            }
        }
        double fsum = 0.0;
        for (double f : fractions) fsum += f;
        for (double& f : fractions) f /= fsum;
        auto demo_parts = split_demographics(cbg_tess.cells[cbg].demographic_share, fractions);
        for (std::size_t i = 0; i < cells_of_cbg.size(); ++i)
            tess.cells[cells_of_cbg[i]].demographic_share = demographics_sum(
                tess.cells[cells_of_cbg[i]].demographic_share, demo_parts[i]);
    }
}

// Intersections of CBG cells with VD cells. Children inherit area-fraction
// splits of their parent CBG's schedule and demographics.
inline Tessellation overlay_cbg_vd(const Tessellation& cbg_tess, const Tessellation& vd_tess,
                                   const StreetGraph& graph,
                                   double resolution = kDefaultRasterResolution) {
    if (cbg_tess.ownership.size() != vd_tess.ownership.size() ||
        cbg_tess.ownership.size() != graph.size())
        throw ValidationError("overlay inputs cover different node universes");

    // node-set intersections, keyed (cbg, vd) ascending
    std::map<std::pair<u32, u32>, std::vector<u32>> members;
    for (u32 n = 0; n < graph.size(); ++n)
        members[{cbg_tess.ownership[n], vd_tess.ownership[n]}].push_back(n);

    PixelMap cbg_map = rasterize(cbg_tess, graph, resolution);
    PixelMap vd_map = rasterize(vd_tess, graph, resolution);
    std::map<std::pair<u32, u32>, u64> pair_pixels;
    for (std::size_t i = 0; i < cbg_map.grid.size(); ++i)
        ++pair_pixels[{u32(cbg_map.grid[i]), u32(vd_map.grid[i])}];

    Tessellation out;
    out.kind = TessKind::CBGVD;
    out.ownership.assign(graph.size(), kNone32);
    std::map<u32, std::vector<u32>> children_of_cbg;  // cbg -> child cell ids
    std::map<u32, std::vector<double>> weights_of_cbg;
    for (const auto& [key, nodes] : members) {
        u32 id = u32(out.cells.size());
        Cell c;
        c.id = id;
        c.member_nodes = nodes;
        out.cells.push_back(std::move(c));
        for (u32 n : nodes) out.ownership[n] = id;
        auto it = pair_pixels.find(key);
        double w = it == pair_pixels.end() ? 0.0 : double(it->second);
        children_of_cbg[key.first].push_back(id);
        weights_of_cbg[key.first].push_back(w);
    }

    for (const auto& [cbg, child_ids] : children_of_cbg) {
        std::vector<double> fractions = weights_of_cbg[cbg];
        double total = 0.0;
        for (double w : fractions) total += w;
        if (total <= 0.0)
            fractions.assign(child_ids.size(), 1.0 / double(child_ids.size()));
        else
            for (double& w : fractions) w /= total;
        const Cell& parent = cbg_tess.cells[cbg];
        auto sched_parts = split_schedule(parent.schedule, fractions);
        auto demo_parts = split_demographics(parent.demographic_share, fractions);
        for (std::size_t i = 0; i < child_ids.size(); ++i) {
            Cell& c = out.cells[child_ids[i]];
            c.schedule = std::move(sched_parts[i]);
            c.demographic_share = demo_parts[i];
            double parent_share = 1.0;
            if (auto it = parent.source_cbg_fractions.find(cbg);
                it != parent.source_cbg_fractions.end())
                parent_share = it->second;
            c.source_cbg_fractions[cbg] = parent_share * fractions[i];
        }
    }
    out.check_total();
    return out;
}

// ---------------------------------------------------------------------------
// Export

inline void export_tessellation(const Tessellation& tess, const City& city,
                                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SimError("cannot write tessellation: " + path);
    for (const Cell& c : tess.cells) {
        nlohmann::json j;
        j["id"] = c.id;
        j["kind"] = tess_kind_name(tess.kind);
        auto nodes = nlohmann::json::array();
        for (u32 n : c.member_nodes) nodes.push_back(city.graph.nodes[n].id);
        j["member_nodes"] = nodes;
        nlohmann::json sched = nlohmann::json::object();
        for (const auto& [poi, f] : c.schedule.entries) sched[city.pois[poi].id] = f;
        j["schedule"] = sched;
        j["demographic_share"] = {{"child", c.demographic_share[0]},
                                  {"adult", c.demographic_share[1]},
                                  {"senior", c.demographic_share[2]}};
        nlohmann::json fr = nlohmann::json::object();
        for (const auto& [cbg, f] : c.source_cbg_fractions) fr[city.cbgs[cbg].id] = f;
        j["source_cbg_fractions"] = fr;
        out << j.dump() << '\n';
    }
}

}  // namespace aic
