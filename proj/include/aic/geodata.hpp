#pragma once

#include <array>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "aic/street_graph.hpp"

namespace aic {

inline constexpr int kDwellBuckets = 5;
// Bucket bounds in minutes; the open-ended last bucket is capped so expected
// dwell stays finite (configurable in MobilityConfig).
inline constexpr double kDwellBounds[kDwellBuckets + 1] = {0, 5, 20, 60, 240, 480};

struct Poi {
    std::string id;
    u32 node = 0;  // dense street-node index
    PoiCategory category = PoiCategory::other;
    double area_m2 = 0.0;
    int floors = 1;
    bool has_geometry = false;
    std::array<double, 24> hourly_visits{};
    std::array<double, 7> dow_weights{};
    std::array<double, 31> dom_weights{};
    std::array<double, kDwellBuckets> dwell_bucket_probs{};

    double weekly_visit_total() const {
        double s = 0.0;
        for (double v : hourly_visits) s += v;
        return s * 7.0;
    }
};

struct CbgPolygon {
    std::string id;  // FIPS-style
    std::vector<Point> polygon;
    i64 population = 0;
    std::array<double, kAgeBuckets> age_distribution{};
    std::array<double, 6> household_size_probs{};  // sizes 1..6
    std::vector<std::pair<std::string, double>> daytime_cbg_probs;
    Point centroid{};
};

struct VisitPatterns {
    struct Entry {
        u32 cbg = 0;
        u32 poi = 0;
        double weekly_count = 0.0;
    };
    std::vector<Entry> entries;
};

namespace detail {

template <std::size_t N>
inline void check_prob_vector(std::array<double, N>& probs, const std::string& what) {
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0 || !std::isfinite(p))
            throw ValidationError(what + ": negative or non-finite probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw ValidationError(what + ": probabilities sum to " + std::to_string(sum) +
                              ", expected 1");
    for (double& p : probs) p /= sum;  // renormalize residual error away
}

template <std::size_t N>
inline std::array<double, N> json_array(const nlohmann::json& j, const char* key,
                                        const std::string& ctx) {
    if (!j.contains(key))
        throw ParseError(ctx + ": missing key '" + key + "'");
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != N)
        throw ParseError(ctx + ": key '" + key + "' must be an array of " + std::to_string(N));
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i].get<double>();
    return out;
}

}  // namespace detail

// POIs: one JSON object per line. area_m2/floors may be absent; geometry is
// then estimated from neighbors after the whole file is read.
inline std::vector<Poi> load_pois(const std::string& path, const StreetGraph& graph) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open pois file: " + path);
    std::vector<Poi> pois;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::string ctx = "pois line " + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(ctx + ": " + e.what());
        }
        Poi p;
        p.id = j.at("id").get<std::string>();
        u64 node_id = j.at("node_id").get<u64>();
        auto idx = graph.index_of(node_id);
        if (!idx)
            throw ValidationError(ctx + ": poi " + p.id + " references unknown node " +
                                  std::to_string(node_id));
        p.node = *idx;
        p.category = category_from_name(j.at("category").get<std::string>());
        if (j.contains("area_m2") && j.contains("floors")) {
            p.area_m2 = j.at("area_m2").get<double>();
            p.floors = j.at("floors").get<int>();
            p.has_geometry = true;
            if (!(p.area_m2 > 0.0))
                throw ValidationError(ctx + ": poi " + p.id + " has non-positive area");
            if (p.floors < 1)
                throw ValidationError(ctx + ": poi " + p.id + " has floors < 1");
        }
        p.hourly_visits = detail::json_array<24>(j, "hourly_visits", ctx);
        p.dow_weights = detail::json_array<7>(j, "dow_weights", ctx);
        p.dom_weights = detail::json_array<31>(j, "dom_weights", ctx);
        p.dwell_bucket_probs = detail::json_array<kDwellBuckets>(j, "dwell_bucket_probs", ctx);
        for (double v : p.hourly_visits)
            if (v < 0.0) throw ValidationError(ctx + ": negative hourly visits");
        detail::check_prob_vector(p.dwell_bucket_probs, ctx + ": dwell_bucket_probs");
        pois.push_back(std::move(p));
    }
    return pois;
}

inline std::vector<CbgPolygon> load_cbgs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open cbgs file: " + path);
    std::vector<CbgPolygon> cbgs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::string ctx = "cbgs line " + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(ctx + ": " + e.what());
        }
        CbgPolygon c;
        c.id = j.at("id").get<std::string>();
        for (const auto& v : j.at("polygon"))
            c.polygon.push_back({v[0].get<double>(), v[1].get<double>()});
        if (!polygon_is_simple(c.polygon))
            throw ValidationError(ctx + ": cbg " + c.id + " polygon is not simple");
        c.population = j.at("population").get<i64>();
        if (c.population < 0) throw ValidationError(ctx + ": negative population");
        c.age_distribution = detail::json_array<kAgeBuckets>(j, "age_distribution", ctx);
        c.household_size_probs = detail::json_array<6>(j, "household_size_probs", ctx);
        detail::check_prob_vector(c.age_distribution, ctx + ": age_distribution");
        detail::check_prob_vector(c.household_size_probs, ctx + ": household_size_probs");
        if (j.contains("daytime_cbg_probs"))
            for (const auto& [k, v] : j.at("daytime_cbg_probs").items())
                c.daytime_cbg_probs.emplace_back(k, v.get<double>());
        std::sort(c.daytime_cbg_probs.begin(), c.daytime_cbg_probs.end());
        c.centroid = polygon_centroid(c.polygon);
        cbgs.push_back(std::move(c));
    }
    return cbgs;
}

// Patterns: CSV `cbg_id,poi_id,weekly_count`. Loaded after POIs/CBGs so the
// references can be resolved (and rejected by name when they cannot).
inline VisitPatterns load_patterns(const std::string& path, const std::vector<CbgPolygon>& cbgs,
                                   const std::vector<Poi>& pois) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open patterns file: " + path);
    std::unordered_map<std::string, u32> cbg_idx, poi_idx;
    for (u32 i = 0; i < cbgs.size(); ++i) cbg_idx[cbgs[i].id] = i;
    for (u32 i = 0; i < pois.size(); ++i) poi_idx[pois[i].id] = i;

    VisitPatterns vp;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.rfind("cbg_id", 0) == 0) continue;  // header
        std::string ctx = "patterns line " + std::to_string(line_no);
        std::size_t c1 = line.find(',');
        std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) throw ParseError(ctx + ": expected cbg_id,poi_id,weekly_count");
        std::string cbg_id = line.substr(0, c1);
        std::string poi_id = line.substr(c1 + 1, c2 - c1 - 1);
        double count = 0.0;
        try {
            count = std::stod(line.substr(c2 + 1));
        } catch (const std::exception&) {
            throw ParseError(ctx + ": bad weekly_count");
        }
        auto ci = cbg_idx.find(cbg_id);
        if (ci == cbg_idx.end())
            throw ValidationError(ctx + ": unknown cbg_id " + cbg_id);
        auto pi = poi_idx.find(poi_id);
        if (pi == poi_idx.end())
            throw ValidationError(ctx + ": unknown poi_id " + poi_id);
        if (!std::isfinite(count) || count < 0.0)
            throw ValidationError(ctx + ": weekly_count must be finite and >= 0");
        vp.entries.push_back({ci->second, pi->second, count});
    }
    return vp;
}

// Mean of known neighbor geometry; floors rounded and clamped to >= 1.
inline std::pair<double, int> estimate_building_geometry(const Poi& poi,
                                                         const std::vector<const Poi*>& neighbors) {
    double area_sum = 0.0, floor_sum = 0.0;
    for (const Poi* n : neighbors) {
        area_sum += n->area_m2;
        floor_sum += n->floors;
    }
    double area = area_sum / double(neighbors.size());
    int floors = std::max(1, int(std::lround(floor_sum / double(neighbors.size()))));
    (void)poi;
    return {area, floors};
}

// Fill missing geometry in place. Neighbors are POIs with known geometry
// within `radius` meters; the global mean is the fallback.
inline void apply_geometry_estimates(std::vector<Poi>& pois, const StreetGraph& graph,
                                     double radius = 500.0) {
    std::vector<const Poi*> known;
    for (const Poi& p : pois)
        if (p.has_geometry) known.push_back(&p);
    bool any_missing = false;
    for (const Poi& p : pois)
        if (!p.has_geometry) any_missing = true;
    if (!any_missing) return;
    if (known.empty())
        throw ConfigError("no POI carries building geometry; cannot estimate the rest");

    for (Poi& p : pois) {
        if (p.has_geometry) continue;
        Point pos = graph.nodes[p.node].position;
        std::vector<const Poi*> near;
        for (const Poi* k : known)
            if (dist(pos, graph.nodes[k->node].position) <= radius) near.push_back(k);
        auto [area, floors] = estimate_building_geometry(p, near.empty() ? known : near);
        p.area_m2 = area;
        p.floors = floors;
        p.has_geometry = true;
    }
}

inline void save_pois(const std::vector<Poi>& pois, const StreetGraph& graph,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SimError("cannot write pois file: " + path);
    for (const Poi& p : pois) {
        nlohmann::json j;
        j["id"] = p.id;
        j["node_id"] = graph.nodes[p.node].id;
        j["category"] = category_name(p.category);
        if (p.has_geometry) {
            j["area_m2"] = p.area_m2;
            j["floors"] = p.floors;
        }
        j["hourly_visits"] = p.hourly_visits;
        j["dow_weights"] = p.dow_weights;
        j["dom_weights"] = p.dom_weights;
        j["dwell_bucket_probs"] = p.dwell_bucket_probs;
        out << j.dump() << '\n';
    }
}

inline void save_cbgs(const std::vector<CbgPolygon>& cbgs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SimError("cannot write cbgs file: " + path);
    for (const CbgPolygon& c : cbgs) {
        nlohmann::json j;
        j["id"] = c.id;
        auto poly = nlohmann::json::array();
        for (const Point& p : c.polygon) poly.push_back({p.x, p.y});
        j["polygon"] = poly;
        j["population"] = c.population;
        j["age_distribution"] = c.age_distribution;
        j["household_size_probs"] = c.household_size_probs;
        nlohmann::json dp = nlohmann::json::object();
        for (const auto& [k, v] : c.daytime_cbg_probs) dp[k] = v;
        j["daytime_cbg_probs"] = dp;
        out << j.dump() << '\n';
    }
}

inline void save_patterns(const VisitPatterns& vp, const std::vector<CbgPolygon>& cbgs,
                          const std::vector<Poi>& pois, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SimError("cannot write patterns file: " + path);
    out << "cbg_id,poi_id,weekly_count\n";
    for (const auto& e : vp.entries)
        out << cbgs[e.cbg].id << ',' << pois[e.poi].id << ',' << e.weekly_count << '\n';
}

// The loaded city bundle. Everything is immutable once assembled and safe to
// share across threads.
struct City {
    StreetGraph graph;
    std::vector<Poi> pois;
    std::vector<CbgPolygon> cbgs;
    VisitPatterns patterns;
    std::vector<u32> cbg_of_node;  // node index -> cbg index

    u32 n_cbgs() const { return u32(cbgs.size()); }
    u32 n_pois() const { return u32(pois.size()); }

    void assign_nodes_to_cbgs() {
        cbg_of_node.assign(graph.size(), kNone32);
        // Sorted id order makes the containment tie-break deterministic.
        std::vector<u32> order(cbgs.size());
        for (u32 i = 0; i < cbgs.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](u32 a, u32 b) { return cbgs[a].id < cbgs[b].id; });
        for (u32 n = 0; n < graph.size(); ++n) {
            Point p = graph.nodes[n].position;
            for (u32 ci : order) {
                if (point_in_polygon(p, cbgs[ci].polygon)) {
                    cbg_of_node[n] = ci;
                    break;
                }
            }
            if (cbg_of_node[n] == kNone32) {
                // outside every polygon: nearest centroid
                double best = std::numeric_limits<double>::infinity();
                for (u32 ci : order) {
                    double d = dist2(p, cbgs[ci].centroid);
                    if (d < best) {
                        best = d;
                        cbg_of_node[n] = ci;
                    }
                }
            }
        }
    }

    static City load(const std::string& dir, double geometry_radius = 500.0) {
        City c;
        c.graph = load_street_graph(dir + "/streets.txt");
        c.pois = load_pois(dir + "/pois.jsonl", c.graph);
        apply_geometry_estimates(c.pois, c.graph, geometry_radius);
        c.cbgs = load_cbgs(dir + "/cbgs.jsonl");
        c.patterns = load_patterns(dir + "/patterns.csv", c.cbgs, c.pois);
        c.assign_nodes_to_cbgs();
        return c;
    }

    void save(const std::string& dir) const {
        save_street_graph(graph, dir + "/streets.txt");
        save_pois(pois, graph, dir + "/pois.jsonl");
        save_cbgs(cbgs, dir + "/cbgs.jsonl");
        save_patterns(patterns, cbgs, pois, dir + "/patterns.csv");
    }
};

}  // namespace aic
