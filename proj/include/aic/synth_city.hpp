#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "aic/geodata.hpp"
#include "aic/rng.hpp"
#include "aic/schedule.hpp"

namespace aic {

// Synthetic stand-in for real street/POI/census/mobility extracts: a square
// grid city with an arterial ring road, residential interior, category-shaped
// POI profiles, rectangular CBG blocks, and gravity-model visit patterns.
struct SynthCityParams {
    u32 grid_size = 20;  // >= 4, nodes per side
    i64 population = 50000;
    std::map<PoiCategory, u32> pois_by_category = {
        {PoiCategory::grocery_retail, 12}, {PoiCategory::education, 8},
        {PoiCategory::religious, 5},       {PoiCategory::food_service, 15},
        {PoiCategory::accommodation, 4},   {PoiCategory::medical, 4},
        {PoiCategory::office, 10},         {PoiCategory::other, 6},
    };
    u64 seed = 1;
    double spacing_m = 100.0;
    double traffic_factor = 1.0;
    double weekly_trips_per_person = 5.0;
    i64 target_cbg_population = 1500;
};

namespace synth_detail {

inline std::array<double, 24> hourly_template(PoiCategory c) {
    switch (c) {
        case PoiCategory::grocery_retail:
            return {0, 0, 0, 0, 0, 0, 1, 2, 4, 5, 6, 7, 8, 7, 6, 7, 9, 12, 11, 8, 5, 3, 1, 0};
        case PoiCategory::education:
            return {0, 0, 0, 0, 0, 0, 0, 2, 10, 12, 12, 12, 11, 12, 11, 8, 3, 1, 0, 0, 0, 0, 0, 0};
        case PoiCategory::religious:
            return {0, 0, 0, 0, 0, 0, 1, 2, 6, 9, 10, 8, 4, 2, 2, 2, 2, 3, 4, 3, 1, 0, 0, 0};
        case PoiCategory::food_service:
            return {0, 0, 0, 0, 0, 0, 1, 2, 3, 3, 4, 8, 11, 9, 4, 3, 4, 7, 10, 9, 6, 3, 1, 0};
        case PoiCategory::accommodation:
            return {3, 3, 3, 3, 3, 3, 3, 3, 2, 2, 2, 2, 2, 2, 2, 2, 3, 4, 5, 6, 6, 5, 4, 3};
        case PoiCategory::medical:
            return {0, 0, 0, 0, 0, 0, 1, 2, 6, 8, 8, 8, 7, 8, 8, 7, 5, 3, 1, 1, 0, 0, 0, 0};
        case PoiCategory::office:
            return {0, 0, 0, 0, 0, 0, 1, 3, 8, 10, 10, 10, 9, 10, 10, 9, 6, 3, 1, 0, 0, 0, 0, 0};
        case PoiCategory::other:
            return {0, 0, 0, 0, 0, 0, 1, 2, 4, 5, 5, 6, 6, 6, 6, 6, 6, 6, 5, 4, 3, 2, 1, 0};
    }
    return {};
}

inline std::array<double, 7> dow_template(PoiCategory c) {
    switch (c) {
        case PoiCategory::grocery_retail: return {0.9, 0.9, 0.9, 1.0, 1.1, 1.3, 1.2};
        case PoiCategory::education: return {1.3, 1.3, 1.3, 1.3, 1.2, 0.1, 0.1};
        case PoiCategory::religious: return {0.4, 0.4, 0.6, 0.5, 0.6, 0.9, 3.0};
        case PoiCategory::food_service: return {0.8, 0.8, 0.9, 1.0, 1.3, 1.4, 1.1};
        default: return {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    }
}

inline std::array<double, kDwellBuckets> dwell_template(PoiCategory c) {
    switch (c) {
        case PoiCategory::grocery_retail: return {0.12, 0.42, 0.32, 0.12, 0.02};
        case PoiCategory::education: return {0.02, 0.06, 0.17, 0.45, 0.30};
        case PoiCategory::religious: return {0.05, 0.15, 0.45, 0.30, 0.05};
        case PoiCategory::food_service: return {0.08, 0.27, 0.42, 0.20, 0.03};
        case PoiCategory::accommodation: return {0.04, 0.08, 0.13, 0.30, 0.45};
        case PoiCategory::medical: return {0.05, 0.25, 0.40, 0.25, 0.05};
        case PoiCategory::office: return {0.05, 0.08, 0.12, 0.35, 0.40};
        case PoiCategory::other: return {0.18, 0.30, 0.30, 0.17, 0.05};
    }
    return {0.2, 0.2, 0.2, 0.2, 0.2};
}

// Trip-share weights for the categories (local trips dominate overall volume).
inline double category_popularity(PoiCategory c) {
    switch (c) {
        case PoiCategory::grocery_retail: return 0.25;
        case PoiCategory::education: return 0.068;
        case PoiCategory::religious: return 0.018;
        case PoiCategory::food_service: return 0.20;
        case PoiCategory::accommodation: return 0.03;
        case PoiCategory::medical: return 0.06;
        case PoiCategory::office: return 0.25;
        case PoiCategory::other: return 0.124;
    }
    return 0.1;
}

}  // namespace synth_detail

inline City generate_synthetic_city(const SynthCityParams& params) {
    if (params.grid_size < 4) throw ConfigError("grid_size must be >= 4");
    if (params.population < 100) throw ConfigError("population must be >= 100");
    const u32 n = params.grid_size;
    const double sp = params.spacing_m;

    City city;

    // street grid: arterial ring, residential interior
    for (u32 y = 0; y < n; ++y)
        for (u32 x = 0; x < n; ++x) {
            bool ring = x == 0 || y == 0 || x == n - 1 || y == n - 1;
            city.graph.add_node(u64(y) * n + x, Point{double(x) * sp, double(y) * sp},
                                ring ? NodeKind::arterial : NodeKind::residential);
        }
    auto node_at = [&](u32 x, u32 y) { return y * n + x; };

    // two slow corridors (river/railroad) with fast crossings every few
    // blocks. Commute time and straight-line distance disagree around them,
    // which is what distinguishes network tessellations from Euclidean ones.
    RngStream road_rng(params.seed, salts::synth, 0xB12ull);
    u32 barrier_row = n / 3 + u32(road_rng.below(std::max(1u, n / 3)));
    u32 barrier_col = n / 3 + u32(road_rng.below(std::max(1u, n / 3)));
    auto crossing_penalty = [&](bool crosses, u32 along) {
        if (!crosses) return 1.0;
        return along % 5 == 2 ? 1.0 : 4.0;  // a bridge every fifth street
    };
    for (u32 y = 0; y < n; ++y)
        for (u32 x = 0; x < n; ++x) {
            auto connect = [&](u32 ux, u32 uy, u32 vx, u32 vy, double penalty) {
                u32 u = node_at(ux, uy), v = node_at(vx, vy);
                NodeKind ku = city.graph.nodes[u].kind, kv = city.graph.nodes[v].kind;
                NodeKind ek = (ku == NodeKind::arterial && kv == NodeKind::arterial)
                                  ? NodeKind::arterial
                                  : NodeKind::residential;
                double jitter = 0.85 + 0.45 * road_rng.uniform01();  // average traffic load
                city.graph.add_edge(
                    u, v, sp, edge_travel_time(sp, ek, params.traffic_factor) * penalty * jitter);
            };
            if (x + 1 < n) connect(x, y, x + 1, y, crossing_penalty(x == barrier_col, y));
            if (y + 1 < n) connect(x, y, x, y + 1, crossing_penalty(y == barrier_row, x));
        }
    city.graph.validate();

    // POIs at random street nodes
    RngStream poi_rng(params.seed, salts::synth, 0x901ull);
    u32 poi_counter = 0;
    for (int ci = 0; ci < kPoiCategories; ++ci) {
        PoiCategory cat = PoiCategory(ci);
        auto it = params.pois_by_category.find(cat);
        u32 count = it == params.pois_by_category.end() ? 0 : it->second;
        for (u32 k = 0; k < count; ++k) {
            Poi p;
            char buf[16];
            std::snprintf(buf, sizeof buf, "poi_%04u", poi_counter++);
            p.id = buf;
            p.node = u32(poi_rng.below(city.graph.size()));
            p.category = cat;
            p.area_m2 = std::clamp(poi_rng.lognormal(std::log(500.0), 0.5), 50.0, 5000.0);
            double fr = poi_rng.uniform01();
            p.floors = fr < 0.6 ? 1 : (fr < 0.85 ? 2 : 3);
            p.has_geometry = true;
            auto hourly = synth_detail::hourly_template(cat);
            double jitter = 0.8 + 0.4 * poi_rng.uniform01();
            for (int h = 0; h < 24; ++h) p.hourly_visits[h] = hourly[h] * jitter;
            p.dow_weights = synth_detail::dow_template(cat);
            for (int d = 0; d < 31; ++d) p.dom_weights[d] = 0.9 + 0.2 * poi_rng.uniform01();
            // larger venues hold their visitors longer: blend the category
            // dwell profile toward a long-stay profile by floor-area size
            p.dwell_bucket_probs = synth_detail::dwell_template(cat);
            {
                constexpr std::array<double, kDwellBuckets> long_stay = {0.03, 0.12, 0.25, 0.38,
                                                                         0.22};
                double size_score =
                    std::clamp(p.area_m2 * p.floors / 3000.0, 0.0, 1.0) * 0.7;
                double total = 0.0;
                for (int b = 0; b < kDwellBuckets; ++b) {
                    p.dwell_bucket_probs[b] =
                        (1.0 - size_score) * p.dwell_bucket_probs[b] + size_score * long_stay[b];
                    total += p.dwell_bucket_probs[b];
                }
                for (double& v : p.dwell_bucket_probs) v /= total;
            }
            city.pois.push_back(std::move(p));
        }
    }
    if (city.pois.empty()) throw ConfigError("synthetic city needs at least one POI");

    // CBG blocks: bx*by rectangles over the grid
    i64 want_cbgs = std::max<i64>(4, params.population / params.target_cbg_population);
    u32 max_side = std::max<u32>(2, n / 2);
    u32 bx = u32(std::clamp<i64>(i64(std::lround(std::sqrt(double(want_cbgs)))), 2, max_side));
    u32 by = u32(std::clamp<i64>((want_cbgs + bx - 1) / bx, 2, max_side));
    RngStream cbg_rng(params.seed, salts::synth, 0xCB6ull);

    std::vector<std::pair<u32, u32>> col_bands, row_bands;  // [first, last] node columns
    for (u32 b = 0; b < bx; ++b)
        col_bands.push_back({b * n / bx, (b + 1) * n / bx - 1});
    for (u32 b = 0; b < by; ++b)
        row_bands.push_back({b * n / by, (b + 1) * n / by - 1});

    std::vector<i64> residential_count;
    for (u32 j = 0; j < by; ++j)
        for (u32 i = 0; i < bx; ++i) {
            CbgPolygon c;
            c.id = std::to_string(530330000000LL + i64(city.cbgs.size()));
            auto [x0, x1] = col_bands[i];
            auto [y0, y1] = row_bands[j];
            double margin = sp * 0.5;
            c.polygon = {{x0 * sp - margin, y0 * sp - margin},
                         {x1 * sp + margin, y0 * sp - margin},
                         {x1 * sp + margin, y1 * sp + margin},
                         {x0 * sp - margin, y1 * sp + margin}};
            i64 res = 0;
            for (u32 yy = y0; yy <= y1; ++yy)
                for (u32 xx = x0; xx <= x1; ++xx)
                    if (city.graph.nodes[node_at(xx, yy)].kind == NodeKind::residential) ++res;
            residential_count.push_back(std::max<i64>(res, 1));
            double a0 = 0.21 + 0.08 * (cbg_rng.uniform01() - 0.5);
            double a2 = 0.18 + 0.08 * (cbg_rng.uniform01() - 0.5);
            c.age_distribution = {a0, 1.0 - a0 - a2, a2};
            c.household_size_probs = {0.10, 0.12, 0.16, 0.22, 0.20, 0.20};  // mean 3.9
            c.centroid = polygon_centroid(c.polygon);
            city.cbgs.push_back(std::move(c));
        }

    // populations proportional to residential node counts, conserving total
    {
        double total = 0.0;
        for (i64 r : residential_count) total += double(r);
        std::vector<double> fr;
        for (i64 r : residential_count) fr.push_back(double(r) / total);
        auto pops = apportion(params.population, fr);
        for (std::size_t i = 0; i < city.cbgs.size(); ++i) city.cbgs[i].population = pops[i];
    }

    // commute destinations weighted by workplace mass (offices count double)
    {
        std::vector<double> work_mass(city.cbgs.size(), 1.0);
        city.assign_nodes_to_cbgs();
        for (const Poi& p : city.pois) {
            u32 c = city.cbg_of_node[p.node];
            work_mass[c] += p.category == PoiCategory::office ? 2.0 : 1.0;
        }
        for (u32 c = 0; c < city.cbgs.size(); ++c) {
            double total = 0.0;
            std::vector<double> w(city.cbgs.size());
            for (u32 d = 0; d < city.cbgs.size(); ++d) {
                w[d] = work_mass[d] * (d == c ? 1.5 : 1.0);
                total += w[d];
            }
            for (u32 d = 0; d < city.cbgs.size(); ++d)
                city.cbgs[c].daytime_cbg_probs.emplace_back(city.cbgs[d].id, w[d] / total);
        }
    }

    // gravity-model visit patterns
    {
        std::vector<double> attract(city.pois.size());
        for (std::size_t p = 0; p < city.pois.size(); ++p)
            attract[p] = city.pois[p].area_m2 * city.pois[p].floors / 500.0 *
                         synth_detail::category_popularity(city.pois[p].category);

        std::vector<std::vector<double>> tt(city.cbgs.size());
        for (u32 c = 0; c < city.cbgs.size(); ++c) {
            u32 cn = city.graph.nearest_node(city.cbgs[c].centroid);
            tt[c] = city.graph.shortest_times_from(cn);
        }
        std::vector<std::vector<double>> gravity(city.cbgs.size(),
                                                 std::vector<double>(city.pois.size()));
        double gsum = 0.0;
        for (u32 c = 0; c < city.cbgs.size(); ++c)
            for (u32 p = 0; p < city.pois.size(); ++p) {
                double minutes = tt[c][city.pois[p].node] / 60.0;
                gravity[c][p] = double(city.cbgs[c].population) * attract[p] /
                                ((1.0 + minutes) * (1.0 + minutes));
                gsum += gravity[c][p];
            }
        double scale = double(params.population) * params.weekly_trips_per_person / gsum;
        // every POI must keep a positive rounded count from its nearest CBG
        for (u32 p = 0; p < city.pois.size(); ++p) {
            if (attract[p] <= 0.0) continue;
            double best = 0.0;
            for (u32 c = 0; c < city.cbgs.size(); ++c) best = std::max(best, gravity[c][p]);
            if (best * scale < 0.5) scale = 0.5000001 / best;
        }
        // survey-style sparsity: each CBG reports only its strongest
        // destinations (observed mobility tables censor the long tail), and
        // each POI keeps its best source row
        std::size_t keep = std::max<std::size_t>(12, city.pois.size() / 4);
        std::vector<std::vector<char>> keep_mask(city.cbgs.size(),
                                                 std::vector<char>(city.pois.size(), 0));
        for (u32 c = 0; c < city.cbgs.size(); ++c) {
            std::vector<u32> order(city.pois.size());
            for (u32 p = 0; p < city.pois.size(); ++p) order[p] = p;
            std::sort(order.begin(), order.end(), [&](u32 a, u32 b) {
                if (gravity[c][a] != gravity[c][b]) return gravity[c][a] > gravity[c][b];
                return a < b;
            });
            for (std::size_t k = 0; k < std::min(keep, order.size()); ++k)
                keep_mask[c][order[k]] = 1;
        }
        for (u32 p = 0; p < city.pois.size(); ++p) {
            u32 best_c = 0;
            for (u32 c = 1; c < city.cbgs.size(); ++c)
                if (gravity[c][p] > gravity[best_c][p]) best_c = c;
            keep_mask[best_c][p] = 1;
        }
        for (u32 c = 0; c < city.cbgs.size(); ++c)
            for (u32 p = 0; p < city.pois.size(); ++p) {
                if (!keep_mask[c][p]) continue;
                double cnt = std::round(gravity[c][p] * scale);
                if (cnt > 0.0) city.patterns.entries.push_back({c, p, cnt});
            }

        // align POI hourly profiles with the pattern totals so congestion
        // estimates and schedules describe the same city
        std::vector<double> weekly(city.pois.size(), 0.0);
        for (const auto& e : city.patterns.entries) weekly[e.poi] += e.weekly_count;
        for (u32 p = 0; p < city.pois.size(); ++p) {
            double cur = city.pois[p].weekly_visit_total();
            if (cur > 0.0 && weekly[p] > 0.0) {
                double f = weekly[p] / cur;
                for (double& h : city.pois[p].hourly_visits) h *= f;
            }
        }
    }

    city.assign_nodes_to_cbgs();
    return city;
}

}  // namespace aic
