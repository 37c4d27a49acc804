#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "aic/parallel.hpp"
#include "aic/rng.hpp"
#include "aic/tessellation.hpp"

namespace aic {

struct MobilityConfig {
    double p_local = 0.75;  // share of local-category trips kept among the closest five
    double dwell_cap_minutes = 480.0;
    double nt_kernel_exponent = 2.0;
    double nt_kernel_scale_minutes = 360.0;
    double base_trip_rate = 0.1;  // per free hour, before calendar weights
    // visitors amortize longer commutes with longer stays: the planned stay
    // grows by this factor per hour of one-way travel
    double dwell_travel_amortization = 0.5;

    static MobilityConfig from_json(const nlohmann::json& j) {
        MobilityConfig c;
        if (j.contains("p_local")) c.p_local = j.at("p_local").get<double>();
        if (j.contains("dwell_cap_minutes"))
            c.dwell_cap_minutes = j.at("dwell_cap_minutes").get<double>();
        if (j.contains("nt_kernel_exponent"))
            c.nt_kernel_exponent = j.at("nt_kernel_exponent").get<double>();
        if (j.contains("nt_kernel_scale_minutes"))
            c.nt_kernel_scale_minutes = j.at("nt_kernel_scale_minutes").get<double>();
        if (j.contains("base_trip_rate")) c.base_trip_rate = j.at("base_trip_rate").get<double>();
        if (j.contains("dwell_travel_amortization"))
            c.dwell_travel_amortization = j.at("dwell_travel_amortization").get<double>();
        if (c.p_local < 0 || c.p_local > 1) throw ConfigError("p_local outside [0,1]");
        if (c.dwell_cap_minutes <= 240) throw ConfigError("dwell_cap_minutes must exceed 240");
        return c;
    }

    nlohmann::json to_json() const {
        return {{"p_local", p_local},
                {"dwell_cap_minutes", dwell_cap_minutes},
                {"nt_kernel_exponent", nt_kernel_exponent},
                {"nt_kernel_scale_minutes", nt_kernel_scale_minutes},
                {"base_trip_rate", base_trip_rate},
                {"dwell_travel_amortization", dwell_travel_amortization}};
    }
};

// Age-bucket x category trip propensity. Defaults are uniform within
// age-appropriate categories; real deployments override via CSV.
struct NeedsWeights {
    std::array<std::array<double, kPoiCategories>, kAgeBuckets> matrix{};

    static NeedsWeights defaults() {
        NeedsWeights n;
        auto set = [&](AgeBucket b, std::initializer_list<double> ws) {
            int i = 0;
            for (double w : ws) n.matrix[int(b)][i++] = w;
        };
        // categories: grocery, education, religious, food, accommodation,
        //             medical, office, other
        set(AgeBucket::child, {0.5, 3.0, 0.5, 1.0, 0.05, 0.3, 0.05, 1.0});
        set(AgeBucket::adult, {2.0, 0.3, 0.5, 1.5, 0.2, 0.5, 1.0, 1.0});
        set(AgeBucket::senior, {2.0, 0.05, 1.0, 1.0, 0.1, 1.0, 0.2, 0.8});
        return n;
    }

    void validate() const {
        for (int b = 0; b < kAgeBuckets; ++b) {
            double row = 0.0;
            for (double w : matrix[b]) {
                if (w < 0) throw ValidationError("needs weight negative");
                row += w;
            }
            if (row <= 0.0)
                throw ValidationError(std::string("needs row for ") +
                                      age_bucket_name(AgeBucket(b)) + " has no positive weight");
        }
    }

    // CSV: age_bucket,category,weight
    static NeedsWeights load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open needs file: " + path);
        NeedsWeights n;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            if (line.rfind("age_bucket", 0) == 0) continue;
            std::istringstream ls(line);
            std::string bucket, category, weight;
            if (!std::getline(ls, bucket, ',') || !std::getline(ls, category, ',') ||
                !std::getline(ls, weight))
                throw ParseError("needs line " + std::to_string(line_no) +
                                 ": expected age_bucket,category,weight");
            n.matrix[int(age_bucket_from_name(bucket))][int(category_from_name(category))] =
                std::stod(weight);
        }
        n.validate();
        return n;
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        out << "age_bucket,category,weight\n";
        for (int b = 0; b < kAgeBuckets; ++b)
            for (int c = 0; c < kPoiCategories; ++c)
                out << age_bucket_name(AgeBucket(b)) << ',' << category_name(PoiCategory(c)) << ','
                    << matrix[b][c] << '\n';
    }
};

// All-POI travel-time table. One shortest-path pass per POI; rows are reused
// for destination choice, trip delays, and the per-home kernel.
struct TravelMatrix {
    std::vector<std::vector<double>> seconds_from_poi;  // [poi][node]

    static TravelMatrix build(const StreetGraph& graph, const std::vector<Poi>& pois,
                              unsigned workers = 1) {
        TravelMatrix tm;
        tm.seconds_from_poi.resize(pois.size());
        graph.adjacency();  // materialize before the parallel section
        ThreadPool pool(workers);
        pool.for_each_index(pois.size(), [&](std::size_t p) {
            tm.seconds_from_poi[p] = graph.shortest_times_from(pois[p].node);
        });
        return tm;
    }

    double seconds(u32 poi, u32 node) const { return seconds_from_poi[poi][node]; }
};

// A schedule compiled for fast sampling: per-category frequency tables plus
// mean-normalized calendar weights aggregated from the member POIs.
struct DestinationIndex {
    struct CategoryEntries {
        std::vector<u32> pois;
        std::vector<double> freqs;  // parallel to pois, all > 0
        double total = 0.0;
    };
    std::array<CategoryEntries, kPoiCategories> categories;
    std::array<double, 24> hour_weights{};
    std::array<double, 7> dow_weights{};
    std::array<double, 31> dom_weights{};
    double total_freq = 0.0;
};

inline DestinationIndex build_destination_index(const Schedule& schedule,
                                                const std::vector<Poi>& pois) {
    DestinationIndex idx;
    std::array<double, 24> hourly{};
    std::array<double, 7> dow{};
    std::array<double, 31> dom{};
    for (const auto& [poi, freq] : schedule.entries) {
        if (freq <= 0.0) continue;
        const Poi& p = pois[poi];
        auto& cat = idx.categories[int(p.category)];
        cat.pois.push_back(poi);
        cat.freqs.push_back(freq);
        cat.total += freq;
        idx.total_freq += freq;
        double hour_total = 0.0;
        for (double h : p.hourly_visits) hour_total += h;
        for (int h = 0; h < 24; ++h)
            hourly[h] += hour_total > 0 ? freq * p.hourly_visits[h] / hour_total : 0.0;
        for (int d = 0; d < 7; ++d) dow[d] += freq * p.dow_weights[d];
        for (int d = 0; d < 31; ++d) dom[d] += freq * p.dom_weights[d];
    }
    auto mean_normalize = [](auto& arr) {
        double mean = 0.0;
        for (double v : arr) mean += v;
        mean /= double(arr.size());
        if (mean > 0.0)
            for (double& v : arr) v /= mean;
    };
    mean_normalize(hourly);
    mean_normalize(dow);
    mean_normalize(dom);
    idx.hour_weights = hourly;
    idx.dow_weights = dow;
    idx.dom_weights = dom;
    return idx;
}

// Populate cell schedules from the CBG-level visit patterns. Every cell
// receives its source CBGs' rows scaled by area fraction; splitting goes
// through the same machinery as the overlay so total mass is conserved.
inline void build_cell_schedules(const VisitPatterns& patterns, Tessellation& tess,
                                 const Tessellation& cbg_tess) {
    std::vector<Schedule> cbg_schedules(cbg_tess.n_cells());
    for (const auto& e : patterns.entries) cbg_schedules[e.cbg].add(e.poi, e.weekly_count);

    for (Cell& c : tess.cells) {
        c.schedule = Schedule{};
        if (c.source_cbg_fractions.empty())
            throw ValidationError("cell " + std::to_string(c.id) +
                                  " lacks source_cbg_fractions; attach them before schedules");
    }
    for (u32 cbg = 0; cbg < cbg_tess.n_cells(); ++cbg) {
        std::vector<u32> cell_ids;
        std::vector<double> fractions;
        for (const Cell& c : tess.cells) {
            auto it = c.source_cbg_fractions.find(cbg);
            if (it != c.source_cbg_fractions.end() && it->second > 0.0) {
                cell_ids.push_back(c.id);
                fractions.push_back(it->second);
            }
        }
        if (cell_ids.empty()) continue;
        double sum = 0.0;
        for (double f : fractions) sum += f;
        for (double& f : fractions) f /= sum;
        auto parts = split_schedule(cbg_schedules[cbg], fractions);
        for (std::size_t i = 0; i < cell_ids.size(); ++i) {
            Cell& c = tess.cells[cell_ids[i]];
            for (const auto& [poi, f] : parts[i].entries) c.schedule.add(poi, f);
        }
    }
}

struct Calendar {
    int day_of_month = 0;  // 0-based
    int day_of_week = 0;   // 0-based, 0 = Monday
    int hour = 0;

    static Calendar at(int day, int hour) {
        return {day % 31, day % 7, hour};
    }
};

// Bernoulli trip decision from the multiplicative calendar profile.
inline bool decide_trip(const DestinationIndex& idx, const Calendar& cal, double base_trip_rate,
                        RngStream& rng) {
    double p = base_trip_rate * idx.dom_weights[cal.day_of_month] *
               idx.dow_weights[cal.day_of_week] * idx.hour_weights[cal.hour];
    p = std::clamp(p, 0.0, 1.0);
    return rng.bernoulli(p);
}

// Category from needs, then a POI from the schedule. Local categories prefer
// the five closest candidates by commuting time from the current node.
inline std::optional<u32> choose_destination(const DestinationIndex& idx, AgeBucket bucket,
                                             u32 current_node, const NeedsWeights& needs,
                                             const TravelMatrix& travel, double p_local,
                                             RngStream& rng) {
    std::array<double, kPoiCategories> weights{};
    double total = 0.0;
    for (int c = 0; c < kPoiCategories; ++c) {
        if (idx.categories[c].total > 0.0) {
            weights[c] = needs.matrix[int(bucket)][c];
            total += weights[c];
        }
    }
    if (total <= 0.0) return std::nullopt;
    int cat = int(rng.weighted(weights));
    const auto& entries = idx.categories[cat];

    auto weighted_pick = [&](const std::vector<u32>& pois, const std::vector<double>& freqs) {
        return pois[rng.weighted(freqs)];
    };

    if (is_local_category(PoiCategory(cat)) && entries.pois.size() > 5 &&
        rng.bernoulli(p_local)) {
        // five closest candidates, ties by poi index
        std::vector<u32> order(entries.pois.size());
        for (u32 i = 0; i < order.size(); ++i) order[i] = i;
        std::partial_sort(order.begin(), order.begin() + 5, order.end(), [&](u32 a, u32 b) {
            double ta = travel.seconds(entries.pois[a], current_node);
            double tb = travel.seconds(entries.pois[b], current_node);
            if (ta != tb) return ta < tb;
            return entries.pois[a] < entries.pois[b];
        });
        std::vector<u32> pois(5);
        std::vector<double> freqs(5);
        for (int i = 0; i < 5; ++i) {
            pois[i] = entries.pois[order[i]];
            freqs[i] = entries.freqs[order[i]];
        }
        return weighted_pick(pois, freqs);
    }
    return weighted_pick(entries.pois, entries.freqs);
}

struct DwellSample {
    double minutes = 0.0;
    int bucket = 0;
};

// A zero in the hourly profile means the venue is closed that hour: nobody
// arrives then, and a stay cannot extend into it.
inline bool poi_open_at(const Poi& poi, u32 minute) {
    return poi.hourly_visits[(minute / 60) % 24] > 0.0;
}

// Minutes from `minute` until the next closed hour begins; kNone32 for
// venues that never close.
inline u32 minutes_until_closed(const Poi& poi, u32 minute) {
    u32 h0 = minute / 60;
    for (u32 off = 1; off <= 24; ++off)
        if (poi.hourly_visits[(h0 + off) % 24] == 0.0) return (h0 + off) * 60 - minute;
    return kNone32;
}

inline DwellSample sample_dwell(const Poi& poi, RngStream& rng, double cap_minutes = 480.0) {
    int bucket = int(rng.weighted(poi.dwell_bucket_probs));
    double lo = kDwellBounds[bucket];
    double hi = bucket + 1 < int(std::size(kDwellBounds)) ? kDwellBounds[bucket + 1] : cap_minutes;
    if (bucket == kDwellBuckets - 1) hi = cap_minutes;
    double m = rng.uniform(lo, hi);
    if (m <= lo) m = std::nextafter(lo, hi);  // open lower bound
    return {m, bucket};
}

// Ground-truth schedule for one home: the home CBG's rows re-weighted by a
// commuting-time kernel and renormalized to the CBG's total mass, so homes
// near a POI lean toward it while the cell-level mass is preserved.
inline Schedule build_nt_schedule(u32 home_node, const Schedule& cbg_schedule,
                                  const TravelMatrix& travel, const MobilityConfig& cfg) {
    Schedule out;
    double mass = cbg_schedule.total();
    if (mass <= 0.0) return out;
    double weighted = 0.0;
    for (const auto& [poi, freq] : cbg_schedule.entries) {
        double minutes = travel.seconds(poi, home_node) / 60.0;
        double k = std::pow(1.0 + minutes / cfg.nt_kernel_scale_minutes, -cfg.nt_kernel_exponent);
        out.entries[poi] = freq * k;
        weighted += freq * k;
    }
    if (weighted <= 0.0) return cbg_schedule;
    double scale = mass / weighted;
    for (auto& [poi, f] : out.entries) f *= scale;
    return out;
}

}  // namespace aic
