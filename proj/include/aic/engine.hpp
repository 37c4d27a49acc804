#pragma once

#include <sys/resource.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aic/epidemic.hpp"
#include "aic/event_log.hpp"
#include "aic/mobility.hpp"
#include "aic/population.hpp"
#include "aic/synth_city.hpp"
#include "aic/tessellation.hpp"

namespace aic {

struct LockdownWindow {
    int from_day = 0;
    int to_day = 0;  // exclusive
};

struct ScenarioConfig {
    std::string city_dir;                   // empty means synthesize
    std::optional<SynthCityParams> synth;
    TessKind tessellation = TessKind::CBG;
    double fraction = 1.0;
    bool use_sa = true;
    int days = 7;
    u64 seed = 1;
    unsigned workers = 1;
    std::vector<LockdownWindow> lockdowns;
    std::string seeding_file;
    std::string arrivals_file;
    std::string epi_config_file;
    std::string mobility_config_file;
    std::string needs_file;
    std::string tasks_file;
    std::string actions_file;
    u64 public_transport_seats = kNone64;  // default: population / 10
    double raster_resolution = kDefaultRasterResolution;
    int kmeans_restarts = 4;
    double event_attendees = 50.0;

    void validate() const {
        if (days < 1) throw ConfigError("days must be >= 1");
        if (!(fraction > 0.0) || fraction > 1.0) throw ConfigError("fraction must be in (0,1]");
        if (workers < 1) throw ConfigError("workers must be >= 1");
        if (city_dir.empty() && !synth) throw ConfigError("scenario needs city_dir or synth params");
    }

    static ScenarioConfig from_json(const nlohmann::json& j) {
        ScenarioConfig c;
        auto get = [&](const char* k, auto& field) {
            if (j.contains(k)) field = j.at(k).get<std::decay_t<decltype(field)>>();
        };
        get("city_dir", c.city_dir);
        if (j.contains("synth")) {
            const auto& s = j.at("synth");
            SynthCityParams p;
            if (s.contains("grid_size")) p.grid_size = s.at("grid_size").get<u32>();
            if (s.contains("population")) p.population = s.at("population").get<i64>();
            if (s.contains("seed")) p.seed = s.at("seed").get<u64>();
            if (s.contains("pois_by_category")) {
                p.pois_by_category.clear();
                for (const auto& [k, v] : s.at("pois_by_category").items())
                    p.pois_by_category[category_from_name(k)] = v.get<u32>();
            }
            c.synth = p;
        }
        if (j.contains("tessellation"))
            c.tessellation = tess_kind_from_name(j.at("tessellation").get<std::string>());
        get("fraction", c.fraction);
        get("use_sa", c.use_sa);
        get("days", c.days);
        get("seed", c.seed);
        get("workers", c.workers);
        if (j.contains("lockdowns"))
            for (const auto& w : j.at("lockdowns"))
                c.lockdowns.push_back({w.at("from_day").get<int>(), w.at("to_day").get<int>()});
        get("seeding_file", c.seeding_file);
        get("arrivals_file", c.arrivals_file);
        get("epi_config", c.epi_config_file);
        get("mobility_config", c.mobility_config_file);
        get("needs_file", c.needs_file);
        get("tasks_file", c.tasks_file);
        get("actions_file", c.actions_file);
        get("public_transport_seats", c.public_transport_seats);
        get("raster_resolution", c.raster_resolution);
        get("kmeans_restarts", c.kmeans_restarts);
        get("event_attendees", c.event_attendees);
        c.validate();
        return c;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        if (!city_dir.empty()) j["city_dir"] = city_dir;
        if (synth) {
            nlohmann::json s;
            s["grid_size"] = synth->grid_size;
            s["population"] = synth->population;
            s["seed"] = synth->seed;
            nlohmann::json pc = nlohmann::json::object();
            for (const auto& [cat, n] : synth->pois_by_category) pc[category_name(cat)] = n;
            s["pois_by_category"] = pc;
            j["synth"] = s;
        }
        j["tessellation"] = tess_kind_name(tessellation);
        j["fraction"] = fraction;
        j["use_sa"] = use_sa;
        j["days"] = days;
        j["seed"] = seed;
        j["workers"] = workers;
        if (!lockdowns.empty()) {
            auto arr = nlohmann::json::array();
            for (const auto& w : lockdowns)
                arr.push_back({{"from_day", w.from_day}, {"to_day", w.to_day}});
            j["lockdowns"] = arr;
        }
        if (!seeding_file.empty()) j["seeding_file"] = seeding_file;
        if (!arrivals_file.empty()) j["arrivals_file"] = arrivals_file;
        if (!epi_config_file.empty()) j["epi_config"] = epi_config_file;
        if (!mobility_config_file.empty()) j["mobility_config"] = mobility_config_file;
        if (!needs_file.empty()) j["needs_file"] = needs_file;
        if (!tasks_file.empty()) j["tasks_file"] = tasks_file;
        if (!actions_file.empty()) j["actions_file"] = actions_file;
        if (public_transport_seats != kNone64) j["public_transport_seats"] = public_transport_seats;
        j["raster_resolution"] = raster_resolution;
        j["kmeans_restarts"] = kmeans_restarts;
        j["event_attendees"] = event_attendees;
        return j;
    }

    static ScenarioConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open scenario file: " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("scenario file: ") + e.what());
        }
        return from_json(j);
    }
};

// seeding file: CSV day,cell_id,count where cell_id is a CBG id, so the same
// seeding applies across tessellation choices
struct SeedingPlan {
    struct Row {
        int day;
        u32 cbg;
        i64 count;
    };
    std::vector<Row> rows;

    static SeedingPlan load(const std::string& path, const City& city) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open seeding file: " + path);
        std::unordered_map<std::string, u32> cbg_idx;
        for (u32 c = 0; c < city.n_cbgs(); ++c) cbg_idx[city.cbgs[c].id] = c;
        SeedingPlan plan;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#' || line.rfind("day", 0) == 0) continue;
            std::istringstream ls(line);
            std::string day_s, cell_s, count_s;
            if (!std::getline(ls, day_s, ',') || !std::getline(ls, cell_s, ',') ||
                !std::getline(ls, count_s))
                throw ParseError("seeding line " + std::to_string(line_no) +
                                 ": expected day,cell_id,count");
            auto it = cbg_idx.find(cell_s);
            if (it == cbg_idx.end())
                throw ValidationError("seeding line " + std::to_string(line_no) +
                                      ": unknown cell " + cell_s);
            plan.rows.push_back({std::stoi(day_s), it->second, std::stol(count_s)});
        }
        return plan;
    }
};

struct ArrivalsPlan {
    struct Row {
        i64 count = 0;
        double p_infected = 0.0;
    };
    std::map<int, Row> by_day;

    static ArrivalsPlan load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open arrivals file: " + path);
        ArrivalsPlan plan;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#' || line.rfind("day", 0) == 0) continue;
            std::istringstream ls(line);
            std::string day_s, count_s, p_s;
            if (!std::getline(ls, day_s, ',') || !std::getline(ls, count_s, ',') ||
                !std::getline(ls, p_s))
                throw ParseError("arrivals line " + std::to_string(line_no) +
                                 ": expected day,count,p_infected");
            Row r{std::stol(count_s), std::stod(p_s)};
            if (r.count < 0 || r.p_infected < 0.0 || r.p_infected > 1.0)
                throw ValidationError("arrivals line " + std::to_string(line_no) +
                                      ": count >= 0 and p in [0,1] required");
            plan.by_day[std::stoi(day_s)] = r;
        }
        return plan;
    }
};

// Everything derived from the city that does not depend on the run seed.
struct SimSetup {
    const City* city = nullptr;
    ScenarioConfig cfg;
    Tessellation cbg_tess;  // cells are CBGs, schedules attached
    TravelMatrix travel;
    MobilityConfig mobility;
    NeedsWeights needs = NeedsWeights::defaults();
    TaskConfig tasks = TaskConfig::defaults();
    ActionConfig actions = ActionConfig::defaults();
    EpiConfig epi;
    SeedingPlan seeding;
    ArrivalsPlan arrivals;
    u64 public_seats = 0;
};

inline SimSetup build_setup(const City& city, const ScenarioConfig& cfg, unsigned workers = 1) {
    cfg.validate();
    SimSetup s;
    s.city = &city;
    s.cfg = cfg;
    s.cbg_tess = build_cbg_tessellation(city);
    build_cell_schedules(city.patterns, s.cbg_tess, s.cbg_tess);
    s.travel = TravelMatrix::build(city.graph, city.pois, workers);
    if (!cfg.mobility_config_file.empty()) {
        std::ifstream in(cfg.mobility_config_file);
        if (!in) throw ConfigError("cannot open mobility config: " + cfg.mobility_config_file);
        nlohmann::json j;
        in >> j;
        s.mobility = MobilityConfig::from_json(j);
    }
    if (!cfg.needs_file.empty()) s.needs = NeedsWeights::load(cfg.needs_file);
    if (!cfg.tasks_file.empty()) s.tasks = TaskConfig::load(cfg.tasks_file);
    if (!cfg.actions_file.empty()) s.actions = ActionConfig::load(cfg.actions_file);
    if (!cfg.epi_config_file.empty()) s.epi = EpiConfig::load(cfg.epi_config_file);
    if (!cfg.seeding_file.empty()) s.seeding = SeedingPlan::load(cfg.seeding_file, city);
    if (!cfg.arrivals_file.empty()) s.arrivals = ArrivalsPlan::load(cfg.arrivals_file);
    i64 pop = 0;
    for (const auto& c : city.cbgs) pop += c.population;
    s.public_seats = cfg.public_transport_seats != kNone64 ? cfg.public_transport_seats
                                                           : u64(pop / 10);
    return s;
}

// Build any tessellation variant over a city. The CBG tessellation (with
// schedules attached) anchors the reduced/increased cell counts: reduced
// kinds take the retail/education/religious seed count, increased kinds the
// overlay count.
inline Tessellation build_tessellation_variant(const City& city,
                                               const Tessellation& cbg_with_schedules,
                                               TessKind kind, u64 seed, unsigned workers = 1,
                                               double resolution = kDefaultRasterResolution,
                                               int kmeans_restarts = 4) {
    const Tessellation& cbg = cbg_with_schedules;
    auto vd_seeds_r = [&] {
        return select_vd_seeds_by_category(
            city.pois,
            {PoiCategory::grocery_retail, PoiCategory::education, PoiCategory::religious});
    };
    auto finish = [&](Tessellation t, TessKind k) {
        t.kind = k;
        attach_source_cbg_fractions(t, cbg, city.graph, resolution);
        build_cell_schedules(city.patterns, t, cbg);
        return t;
    };
    auto overlay = [&] {
        return overlay_cbg_vd(cbg, build_network_voronoi(city.graph, vd_seeds_r(), workers),
                              city.graph, resolution);
    };
    switch (kind) {
        case TessKind::NT: {
            Tessellation t = cbg;
            t.kind = TessKind::NT;
            return t;
        }
        case TessKind::CBG:
            return cbg;
        case TessKind::VD_r:
            return finish(build_network_voronoi(city.graph, vd_seeds_r(), workers),
                          TessKind::VD_r);
        case TessKind::VD_s:
            return finish(build_network_voronoi(
                              city.graph, select_vd_seeds_by_frequency(city.pois, cbg.n_cells()),
                              workers),
                          TessKind::VD_s);
        case TessKind::VD_i: {
            u32 target = std::min<u32>(overlay().n_cells(), u32(city.pois.size()));
            return finish(build_network_voronoi(
                              city.graph, select_vd_seeds_by_frequency(city.pois, target),
                              workers),
                          TessKind::VD_i);
        }
        case TessKind::KMEANS_r: {
            u32 k = build_network_voronoi(city.graph, vd_seeds_r(), workers).n_cells();
            return finish(build_kmeans(city.graph, k, seed, kmeans_restarts).tess,
                          TessKind::KMEANS_r);
        }
        case TessKind::KMEANS_s:
            return finish(build_kmeans(city.graph, cbg.n_cells(), seed, kmeans_restarts).tess,
                          TessKind::KMEANS_s);
        case TessKind::KMEANS_i: {
            u32 k = std::min<u32>(overlay().n_cells(), city.graph.size());
            return finish(build_kmeans(city.graph, k, seed, kmeans_restarts).tess,
                          TessKind::KMEANS_i);
        }
        case TessKind::RMCBG: {
            u32 target = build_network_voronoi(city.graph, vd_seeds_r(), workers).n_cells();
            return merge_random_cbgs(cbg, city.graph, std::min(target, cbg.n_cells()), seed);
        }
        case TessKind::CBGVD:
            return overlay();
    }
    throw ConfigError("unknown tessellation kind");
}

// Per-run knobs; everything else comes from the setup.
struct RunParams {
    double fraction = 1.0;
    bool use_sa = true;
    u64 seed = 1;
    unsigned workers = 1;
    int days = -1;  // -1: take from the scenario
};

struct DayStat {
    std::array<u64, kEpiStates> counts{};
    double infected_fraction = 0.0;
    double dead_fraction = 0.0;
};

struct RunMeta {
    double wall_seconds = 0.0;
    u64 peak_memory_bytes = 0;
    u64 population = 0;
    u64 super_agents = 0;
    u64 statuses = 0;
    u64 events = 0;
    u64 infections = 0;
    u64 trips = 0;
    unsigned workers = 1;
    u64 seed = 0;
};

struct RunOutput {
    std::vector<EventRec> events;
    std::vector<DayStat> series;
    RunMeta meta;
    std::vector<u32> sa_k;         // per subject id (residents then visitors)
    std::vector<u32> sa_home_cbg;  // kNone32 for visitors
    u32 resident_sas = 0;

    void write(const std::string& dir) const {
        write_event_log(events, dir + "/events.bin");
        std::ofstream series_out(dir + "/series.csv");
        if (!series_out) throw SimError("cannot write series: " + dir);
        series_out << "day,infected_fraction,dead_fraction\n";
        for (std::size_t d = 0; d < series.size(); ++d) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%zu,%.9f,%.9f\n", d, series[d].infected_fraction,
                          series[d].dead_fraction);
            series_out << buf;
        }
        std::ofstream meta_out(dir + "/run_meta.json");
        nlohmann::json j;
        j["wall_seconds"] = meta.wall_seconds;
        j["peak_memory_bytes"] = meta.peak_memory_bytes;
        j["population"] = meta.population;
        j["super_agents"] = meta.super_agents;
        j["statuses"] = meta.statuses;
        j["events"] = meta.events;
        j["infections"] = meta.infections;
        j["trips"] = meta.trips;
        j["workers"] = meta.workers;
        j["seed"] = meta.seed;
        meta_out << j.dump(2) << '\n';
    }
};

inline u64 peak_rss_bytes() {
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    return u64(ru.ru_maxrss) * 1024;
}

// ---------------------------------------------------------------------------
// Simulation

class Simulation {
public:
    Simulation(const SimSetup& setup, RunParams rp) : setup_(setup), rp_(rp) {
        if (rp_.days < 0) rp_.days = setup.cfg.days;
        if (rp_.workers < 1) rp_.workers = 1;
        build_tessellation();
        build_population();
    }

    // Replace the coarse-grained population before running (testing hook for
    // alternative super-agent constructions).
    void inject_super_agents(const std::vector<SuperAgent>& sas) { init_world(sas); }

    RunOutput run() {
        auto t0 = std::chrono::steady_clock::now();
        if (sa_.empty()) init_world(coarse_grain(population_.agents, tess_.ownership, rp_.fraction,
                                                 rp_.seed, rp_.use_sa));
        ThreadPool pool(rp_.workers);
        for (int day = 0; day < rp_.days; ++day) {
            day_start(day, pool);
            for (int hour = 0; hour < 24; ++hour) {
                hourly_sync(day, hour, pool);
                u32 base = u32(day) * 1440 + u32(hour) * 60;
                for (u32 m = base; m < base + 60; ++m) minute_tick(m, pool);
            }
            daily_rollover(day, pool);
        }
        close_open_visits();

        RunOutput out;
        out.events = std::move(log_);
        out.series = series_;
        out.resident_sas = resident_sas_;
        out.sa_k.reserve(sa_.size());
        out.sa_home_cbg.reserve(sa_.size());
        for (const SaDyn& s : sa_) {
            out.sa_k.push_back(s.status_count);
            out.sa_home_cbg.push_back(s.visitor ? kNone32 : s.home_cbg);
        }
        out.meta.population = population_.agents.size();
        out.meta.super_agents = resident_sas_;
        out.meta.statuses = resident_statuses_;
        out.meta.events = out.events.size();
        out.meta.infections = infections_;
        out.meta.trips = trips_;
        out.meta.workers = rp_.workers;
        out.meta.seed = rp_.seed;
        out.meta.peak_memory_bytes = peak_rss_bytes();
        out.meta.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

    const Tessellation& tessellation() const { return tess_; }
    const Population& population() const { return population_; }

private:
    enum Loc : u8 { kHome = 0, kWork = 1, kPoi = 2, kHospital = 3 };
    static constexpr u32 kNoMinute = kNone32;

    struct SaDyn {
        // static
        u32 home_node = 0, home_cbg = 0, home_cell = 0, household = kNone32;
        u32 work_node = kNone32;
        u32 schedule = 0;  // destination-index slot
        u8 bucket = 1, occupation = 3;
        u32 status_begin = 0, status_count = 0;
        bool visitor = false;
        // dynamic
        bool active = true;
        u8 loc = kHome;
        u32 at_poi = kNone32;
        u32 cur_dwell_min = 0;
        u32 dwell_end = kNoMinute;
        u32 pend_dest = kNone32;  // poi, or work marker
        u32 pend_arrive = kNoMinute;
        u32 pend_dwell = 0;
        bool pend_is_work = false;
        bool pend_enqueued = false;
        bool works_today = false;
        u8 work_start = 0, work_end = 0;
        bool event_today = false;
        u8 event_start = 0;
        u32 event_poi = kNone32;
        u8 event_dur = 0;
        bool home_task_today = false;
        u8 home_start = 0, home_end = 0;
        bool hospitalized = false, quarantined = false;
        bool touch_flag = false;
        float self_protection = 0.2f;
        bool aware = false;
        RngStream rng;
    };

    struct PoiDyn {
        std::vector<u32> occupants;  // sa ids in arrival order
        u32 statuses_present = 0;
        u32 contagious_present = 0;
        std::array<u32, kAgeBuckets> bucket_present{};
        Contamination contamination;
    };

    const SimSetup& setup_;
    RunParams rp_;
    Tessellation tess_;
    Population population_;

    std::vector<DestinationIndex> indices_;      // per cell, or per NT slot
    std::vector<u32> node_schedule_;             // NT: node -> slot
    bool nt_mode_ = false;

    std::vector<SaDyn> sa_;
    std::vector<EpiStatus> statuses_;
    std::vector<RngStream> poi_rng_;
    std::vector<PoiDyn> poi_;
    std::vector<std::vector<u32>> households_;  // household id -> sa ids (residents)
    u32 resident_sas_ = 0;
    u64 resident_statuses_ = 0;

    static constexpr u32 kRing = 2880;  // covers dwell spans across midnight
    std::vector<std::vector<u32>> arrive_ring_ = std::vector<std::vector<u32>>(kRing);
    std::vector<std::vector<u32>> depart_ring_ = std::vector<std::vector<u32>>(kRing);

    std::vector<EventRec> log_;
    std::vector<DayStat> series_;
    u64 infections_ = 0;
    u64 trips_ = 0;
    u32 visitor_counter_ = 0;

    // scratch
    std::vector<std::optional<StateTransition>> transition_slots_;

    void build_tessellation() {
        nt_mode_ = setup_.cfg.tessellation == TessKind::NT;
        tess_ = build_tessellation_variant(*setup_.city, setup_.cbg_tess,
                                           setup_.cfg.tessellation, rp_.seed, rp_.workers,
                                           setup_.cfg.raster_resolution,
                                           setup_.cfg.kmeans_restarts);
    }

    void build_population() { population_ = synthesize_population(*setup_.city, rp_.seed); }

    const DestinationIndex& index_of(const SaDyn& s) const { return indices_[s.schedule]; }

    void init_world(const std::vector<SuperAgent>& sas) {
        const City& city = *setup_.city;
        // destination indices: per cell, or per home node under NT
        indices_.clear();
        if (nt_mode_) {
            node_schedule_.assign(city.graph.size(), kNone32);
            for (const SuperAgent& s : sas) {
                if (node_schedule_[s.home_node] == kNone32) {
                    node_schedule_[s.home_node] = u32(indices_.size());
                    Schedule nt = build_nt_schedule(
                        s.home_node, setup_.cbg_tess.cells[s.home_cbg].schedule, setup_.travel,
                        setup_.mobility);
                    indices_.push_back(build_destination_index(nt, city.pois));
                }
            }
        } else {
            indices_.reserve(tess_.n_cells());
            for (const Cell& c : tess_.cells)
                indices_.push_back(build_destination_index(c.schedule, city.pois));
        }

        sa_.clear();
        sa_.reserve(sas.size());
        statuses_.clear();
        households_.assign(population_.households.size(), {});
        resident_statuses_ = 0;
        for (const SuperAgent& s : sas) {
            SaDyn d;
            d.home_node = s.home_node;
            d.home_cbg = s.home_cbg;
            d.home_cell = s.home_cell;
            d.household = s.household;
            d.work_node = s.work_node;
            d.bucket = u8(s.bucket);
            d.occupation = u8(s.occupation);
            d.schedule = nt_mode_ ? node_schedule_[s.home_node] : s.home_cell;
            d.status_begin = u32(statuses_.size());
            d.status_count = s.k();
            d.self_protection = float(setup_.epi.params.base_self_protection);
            d.rng = RngStream(rp_.seed, salts::agent, sa_.size());
            statuses_.resize(statuses_.size() + s.k());
            households_[s.household].push_back(u32(sa_.size()));
            sa_.push_back(d);
            resident_statuses_ += s.k();
        }
        resident_sas_ = u32(sa_.size());

        poi_.assign(city.pois.size(), PoiDyn{});
        poi_rng_.clear();
        poi_rng_.reserve(city.pois.size());
        for (u32 p = 0; p < city.pois.size(); ++p)
            poi_rng_.emplace_back(rp_.seed, salts::poi, p);
        log_.clear();
        series_.clear();
    }

    bool lockdown_active(int day) const {
        for (const auto& w : setup_.cfg.lockdowns)
            if (day >= w.from_day && day < w.to_day) return true;
        return false;
    }

    // --- day start -------------------------------------------------------

    void day_start(int day, ThreadPool& pool) {
        u32 minute = u32(day) * 1440;
        apply_seeding(day, minute);
        inject_external_arrivals(day, minute);

        DayContext ctx;
        ctx.lockdown = lockdown_active(day);
        ctx.events = events_for_day(rp_.seed, day, resident_statuses_, setup_.city->pois);
        ctx.event_attendance_prob =
            ctx.events.empty() || sa_.empty()
                ? 0.0
                : std::min(1.0, setup_.cfg.event_attendees / double(resident_sas_));

        // force home anyone newly hospitalized or quarantined
        for (u32 i = 0; i < resident_sas_; ++i) {
            SaDyn& s = sa_[i];
            const EpiStatus& lead = statuses_[s.status_begin];
            s.hospitalized = lead.hospitalized;
            s.quarantined = lead.self_quarantined;
            if (s.hospitalized || s.quarantined) {
                if (s.loc == kPoi) depart_poi(i, minute);
                cancel_pending(i);
                s.loc = s.hospitalized ? kHospital : kHome;
            } else if (s.loc == kHospital) {
                s.loc = kHome;
            }
        }

        pool.for_range(resident_sas_, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                SaDyn& s = sa_[i];
                AgentCondition cond{s.hospitalized, s.quarantined};
                auto tasks = assign_daily_tasks(Occupation(s.occupation), cond, setup_.tasks, ctx,
                                                s.rng);
                s.works_today = false;
                s.event_today = false;
                s.home_task_today = false;
                for (const Task& t : tasks) {
                    if (t.kind == TaskKind::Work || t.kind == TaskKind::TreatPatients) {
                        s.works_today = s.work_node != kNone32;
                        s.work_start = u8(t.start_hour);
                        s.work_end = u8(std::min(24, t.start_hour + t.duration_hours));
                    } else if (t.kind == TaskKind::AttendEvent) {
                        s.event_today = true;
                        s.event_start = u8(t.start_hour);
                        s.event_poi = t.poi;
                        s.event_dur = u8(t.duration_hours);
                    } else if (t.kind == TaskKind::StayHome && t.duration_hours <= 12 &&
                               t.start_hour > 0) {
                        s.home_task_today = true;
                        s.home_start = u8(t.start_hour);
                        s.home_end = u8(std::min(24, t.start_hour + t.duration_hours));
                    }
                }
            }
        });
    }

    void apply_seeding(int day, u32 minute) {
        for (const auto& row : setup_.seeding.rows) {
            if (row.day != day) continue;
            i64 remaining = row.count;
            for (u32 i = 0; i < resident_sas_ && remaining > 0; ++i) {
                SaDyn& s = sa_[i];
                if (s.home_cbg != row.cbg) continue;
                for (u32 k = 0; k < s.status_count && remaining > 0; ++k) {
                    EpiStatus& st = statuses_[s.status_begin + k];
                    if (st.state != EpiState::Susceptible || st.pending_infection) continue;
                    st.state = EpiState::InfectedNonContagious;
                    st.infection_day = day;
                    ++infections_;
                    log_.push_back({minute, EventKind::state_change, i, s.home_cell,
                                    (u64(k) << 16) | (u64(EpiState::Susceptible) << 8) |
                                        u64(EpiState::InfectedNonContagious)});
                    --remaining;
                }
            }
        }
    }

    void inject_external_arrivals(int day, u32 minute) {
        auto it = setup_.arrivals.by_day.find(day);
        if (it == setup_.arrivals.by_day.end() || it->second.count == 0) return;
        const City& city = *setup_.city;
        std::vector<double> poi_w;
        poi_w.reserve(city.pois.size());
        for (const Poi& p : city.pois) poi_w.push_back(p.weekly_visit_total());
        for (i64 v = 0; v < it->second.count; ++v) {
            RngStream rng(rp_.seed, salts::agent, 0x9000000000ull + visitor_counter_);
            ++visitor_counter_;
            u32 poi = u32(rng.weighted(poi_w));
            int hour = int(rng.weighted({city.pois[poi].hourly_visits.begin(),
                                         city.pois[poi].hourly_visits.end()}));
            u32 arrive = minute + u32(hour) * 60 + u32(rng.below(60));
            DwellSample dwell = sample_dwell(city.pois[poi], rng, setup_.mobility.dwell_cap_minutes);
            dwell.minutes = std::min(dwell.minutes,
                                     double(minutes_until_closed(city.pois[poi], arrive)));
            bool infected = rng.bernoulli(it->second.p_infected);

            SaDyn d;
            d.visitor = true;
            d.home_node = city.pois[poi].node;
            d.home_cbg = kNone32;
            d.home_cell = 0;
            d.household = kNone32;
            d.schedule = 0;
            d.status_begin = u32(statuses_.size());
            d.status_count = 1;
            d.pend_dest = poi;
            d.pend_arrive = arrive;
            d.pend_dwell = std::max<u32>(1, u32(std::lround(dwell.minutes)));
            d.self_protection = float(setup_.epi.params.base_self_protection);
            d.rng = rng;
            EpiStatus st;
            if (infected) st.state = EpiState::InfectedAsymptomatic;
            statuses_.push_back(st);
            u32 id = u32(sa_.size());
            sa_.push_back(d);
            arrive_ring_[arrive % kRing].push_back(id);
            log_.push_back({minute, EventKind::external_arrival, id, poi, u64(infected)});
        }
    }

    // --- hourly synchronization ------------------------------------------

    u32 commute_minutes(const SaDyn& s) const {
        const City& city = *setup_.city;
        double meters =
            dist(city.graph.nodes[s.home_node].position, city.graph.nodes[s.work_node].position);
        return std::min<u32>(59, u32(meters / 10.0 / 60.0));
    }

    bool busy_hour(const SaDyn& s, int hour) const {
        if (s.works_today && hour >= s.work_start && hour < s.work_end) return true;
        if (s.event_today && hour >= s.event_start && hour < s.event_start + s.event_dur)
            return true;
        if (s.home_task_today && hour >= s.home_start && hour < s.home_end) return true;
        return false;
    }

    // Earliest scheduled obligation strictly after `hour`, as an absolute
    // minute; visits must wrap up before it.
    u32 next_commitment_minute(const SaDyn& s, int day, int hour) const {
        u32 best = kNoMinute;
        auto consider = [&](bool active, u8 start) {
            if (active && int(start) > hour)
                best = std::min(best, u32(day) * 1440 + u32(start) * 60);
        };
        consider(s.works_today, s.work_start);
        consider(s.event_today, s.event_start);
        consider(s.home_task_today, s.home_start);
        return best;
    }

    void cancel_pending(u32 i) {
        SaDyn& s = sa_[i];
        if (s.pend_arrive != kNoMinute) {
            auto& bucket = arrive_ring_[s.pend_arrive % kRing];
            bucket.erase(std::remove(bucket.begin(), bucket.end(), i), bucket.end());
            s.pend_arrive = kNoMinute;
            s.pend_dest = kNone32;
            s.pend_is_work = false;
            s.pend_enqueued = false;
        }
    }

    void hourly_sync(int day, int hour, ThreadPool& pool) {
        u32 base = u32(day) * 1440 + u32(hour) * 60;

        // work departures, then commute starts (serial, id order)
        for (u32 i = 0; i < resident_sas_; ++i) {
            SaDyn& s = sa_[i];
            if (!s.active) continue;
            if (s.loc == kWork && (!s.works_today || hour >= s.work_end)) s.loc = kHome;
            if (s.loc == kHome && s.works_today && hour == s.work_start &&
                s.pend_arrive == kNoMinute && s.work_node != s.home_node) {
                s.pend_is_work = true;
                s.pend_dest = kNone32;
                s.pend_arrive = base + commute_minutes(s);
                s.pend_enqueued = true;
                arrive_ring_[s.pend_arrive % kRing].push_back(i);
            }
            // work-from-home counts as busy without moving
        }

        // event and discretionary trips, parallel over SAs with private streams
        Calendar cal = Calendar::at(day, hour);
        bool lockdown = lockdown_active(day);
        pool.for_range(sa_.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                SaDyn& s = sa_[i];
                if (!s.active) continue;
                if (s.loc == kPoi) {
                    s.touch_flag = draw_touch(s);
                    continue;
                }
                if (s.visitor || s.loc != kHome || s.hospitalized || s.quarantined) continue;
                if (s.pend_arrive != kNoMinute) continue;
                if (s.event_today && hour == s.event_start) {
                    u32 arrive = base + u32(setup_.travel.seconds(s.event_poi, s.home_node) /
                                            60.0);
                    const Poi& venue = setup_.city->pois[s.event_poi];
                    if (poi_open_at(venue, arrive)) {
                        s.pend_dest = s.event_poi;
                        s.pend_is_work = false;
                        s.pend_arrive = arrive;
                        s.pend_dwell = std::min<u32>(u32(s.event_dur) * 60,
                                                     minutes_until_closed(venue, arrive));
                    }
                    continue;
                }
                if (busy_hour(s, hour)) continue;
                const DestinationIndex& idx = index_of(s);
                if (!decide_trip(idx, cal, setup_.mobility.base_trip_rate, s.rng)) continue;
                auto dest = choose_destination(idx, AgeBucket(s.bucket), s.home_node, setup_.needs,
                                               setup_.travel, setup_.mobility.p_local, s.rng);
                if (!dest) continue;
                if (lockdown) {
                    // stay-at-home order: essential destinations only
                    PoiCategory cat = setup_.city->pois[*dest].category;
                    if (cat != PoiCategory::grocery_retail && cat != PoiCategory::medical)
                        continue;
                }
                const Poi& venue = setup_.city->pois[*dest];
                // commuting time delays the arrival; long hauls land in later
                // hours
                double travel_min = setup_.travel.seconds(*dest, s.home_node) / 60.0;
                u32 arrive = base + u32(travel_min);
                if (!poi_open_at(venue, arrive)) continue;
                DwellSample dwell =
                    sample_dwell(venue, s.rng, setup_.mobility.dwell_cap_minutes);
                // longer commutes are amortized with longer stays
                dwell.minutes *=
                    1.0 + setup_.mobility.dwell_travel_amortization * travel_min / 60.0;
                u32 dwell_min = std::max<u32>(1, u32(std::lround(dwell.minutes)));
                // stays end when the venue closes and before the next
                // scheduled obligation
                dwell_min = std::min(dwell_min, minutes_until_closed(venue, arrive));
                u32 commitment = next_commitment_minute(s, day, hour);
                if (commitment != kNoMinute) {
                    if (arrive + 1 >= commitment) continue;  // no time for the trip
                    dwell_min = std::min(dwell_min, commitment - arrive);
                }
                s.pend_dest = *dest;
                s.pend_is_work = false;
                s.pend_arrive = arrive;
                s.pend_dwell = dwell_min;
            }
        });

        // serial: enqueue trips decided this hour in id order, log decisions
        std::vector<u32> travelers;
        for (u32 i = 0; i < resident_sas_; ++i) {
            SaDyn& s = sa_[i];
            if (s.pend_arrive == kNoMinute) continue;
            if (s.pend_is_work) {
                if (s.pend_arrive >= base && s.pend_arrive < base + 60) travelers.push_back(i);
            } else if (s.pend_dest != kNone32 && !s.pend_enqueued) {
                s.pend_enqueued = true;
                arrive_ring_[s.pend_arrive % kRing].push_back(i);
                log_.push_back({base, EventKind::trip_decision, i, s.pend_dest, u64(s.pend_dwell)});
                ++trips_;
                travelers.push_back(i);
            }
        }

        // transport seats and in-vehicle contacts
        if (!travelers.empty()) {
            RngStream seat_rng(rp_.seed, salts::group,
                               0x7E000000ull + u64(day) * 24 + u64(hour));
            SeatAssignment seats =
                assign_transport_seats(travelers, setup_.public_seats, seat_rng);
            for (const Group& g : seats.groups)
                group_transmission(g.members, base, 1.0, seat_rng);
        }

        // workplace groups
        std::map<u32, std::vector<u32>> by_work_node;
        for (u32 i = 0; i < resident_sas_; ++i)
            if (sa_[i].active && sa_[i].loc == kWork) by_work_node[sa_[i].work_node].push_back(i);
        std::vector<std::pair<u32, std::vector<u32>>> work_nodes(by_work_node.begin(),
                                                                 by_work_node.end());
        std::vector<std::vector<EventRec>> work_events(work_nodes.size());
        pool.for_range(work_nodes.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t w = b; w < e; ++w) {
                RngStream rng(rp_.seed, salts::group,
                              0x300000000ull + (u64(work_nodes[w].first) << 20) +
                                  u64(day) * 24 + u64(hour));
                auto groups = partition_work_groups(work_nodes[w].second, rng);
                for (const Group& g : groups)
                    group_transmission_buffered(g.members, base, 1.0 / 8.0, rng, work_events[w]);
            }
        });
        for (auto& ev : work_events)
            for (const EventRec& e : ev) {
                log_.push_back(e);
                ++infections_;
            }

        // household contacts for members at home
        std::vector<std::vector<EventRec>> hh_events(households_.size());
        pool.for_range(households_.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t h = b; h < e; ++h) {
                std::vector<u32> at_home;
                for (u32 i : households_[h])
                    if (sa_[i].active && sa_[i].loc == kHome) at_home.push_back(i);
                if (at_home.size() < 1) continue;
                RngStream rng(rp_.seed, salts::group,
                              0x500000000ull + (u64(h) << 18) + u64(day) * 24 + u64(hour));
                group_transmission_buffered(at_home, base, 1.0, rng, hh_events[h]);
            }
        });
        for (auto& ev : hh_events)
            for (const EventRec& e : ev) {
                log_.push_back(e);
                ++infections_;
            }
    }

    bool draw_touch(SaDyn& s) {
        const ActionTemplate& t =
            setup_.actions.templates[int(ActionKind::TouchContaminatedObject)];
        double p = s.rng.uniform(t.prob_lo, t.prob_hi) * (1.0 - s.self_protection);
        return s.rng.bernoulli(p);
    }

    // Action-mediated transmission inside one co-located group for one hour.
    void group_transmission(const std::vector<u32>& members, u32 minute, double scale,
                            RngStream& rng) {
        std::vector<EventRec> buf;
        group_transmission_buffered(members, minute, scale, rng, buf);
        for (const EventRec& e : buf) {
            log_.push_back(e);
            ++infections_;
        }
    }

    void group_transmission_buffered(const std::vector<u32>& members, u32 minute, double scale,
                                     RngStream& rng, std::vector<EventRec>& events) {
        u32 contagious = 0;
        for (u32 i : members) {
            const SaDyn& s = sa_[i];
            for (u32 k = 0; k < s.status_count; ++k)
                contagious += is_contagious(statuses_[s.status_begin + k].state);
        }
        if (contagious == 0) return;
        const EpiParams& ep = setup_.epi.params;
        for (u32 src : members) {
            const SaDyn& s = sa_[src];
            u32 src_contagious = 0;
            for (u32 k = 0; k < s.status_count; ++k)
                src_contagious += is_contagious(statuses_[s.status_begin + k].state);
            if (src_contagious == 0) continue;
            auto actions = generate_actions(s.self_protection, setup_.actions, rng);
            for (const ActionEvent& a : actions) {
                if (!is_risk_action(a.kind) || a.effect_on_others <= 0.0) continue;
                for (u32 c = 0; c < src_contagious; ++c) {
                    for (u32 dst : members) {
                        SaDyn& v = sa_[dst];
                        for (u32 k = 0; k < v.status_count; ++k) {
                            EpiStatus& st = statuses_[v.status_begin + k];
                            if (st.state != EpiState::Susceptible || st.pending_infection)
                                continue;
                            double p = ep.action_effective_prob * ep.action_transmission_prob *
                                       a.effect_on_others * (1.0 - v.self_protection) * scale;
                            if (rng.bernoulli(p)) {
                                st.pending_infection = true;
                                events.push_back({minute, EventKind::infection, dst,
                                                  u64(v.home_cell), u64(k)});
                            }
                        }
                    }
                }
            }
        }
    }

    // --- minute tick -------------------------------------------------------

    void arrive_poi(u32 i, u32 minute) {
        SaDyn& s = sa_[i];
        u32 poi = s.pend_dest;
        s.loc = kPoi;
        s.at_poi = poi;
        s.cur_dwell_min = s.pend_dwell;
        s.dwell_end = minute + s.pend_dwell;
        s.pend_arrive = kNoMinute;
        s.pend_dest = kNone32;
        s.pend_enqueued = false;
        depart_ring_[s.dwell_end % kRing].push_back(i);
        PoiDyn& p = poi_[poi];
        p.occupants.push_back(i);
        p.statuses_present += s.status_count;
        p.bucket_present[s.bucket] += s.status_count;
        for (u32 k = 0; k < s.status_count; ++k)
            p.contagious_present += is_contagious(statuses_[s.status_begin + k].state);
        s.touch_flag = draw_touch(s);
        log_.push_back({minute, EventKind::arrive_poi, i, poi, u64(s.status_count)});
    }

    // Stale ring entries are filtered by the dwell_end/pend_arrive checks, so
    // departures never need to scrub the ring.
    void depart_poi(u32 i, u32 minute) {
        SaDyn& s = sa_[i];
        u32 poi = s.at_poi;
        PoiDyn& p = poi_[poi];
        p.occupants.erase(std::remove(p.occupants.begin(), p.occupants.end(), i),
                          p.occupants.end());
        p.statuses_present -= s.status_count;
        p.bucket_present[s.bucket] -= s.status_count;
        for (u32 k = 0; k < s.status_count; ++k)
            p.contagious_present -= is_contagious(statuses_[s.status_begin + k].state);
        log_.push_back({minute, EventKind::depart_poi, i, poi, u64(s.status_count)});
        s.loc = kHome;
        s.at_poi = kNone32;
        s.dwell_end = kNoMinute;
        if (s.visitor) s.active = false;
    }

    void minute_tick(u32 minute, ThreadPool& pool) {
        // departures (dwell expiry), id order
        {
            auto& bucket = depart_ring_[minute % kRing];
            std::vector<u32> due;
            for (u32 i : bucket)
                if (sa_[i].loc == kPoi && sa_[i].dwell_end == minute) due.push_back(i);
            std::sort(due.begin(), due.end());
            due.erase(std::unique(due.begin(), due.end()), due.end());
            bucket.clear();
            for (u32 i : due) depart_poi(i, minute);
        }
        // arrivals, id order
        {
            auto& bucket = arrive_ring_[minute % kRing];
            std::vector<u32> due;
            for (u32 i : bucket)
                if (sa_[i].pend_arrive == minute) due.push_back(i);
            std::sort(due.begin(), due.end());
            due.erase(std::unique(due.begin(), due.end()), due.end());
            bucket.clear();
            for (u32 i : due) {
                SaDyn& s = sa_[i];
                if (s.pend_is_work) {
                    s.loc = kWork;
                    s.pend_arrive = kNoMinute;
                    s.pend_is_work = false;
                    s.pend_enqueued = false;
                } else {
                    arrive_poi(i, minute);
                }
            }
        }
        exposure_step(minute, pool);
    }

    void exposure_step(u32 minute, ThreadPool& pool) {
        int hour = int((minute / 60) % 24);
        const City& city = *setup_.city;
        const ContactParams& cp = setup_.epi.contact;
        const ContaminationParams& cn = setup_.epi.contamination;

        std::vector<u32> active_pois;
        for (u32 p = 0; p < poi_.size(); ++p) {
            PoiDyn& pd = poi_[p];
            if (pd.occupants.empty()) continue;
            if (pd.contagious_present == 0 && pd.contamination.level < 1e-12) continue;
            active_pois.push_back(p);
        }
        if (active_pois.empty()) return;

        std::vector<std::vector<EventRec>> local(active_pois.size());
        pool.for_range(active_pois.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t ap = b; ap < e; ++ap) {
                u32 pid = active_pois[ap];
                PoiDyn& pd = poi_[pid];
                const Poi& poi = city.pois[pid];
                RngStream& rng = poi_rng_[pid];

                if (pd.contagious_present > 0)
                    pd.contamination.deposit(minute, pd.contagious_present, cn);
                else
                    pd.contamination.decay_to(minute, cn);

                double i_f = pd.statuses_present
                                 ? double(pd.contagious_present) / double(pd.statuses_present)
                                 : 0.0;
                double delta = density(poi, hour);
                double d = pair_distance(delta, cp.max_pair_distance);
                double surface_p = surface_infection_probability(pd.contamination.level, cn);

                for (u32 i : pd.occupants) {
                    SaDyn& s = sa_[i];
                    bool any_susceptible = false;
                    for (u32 k = 0; k < s.status_count; ++k) {
                        const EpiStatus& st = statuses_[s.status_begin + k];
                        if (st.state == EpiState::Susceptible && !st.pending_infection)
                            any_susceptible = true;
                    }
                    if (!any_susceptible) continue;

                    double p_min = 0.0;
                    if (i_f > 0.0) {
                        bool masked = s.self_protection >= cp.mask_threshold;
                        double pc = pc_lookup(cp, d, masked);
                        double c = cp.contact_rate(AgeBucket(s.bucket), pd.bucket_present, hour);
                        double p_visit = transmission_probability(
                            pc, c, double(s.cur_dwell_min) / 60.0, i_f);
                        p_min = per_minute_probability(p_visit, double(s.cur_dwell_min));
                    }
                    double p_total = p_min;
                    if (s.touch_flag && surface_p > 0.0)
                        p_total = 1.0 - (1.0 - p_min) * (1.0 - surface_p);
                    if (p_total <= 0.0) continue;

                    for (u32 k = 0; k < s.status_count; ++k) {
                        EpiStatus& st = statuses_[s.status_begin + k];
                        if (st.state != EpiState::Susceptible || st.pending_infection) continue;
                        if (rng.bernoulli(p_total)) {
                            st.pending_infection = true;
                            local[ap].push_back(
                                {minute, EventKind::infection, i, pid, u64(k)});
                        }
                    }
                }
            }
        });
        for (auto& buf : local)
            for (const EventRec& e : buf) {
                log_.push_back(e);
                ++infections_;
            }
    }

    // --- daily rollover ----------------------------------------------------

    void daily_rollover(int day, ThreadPool& pool) {
        u32 minute = u32(day) * 1440 + 1439;
        transition_slots_.assign(statuses_.size(), std::nullopt);
        pool.for_range(sa_.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                SaDyn& s = sa_[i];
                if (!s.active && !s.visitor) continue;
                for (u32 k = 0; k < s.status_count; ++k) {
                    u32 idx = s.status_begin + k;
                    transition_slots_[idx] =
                        daily_state_update(statuses_[idx], day, setup_.epi.params, s.rng);
                }
            }
        });
        // serial log pass, status order == SA order
        for (u32 i = 0; i < sa_.size(); ++i) {
            const SaDyn& s = sa_[i];
            for (u32 k = 0; k < s.status_count; ++k) {
                const auto& tr = transition_slots_[s.status_begin + k];
                if (!tr) continue;
                log_.push_back({minute, EventKind::state_change, i, u64(s.home_cell),
                                (u64(k) << 16) | (u64(tr->from) << 8) | u64(tr->to)});
            }
        }
        // contagiousness changed; refresh POI counters
        for (PoiDyn& p : poi_) {
            if (p.occupants.empty()) continue;
            p.contagious_present = 0;
            for (u32 i : p.occupants) {
                const SaDyn& s = sa_[i];
                for (u32 k = 0; k < s.status_count; ++k)
                    p.contagious_present += is_contagious(statuses_[s.status_begin + k].state);
            }
        }
        update_awareness();
        record_day_stats();
    }

    void update_awareness() {
        // households and workplace cohorts raise protection once a symptomatic
        // member is visible
        auto bump = [&](u32 i) {
            SaDyn& s = sa_[i];
            if (s.aware) return;
            s.aware = true;
            s.self_protection = std::min(1.0f, s.self_protection + 0.1f);
        };
        for (const auto& members : households_) {
            bool symptomatic = false;
            for (u32 i : members)
                for (u32 k = 0; k < sa_[i].status_count && !symptomatic; ++k)
                    symptomatic |= statuses_[sa_[i].status_begin + k].state ==
                                   EpiState::InfectedSymptomatic;
            if (symptomatic)
                for (u32 i : members) bump(i);
        }
        std::map<u32, std::vector<u32>> cohorts;
        for (u32 i = 0; i < resident_sas_; ++i)
            if (sa_[i].work_node != kNone32 && sa_[i].work_node != sa_[i].home_node)
                cohorts[sa_[i].work_node].push_back(i);
        for (const auto& [node, members] : cohorts) {
            bool symptomatic = false;
            for (u32 i : members)
                for (u32 k = 0; k < sa_[i].status_count && !symptomatic; ++k)
                    symptomatic |= statuses_[sa_[i].status_begin + k].state ==
                                   EpiState::InfectedSymptomatic;
            if (symptomatic)
                for (u32 i : members) bump(i);
        }
    }

    void record_day_stats() {
        DayStat stat;
        for (u32 i = 0; i < resident_sas_; ++i) {
            const SaDyn& s = sa_[i];
            for (u32 k = 0; k < s.status_count; ++k)
                ++stat.counts[int(statuses_[s.status_begin + k].state)];
        }
        u64 total = 0;
        for (u64 c : stat.counts) total += c;
        if (total != resident_statuses_)
            throw SimError("status conservation violated: " + std::to_string(total) + " != " +
                           std::to_string(resident_statuses_));
        u64 infected = stat.counts[int(EpiState::InfectedNonContagious)] +
                       stat.counts[int(EpiState::InfectedSymptomatic)] +
                       stat.counts[int(EpiState::InfectedAsymptomatic)];
        stat.infected_fraction = double(infected) / double(total);
        stat.dead_fraction = double(stat.counts[int(EpiState::Dead)]) / double(total);
        series_.push_back(stat);
    }

    void close_open_visits() {
        u32 final_minute = u32(rp_.days) * 1440 - 1;
        for (u32 i = 0; i < sa_.size(); ++i)
            if (sa_[i].loc == kPoi) depart_poi(i, final_minute);
    }
};

inline RunOutput run_scenario(const SimSetup& setup, const RunParams& rp) {
    Simulation sim(setup, rp);
    return sim.run();
}

inline RunOutput run_scenario(const SimSetup& setup) {
    RunParams rp;
    rp.fraction = setup.cfg.fraction;
    rp.use_sa = setup.cfg.use_sa;
    rp.seed = setup.cfg.seed;
    rp.workers = setup.cfg.workers;
    rp.days = setup.cfg.days;
    return run_scenario(setup, rp);
}

// Replication harness: seeds base..base+n-1, reduced through `consume`,
// optionally with several replications in flight.
inline void run_replications(const SimSetup& setup, RunParams rp, int n, u64 base_seed,
                             unsigned concurrent,
                             const std::function<void(int, RunOutput&&)>& consume) {
    if (n < 1) throw ConfigError("replications must be >= 1");
    std::mutex mu;
    ThreadPool pool(concurrent);
    pool.for_each_index(std::size_t(n), [&](std::size_t rep) {
        RunParams r = rp;
        r.seed = base_seed + rep;
        RunOutput out = run_scenario(setup, r);
        std::unique_lock lk(mu);
        consume(int(rep), std::move(out));
    });
}

}  // namespace aic
