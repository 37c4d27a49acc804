#include <catch2/catch_amalgamated.hpp>

#include "aic/engine.hpp"
#include "test_util.hpp"

using namespace aic;

namespace {

struct Fixture {
    TempDir td;
    City city;
    SimSetup setup;

    explicit Fixture(TessKind kind = TessKind::CBG, i64 pop = 800, int days = 2,
                     bool with_seeding = true, const std::string& arrivals = "") {
        SynthCityParams params;
        params.grid_size = 8;
        params.population = pop;
        params.seed = 5;
        city = generate_synthetic_city(params);

        ScenarioConfig cfg;
        cfg.synth = params;
        cfg.tessellation = kind;
        cfg.days = days;
        cfg.seed = 11;
        if (with_seeding) {
            std::string rows = "day,cell_id,count\n0," + city.cbgs[0].id + ",5\n";
            cfg.seeding_file = td.file("seeding.csv", rows);
        }
        if (!arrivals.empty()) cfg.arrivals_file = td.file("arrivals.csv", arrivals);
        setup = build_setup(city, cfg);
    }
};

// audit helper: arrive/depart pairing and per-poi occupancy from the log
void audit_log(const RunOutput& out) {
    std::map<u64, std::pair<bool, u64>> at_poi;  // sa -> (present, poi)
    u32 prev_minute = 0;
    u64 arrivals = 0, departures = 0;
    for (const EventRec& e : out.events) {
        REQUIRE(e.minute >= prev_minute);
        prev_minute = e.minute;
        if (e.kind == EventKind::arrive_poi) {
            REQUIRE_FALSE(at_poi[e.subject].first);
            at_poi[e.subject] = {true, e.place};
            ++arrivals;
        } else if (e.kind == EventKind::depart_poi) {
            REQUIRE(at_poi[e.subject].first);
            REQUIRE(at_poi[e.subject].second == e.place);
            at_poi[e.subject].first = false;
            ++departures;
        }
    }
    REQUIRE(arrivals == departures);
    for (const auto& [sa, state] : at_poi) REQUIRE_FALSE(state.first);
}

}  // namespace

TEST_CASE("no infection source means a flat zero series") {
    Fixture f(TessKind::CBG, 500, 2, /*with_seeding=*/false);
    RunOutput out = run_scenario(f.setup);
    REQUIRE(out.series.size() == 2);
    for (const DayStat& d : out.series) {
        REQUIRE(d.infected_fraction == 0.0);
        REQUIRE(d.dead_fraction == 0.0);
    }
    REQUIRE(out.meta.infections == 0);
}

TEST_CASE("event logs are byte-identical across worker counts") {
    Fixture f;
    RunParams rp;
    rp.seed = f.setup.cfg.seed;
    rp.workers = 1;
    RunOutput ref = run_scenario(f.setup, rp);
    REQUIRE(ref.meta.infections > 0);  // seeded epidemic actually spreads
    for (unsigned w : {4u, 8u}) {
        RunParams rw = rp;
        rw.workers = w;
        RunOutput out = run_scenario(f.setup, rw);
        REQUIRE(out.events == ref.events);
        REQUIRE(out.series.size() == ref.series.size());
        for (std::size_t d = 0; d < ref.series.size(); ++d) {
            REQUIRE(out.series[d].infected_fraction == ref.series[d].infected_fraction);
            REQUIRE(out.series[d].counts == ref.series[d].counts);
        }
    }
}

TEST_CASE("fraction one equals a pre-grouped k=1 construction") {
    Fixture f;
    RunParams rp;
    rp.seed = f.setup.cfg.seed;
    RunOutput a = run_scenario(f.setup, rp);

    Simulation sim(f.setup, rp);
    std::vector<SuperAgent> manual;
    for (const Agent& ag : sim.population().agents) {
        SuperAgent s;
        s.id = u32(manual.size());
        s.home_cell = sim.tessellation().ownership[ag.home_node];
        s.home_cbg = ag.home_cbg;
        s.home_node = ag.home_node;
        s.household = ag.household;
        s.bucket = ag.bucket;
        s.occupation = ag.occupation;
        s.age = ag.age;
        s.daytime_cbg = ag.daytime_cbg;
        s.work_node = ag.work_node;
        s.represented = {ag.id};
        manual.push_back(std::move(s));
    }
    sim.inject_super_agents(manual);
    RunOutput b = sim.run();
    REQUIRE(a.events == b.events);
}

TEST_CASE("arrive and depart events stay balanced and ordered") {
    Fixture f(TessKind::CBG, 800, 2);
    RunOutput out = run_scenario(f.setup);
    REQUIRE(out.meta.trips > 0);
    audit_log(out);
}

TEST_CASE("series length equals the simulated days and conserves statuses") {
    Fixture f(TessKind::CBG, 600, 3);
    RunOutput out = run_scenario(f.setup);
    REQUIRE(out.series.size() == 3);
    for (const DayStat& d : out.series) {
        u64 total = 0;
        for (u64 c : d.counts) total += c;
        REQUIRE(total == out.meta.statuses);
    }
}

TEST_CASE("coarse-grained runs conserve statuses and reduce presences") {
    Fixture f(TessKind::CBG, 1000, 2);
    for (double fraction : {0.75, 0.5, 0.25, 0.1}) {
        RunParams rp;
        rp.seed = 3;
        rp.fraction = fraction;
        RunOutput out = run_scenario(f.setup, rp);
        REQUIRE(out.meta.statuses == out.meta.population);
        REQUIRE(out.meta.super_agents < out.meta.population);
        u64 expected_sas = 0;
        (void)expected_sas;
        for (const DayStat& d : out.series) {
            u64 total = 0;
            for (u64 c : d.counts) total += c;
            REQUIRE(total == out.meta.population);
        }
    }
}

TEST_CASE("external arrivals come, count toward exposure, and leave") {
    std::string arrivals = "day,count,p_infected\n0,10,1.0\n1,0,0.0\n";
    Fixture f(TessKind::CBG, 400, 2, /*with_seeding=*/false, arrivals);
    RunOutput out = run_scenario(f.setup);

    u64 visitor_events = 0;
    std::map<u64, u32> visitor_arrive, visitor_depart;
    for (const EventRec& e : out.events) {
        if (e.kind == EventKind::external_arrival) {
            ++visitor_events;
            REQUIRE(e.payload == 1);  // p_infected = 1 makes every visitor contagious
        }
        if (e.subject >= out.resident_sas) {
            if (e.kind == EventKind::arrive_poi) visitor_arrive[e.subject] = e.minute;
            if (e.kind == EventKind::depart_poi) visitor_depart[e.subject] = e.minute;
        }
    }
    REQUIRE(visitor_events == 10);
    REQUIRE(visitor_arrive.size() == 10);
    // every visitor departs and never stays beyond its dwell
    for (const auto& [sa, arr] : visitor_arrive) {
        REQUIRE(visitor_depart.count(sa));
        REQUIRE(visitor_depart[sa] >= arr);
    }
    // infected visitors can seed local infections
    REQUIRE(out.sa_k.size() == out.resident_sas + 10);
}

TEST_CASE("zero-count arrival days create no visitors") {
    std::string arrivals = "day,count,p_infected\n0,0,0.5\n";
    Fixture f(TessKind::CBG, 400, 1, false, arrivals);
    RunOutput out = run_scenario(f.setup);
    REQUIRE(out.sa_k.size() == out.resident_sas);
}

TEST_CASE("seeding starts the epidemic in the named cell on day zero") {
    Fixture f;
    RunOutput out = run_scenario(f.setup);
    REQUIRE(out.series[0].counts[int(EpiState::InfectedNonContagious)] > 0);
    REQUIRE(out.series[0].infected_fraction > 0.0);
}

TEST_CASE("unknown seeding cell is a validation error") {
    SynthCityParams params;
    params.grid_size = 8;
    params.population = 300;
    params.seed = 5;
    City city = generate_synthetic_city(params);
    TempDir td;
    ScenarioConfig cfg;
    cfg.synth = params;
    cfg.seeding_file = td.file("seeding.csv", "day,cell_id,count\n0,nowhere,5\n");
    REQUIRE_THROWS_AS(build_setup(city, cfg), ValidationError);
}

TEST_CASE("replications differ by seed and are order independent") {
    Fixture f(TessKind::CBG, 500, 1);
    RunParams rp;
    std::vector<double> day0(4, -1.0);
    run_replications(f.setup, rp, 4, 100, 1, [&](int rep, RunOutput&& out) {
        day0[std::size_t(rep)] = out.series[0].infected_fraction;
    });
    std::vector<double> day0_par(4, -1.0);
    run_replications(f.setup, rp, 4, 100, 4, [&](int rep, RunOutput&& out) {
        day0_par[std::size_t(rep)] = out.series[0].infected_fraction;
    });
    REQUIRE(day0 == day0_par);

    // a single replication reproduces the plain run with the same seed
    RunParams single;
    single.seed = 100;
    RunOutput ref = run_scenario(f.setup, single);
    REQUIRE(day0[0] == ref.series[0].infected_fraction);
}

TEST_CASE("run output files are written and the log round-trips") {
    Fixture f(TessKind::CBG, 400, 1);
    RunOutput out = run_scenario(f.setup);
    TempDir td;
    auto dir = td.sub("out");
    out.write(dir);
    auto events = read_event_log(dir + "/events.bin");
    REQUIRE(events == out.events);
    std::string series = read_file(dir + "/series.csv");
    REQUIRE(series.rfind("day,infected_fraction,dead_fraction\n", 0) == 0);
    REQUIRE_FALSE(read_file(dir + "/run_meta.json").empty());
}

TEST_CASE("tessellation choice changes schedules but preserves mechanics") {
    for (TessKind kind : {TessKind::NT, TessKind::VD_r, TessKind::RMCBG, TessKind::CBGVD}) {
        Fixture f(kind, 500, 1);
        RunOutput out = run_scenario(f.setup);
        REQUIRE(out.series.size() == 1);
        audit_log(out);
    }
}

TEST_CASE("lockdown suppresses trips") {
    SynthCityParams params;
    params.grid_size = 8;
    params.population = 600;
    params.seed = 5;
    City city = generate_synthetic_city(params);
    ScenarioConfig cfg;
    cfg.synth = params;
    cfg.days = 1;
    cfg.seed = 9;
    SimSetup open = build_setup(city, cfg);
    RunOutput no_lockdown = run_scenario(open);

    cfg.lockdowns.push_back({0, 2});
    SimSetup closed = build_setup(city, cfg);
    RunOutput locked = run_scenario(closed);
    REQUIRE(no_lockdown.meta.trips > 0);
    REQUIRE(locked.meta.trips < no_lockdown.meta.trips);
    // only essential destinations remain
    for (const EventRec& e : locked.events) {
        if (e.kind != EventKind::trip_decision) continue;
        PoiCategory cat = city.pois[e.place].category;
        REQUIRE((cat == PoiCategory::grocery_retail || cat == PoiCategory::medical));
    }
}

TEST_CASE("scenario json round trip") {
    ScenarioConfig cfg;
    SynthCityParams p;
    p.grid_size = 10;
    p.population = 1234;
    cfg.synth = p;
    cfg.tessellation = TessKind::VD_r;
    cfg.fraction = 0.5;
    cfg.days = 3;
    cfg.lockdowns.push_back({1, 2});
    ScenarioConfig back = ScenarioConfig::from_json(cfg.to_json());
    REQUIRE(back.tessellation == TessKind::VD_r);
    REQUIRE(back.fraction == 0.5);
    REQUIRE(back.synth->population == 1234);
    REQUIRE(back.lockdowns.size() == 1);

    ScenarioConfig bad;
    bad.days = 0;
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
}
