#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "aic/geodata.hpp"
#include "aic/rng.hpp"

namespace aic {

enum class Occupation : u8 { Service = 0, Student, Doctor, Unemployed };
inline constexpr int kOccupations = 4;

inline const char* occupation_name(Occupation o) {
    switch (o) {
        case Occupation::Service: return "Service";
        case Occupation::Student: return "Student";
        case Occupation::Doctor: return "Doctor";
        case Occupation::Unemployed: return "Unemployed";
    }
    return "?";
}

inline Occupation occupation_from_name(std::string_view s) {
    for (int i = 0; i < kOccupations; ++i)
        if (s == occupation_name(Occupation(i))) return Occupation(i);
    throw ParseError("unknown occupation: " + std::string(s));
}

struct AgeRange {
    int lo, hi;
};

inline AgeRange occupation_age_range(Occupation o) {
    switch (o) {
        case Occupation::Service: return {18, 62};
        case Occupation::Student: return {4, 25};
        case Occupation::Doctor: return {25, 70};
        case Occupation::Unemployed: return {10, 81};
    }
    return {0, 0};
}

inline bool occupation_legal(Occupation o, int age) {
    auto [lo, hi] = occupation_age_range(o);
    return age >= lo && age <= hi;
}

// Occupation shares per age bucket; sampling restricts to age-legal
// occupations and renormalizes.
struct PopulationConfig {
    std::array<std::array<double, kOccupations>, kAgeBuckets> occupation_shares{};
    // home placement weights by street kind: residential, arterial, highway, other
    std::array<double, 4> placement_weights{100.0, 10.0, 0.0, 0.0};

    static PopulationConfig defaults() {
        PopulationConfig c;
        c.occupation_shares[int(AgeBucket::child)] = {0.0, 1.0, 0.0, 0.0};
        c.occupation_shares[int(AgeBucket::adult)] = {0.60, 0.08, 0.02, 0.30};
        c.occupation_shares[int(AgeBucket::senior)] = {0.0, 0.0, 0.0, 1.0};
        return c;
    }
};

struct Agent {
    u32 id = 0;
    u32 home_cbg = 0;
    u32 home_node = 0;
    u32 household = 0;
    int age = 0;
    AgeBucket bucket = AgeBucket::adult;
    Occupation occupation = Occupation::Unemployed;
    u32 daytime_cbg = kNone32;
    u32 work_node = kNone32;
};

struct Household {
    u32 id = 0;
    u32 cbg = 0;
    u32 home_node = 0;
    std::vector<u32> members;
};

struct Population {
    std::vector<Agent> agents;
    std::vector<Household> households;
};

// Ages are drawn uniformly inside each bucket, clamped so that at least one
// occupation is legal for everyone: children 4-17, adults 18-64, seniors
// 65-81.
inline int sample_age(AgeBucket b, RngStream& rng) {
    switch (b) {
        case AgeBucket::child: return int(rng.uniform_int(4, 17));
        case AgeBucket::adult: return int(rng.uniform_int(18, 64));
        case AgeBucket::senior: return int(rng.uniform_int(65, 81));
    }
    return 30;
}

inline Occupation sample_occupation(AgeBucket b, int age, const PopulationConfig& cfg,
                                    RngStream& rng) {
    std::array<double, kOccupations> w{};
    double total = 0.0;
    for (int o = 0; o < kOccupations; ++o) {
        if (occupation_legal(Occupation(o), age)) {
            w[o] = cfg.occupation_shares[int(b)][o];
            total += w[o];
        }
    }
    if (total <= 0.0) return Occupation::Unemployed;
    return Occupation(rng.weighted(w));
}

// Household-by-household synthesis per CBG: draw sizes until the population
// is covered (last household truncated), place homes with street-kind
// weights, assign ages/occupations/workplaces.
inline Population synthesize_population(const City& city, u64 seed,
                                        const PopulationConfig& cfg = PopulationConfig::defaults()) {
    Population pop;
    std::vector<std::vector<u32>> nodes_of_cbg(city.n_cbgs());
    for (u32 n = 0; n < city.graph.size(); ++n) nodes_of_cbg[city.cbg_of_node[n]].push_back(n);

    std::unordered_map<std::string, u32> cbg_index;
    for (u32 c = 0; c < city.n_cbgs(); ++c) cbg_index[city.cbgs[c].id] = c;

    for (u32 c = 0; c < city.n_cbgs(); ++c) {
        const CbgPolygon& cbg = city.cbgs[c];
        if (cbg.population == 0) continue;
        std::vector<u32> nodes;
        std::vector<double> node_weights;
        for (u32 n : nodes_of_cbg[c]) {
            double w = cfg.placement_weights[int(city.graph.nodes[n].kind)];
            if (w > 0.0) {
                nodes.push_back(n);
                node_weights.push_back(w);
            }
        }
        if (nodes.empty())
            throw ValidationError("cbg " + cbg.id +
                                  " has population but no residential or arterial node");

        RngStream rng(seed, salts::agent, 0x70000000ull + c);
        i64 remaining = cbg.population;
        while (remaining > 0) {
            i64 size = 1 + i64(rng.weighted({cbg.household_size_probs.begin(),
                                             cbg.household_size_probs.end()}));
            size = std::min(size, remaining);
            remaining -= size;
            Household hh;
            hh.id = u32(pop.households.size());
            hh.cbg = c;
            hh.home_node = nodes[rng.weighted(node_weights)];
            for (i64 m = 0; m < size; ++m) {
                Agent a;
                a.id = u32(pop.agents.size());
                a.home_cbg = c;
                a.home_node = hh.home_node;
                a.household = hh.id;
                a.bucket = AgeBucket(rng.weighted(
                    {cbg.age_distribution.begin(), cbg.age_distribution.end()}));
                a.age = sample_age(a.bucket, rng);
                a.occupation = sample_occupation(a.bucket, a.age, cfg, rng);
                if (a.occupation != Occupation::Unemployed) {
                    // workplace cbg from the commute distribution, node within it
                    u32 dt = c;
                    if (!cbg.daytime_cbg_probs.empty()) {
                        std::vector<double> w;
                        w.reserve(cbg.daytime_cbg_probs.size());
                        for (const auto& [_, p] : cbg.daytime_cbg_probs) w.push_back(p);
                        std::size_t pick = rng.weighted(w);
                        auto it = cbg_index.find(cbg.daytime_cbg_probs[pick].first);
                        if (it != cbg_index.end()) dt = it->second;
                    }
                    a.daytime_cbg = dt;
                    if (dt == c) {
                        a.work_node = a.home_node;  // works from home
                    } else {
                        const auto& cand = nodes_of_cbg[dt];
                        if (cand.empty())
                            a.work_node = a.home_node;
                        else
                            a.work_node = cand[rng.below(cand.size())];
                    }
                }
                hh.members.push_back(a.id);
                pop.agents.push_back(a);
            }
            pop.households.push_back(std::move(hh));
        }
    }
    return pop;
}

// ---------------------------------------------------------------------------
// Super-agents

// One physical presence carrying the medical statuses of `represented`
// demographically identical agents.
struct SuperAgent {
    u32 id = 0;
    u32 home_cell = 0;
    u32 home_cbg = 0;
    u32 home_node = 0;
    u32 household = 0;
    AgeBucket bucket = AgeBucket::adult;
    Occupation occupation = Occupation::Unemployed;
    int age = 0;
    u32 daytime_cbg = kNone32;
    u32 work_node = kNone32;
    std::vector<u32> represented;  // agent ids; k = represented.size()

    u32 k() const { return u32(represented.size()); }
};

// Group agents by (home cell, age bucket, occupation) and distribute each
// group's statuses over ceil(fraction*n) super-agents in balanced contiguous
// chunks of a household-sorted order (household order seeded). Keeping
// co-resident agents inside one super-agent preserves the household
// transmission channel, which a plain shuffled round-robin severs for every
// represented agent whose presence lives elsewhere. With use_sa=false the
// surplus agents are dropped instead of aggregated, which is the
// agent-reduction ablation.
inline std::vector<SuperAgent> coarse_grain(const std::vector<Agent>& agents,
                                            const std::vector<u32>& cell_of_node, double fraction,
                                            u64 seed, bool use_sa = true) {
    if (agents.empty()) throw ValidationError("cannot coarse-grain an empty population");
    if (!(fraction > 0.0) || fraction > 1.0) throw ConfigError("fraction must be in (0,1]");

    std::vector<SuperAgent> out;
    auto make_sa = [&](const Agent& a) {
        SuperAgent s;
        s.id = u32(out.size());
        s.home_cell = cell_of_node[a.home_node];
        s.home_cbg = a.home_cbg;
        s.home_node = a.home_node;
        s.household = a.household;
        s.bucket = a.bucket;
        s.occupation = a.occupation;
        s.age = a.age;
        s.daytime_cbg = a.daytime_cbg;
        s.work_node = a.work_node;
        return s;
    };

    if (fraction == 1.0) {
        // identity: one SA per agent, in agent order
        out.reserve(agents.size());
        for (const Agent& a : agents) {
            SuperAgent s = make_sa(a);
            s.represented = {a.id};
            out.push_back(std::move(s));
        }
        return out;
    }

    std::map<std::tuple<u32, u8, u8>, std::vector<u32>> groups;
    for (const Agent& a : agents)
        groups[{cell_of_node[a.home_node], u8(a.bucket), u8(a.occupation)}].push_back(a.id);

    u64 group_idx = 0;
    for (auto& [key, members] : groups) {
        RngStream rng(seed, salts::agent, 0x5A000000ull + group_idx++);
        rng.shuffle(members);
        u32 n = u32(members.size());
        u32 m = u32(std::ceil(fraction * double(n)));
        m = std::max<u32>(1, std::min(m, n));
        for (u32 j = 0; j < m; ++j) {
            const Agent& rep = agents[members[j]];
            SuperAgent s = make_sa(rep);
            if (use_sa) {
                for (u32 idx = j; idx < n; idx += m) s.represented.push_back(members[idx]);
            } else {
                s.represented = {members[j]};
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tasks

enum class TaskKind : u8 {
    GoToWork = 0,
    Work,
    ReturnHome,
    StayHome,
    AttendEvent,
    StayInHospital,
    TreatPatients,
};

inline const char* task_kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::GoToWork: return "GoToWork";
        case TaskKind::Work: return "Work";
        case TaskKind::ReturnHome: return "ReturnHome";
        case TaskKind::StayHome: return "StayHome";
        case TaskKind::AttendEvent: return "AttendEvent";
        case TaskKind::StayInHospital: return "StayInHospital";
        case TaskKind::TreatPatients: return "TreatPatients";
    }
    return "?";
}

inline TaskKind task_kind_from_name(std::string_view s) {
    for (int i = 0; i <= int(TaskKind::TreatPatients); ++i)
        if (s == task_kind_name(TaskKind(i))) return TaskKind(i);
    throw ParseError("unknown task kind: " + std::string(s));
}

struct Task {
    TaskKind kind = TaskKind::StayHome;
    int start_hour = 0;
    int duration_hours = 0;
    double occurrence_prob = 1.0;
    u32 poi = kNone32;  // AttendEvent destination
};

struct TaskTemplate {
    TaskKind kind = TaskKind::Work;
    std::vector<Occupation> occupations;
    int start_lo = 0, start_hi = 0;
    int dur_lo = 1, dur_hi = 1;
    double prob_lo = 1.0, prob_hi = 1.0;
};

struct TaskConfig {
    std::vector<TaskTemplate> templates;

    static TaskConfig defaults() {
        TaskConfig c;
        c.templates.push_back({TaskKind::Work,
                               {Occupation::Service},
                               7, 9, 6, 9, 0.85, 1.0});
        c.templates.push_back({TaskKind::Work,
                               {Occupation::Student},
                               7, 9, 5, 7, 0.9, 1.0});
        c.templates.push_back({TaskKind::TreatPatients,
                               {Occupation::Doctor},
                               7, 9, 6, 10, 0.9, 1.0});
        // scheduled home obligation (meals, family time); visits end in time
        // to honor it
        c.templates.push_back({TaskKind::StayHome,
                               {Occupation::Service, Occupation::Student, Occupation::Doctor,
                                Occupation::Unemployed},
                               11, 21, 1, 2, 0.5, 0.8});
        return c;
    }

    // one JSON object per line: kind, occupations, windows
    static TaskConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open tasks config: " + path);
        TaskConfig c;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError("tasks line " + std::to_string(line_no) + ": " + e.what());
            }
            TaskTemplate t;
            t.kind = task_kind_from_name(j.at("kind").get<std::string>());
            for (const auto& o : j.at("occupations"))
                t.occupations.push_back(occupation_from_name(o.get<std::string>()));
            t.start_lo = j.at("start_window")[0].get<int>();
            t.start_hi = j.at("start_window")[1].get<int>();
            t.dur_lo = j.at("duration_window")[0].get<int>();
            t.dur_hi = j.at("duration_window")[1].get<int>();
            t.prob_lo = j.at("probability_window")[0].get<double>();
            t.prob_hi = j.at("probability_window")[1].get<double>();
            if (t.start_lo > t.start_hi || t.dur_lo > t.dur_hi || t.prob_lo > t.prob_hi)
                throw ValidationError("tasks line " + std::to_string(line_no) +
                                      ": window bounds out of order");
            c.templates.push_back(std::move(t));
        }
        return c;
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        for (const TaskTemplate& t : templates) {
            nlohmann::json j;
            j["kind"] = task_kind_name(t.kind);
            auto occ = nlohmann::json::array();
            for (Occupation o : t.occupations) occ.push_back(occupation_name(o));
            j["occupations"] = occ;
            j["start_window"] = {t.start_lo, t.start_hi};
            j["duration_window"] = {t.dur_lo, t.dur_hi};
            j["probability_window"] = {t.prob_lo, t.prob_hi};
            out << j.dump() << '\n';
        }
    }
};

struct SocialEvent {
    u32 poi = 0;
    int start_hour = 12;
    int duration_hours = 2;
};

// City-wide social events average three per month per 10,000 residents.
inline std::vector<SocialEvent> events_for_day(u64 seed, int day, std::size_t population,
                                               const std::vector<Poi>& pois) {
    RngStream rng(seed, salts::global, 0xE7E47ull + u64(day));
    double rate = 3.0 / 30.0 * double(population) / 10000.0;
    int n = rng.poisson(rate);
    std::vector<SocialEvent> events;
    if (pois.empty()) return events;
    std::vector<double> w;
    w.reserve(pois.size());
    for (const Poi& p : pois) w.push_back(p.weekly_visit_total());
    for (int e = 0; e < n; ++e) {
        SocialEvent ev;
        ev.poi = u32(rng.weighted(w));
        ev.start_hour = int(rng.uniform_int(10, 20));
        ev.duration_hours = int(rng.uniform_int(2, 4));
        events.push_back(ev);
    }
    return events;
}

struct DayContext {
    bool lockdown = false;
    std::vector<SocialEvent> events;
    double event_attendance_prob = 0.0;  // per agent per event
};

struct AgentCondition {
    bool hospitalized = false;
    bool quarantined = false;
};

// Sampled daily plan. Hospitalized agents get exactly one StayInHospital
// task; lockdown replaces work and events with StayHome for everyone except
// doctors.
inline std::vector<Task> assign_daily_tasks(Occupation occ, const AgentCondition& cond,
                                            const TaskConfig& cfg, const DayContext& ctx,
                                            RngStream& rng) {
    std::vector<Task> tasks;
    if (cond.hospitalized) {
        tasks.push_back({TaskKind::StayInHospital, 0, 24, 1.0, kNone32});
        return tasks;
    }
    bool allow_work = !cond.quarantined && (!ctx.lockdown || occ == Occupation::Doctor);
    if (allow_work) {
        for (const TaskTemplate& t : cfg.templates) {
            if (std::find(t.occupations.begin(), t.occupations.end(), occ) ==
                t.occupations.end())
                continue;
            double p = rng.uniform(t.prob_lo, t.prob_hi);
            if (!rng.bernoulli(p)) continue;
            int start = int(rng.uniform_int(t.start_lo, t.start_hi));
            int dur = int(rng.uniform_int(t.dur_lo, t.dur_hi));
            if (t.kind == TaskKind::Work || t.kind == TaskKind::TreatPatients) {
                tasks.push_back({TaskKind::GoToWork, start, 0, p, kNone32});
                tasks.push_back({t.kind, start, dur, p, kNone32});
                tasks.push_back({TaskKind::ReturnHome, std::min(23, start + dur), 0, p, kNone32});
            } else {
                tasks.push_back({t.kind, start, dur, p, kNone32});
            }
        }
    }
    if (!cond.quarantined && !ctx.lockdown) {
        for (const SocialEvent& ev : ctx.events) {
            if (rng.bernoulli(ctx.event_attendance_prob)) {
                tasks.push_back(
                    {TaskKind::AttendEvent, ev.start_hour, ev.duration_hours, 1.0, ev.poi});
                break;  // at most one event per day
            }
        }
    }
    if (tasks.empty()) tasks.push_back({TaskKind::StayHome, 0, 24, 1.0, kNone32});
    std::stable_sort(tasks.begin(), tasks.end(),
                     [](const Task& a, const Task& b) { return a.start_hour < b.start_hour; });
    return tasks;
}

// ---------------------------------------------------------------------------
// Groups and transport

enum class GroupKind : u8 { Household = 0, Work, Transportation, Community };

struct Group {
    GroupKind kind = GroupKind::Household;
    std::vector<u32> members;  // super-agent ids
};

inline constexpr int kPublicVehicleCapacity = 30;
inline constexpr int kPrivateVehicleCapacity = 4;

// Shifted geometric with mean 10.25, truncated at 200.
inline int sample_work_group_size(RngStream& rng) {
    return 1 + rng.geometric(1.0 / 10.25, 199);
}

// Partition co-located workers into groups of sampled size, in id order.
inline std::vector<Group> partition_work_groups(const std::vector<u32>& workers, RngStream& rng) {
    std::vector<Group> out;
    std::size_t i = 0;
    while (i < workers.size()) {
        int size = sample_work_group_size(rng);
        Group g;
        g.kind = GroupKind::Work;
        for (int s = 0; s < size && i < workers.size(); ++s) g.members.push_back(workers[i++]);
        out.push_back(std::move(g));
    }
    return out;
}

struct SeatAssignment {
    // parallel to the travelers argument
    std::vector<bool> on_public;
    std::vector<u32> vehicle;  // public vehicle or private car index
    std::vector<Group> groups;
};

// Seat pool = all public seats plus one private seat per traveler; every
// traveler draws a distinct seat uniformly. Private travelers are packed four
// to a car in draw order.
inline SeatAssignment assign_transport_seats(const std::vector<u32>& travelers, u64 public_seats,
                                             RngStream& rng) {
    const u64 n = travelers.size();
    SeatAssignment out;
    out.on_public.resize(n);
    out.vehicle.resize(n);
    if (n == 0) return out;

    // virtual Fisher-Yates over [0, public_seats + n)
    std::unordered_map<u64, u64> swapped;
    u64 pool = public_seats + n;
    std::map<u64, std::vector<u32>> public_vehicles;
    std::vector<u32> private_order;
    for (u64 i = 0; i < n; ++i) {
        u64 j = i + rng.below(pool - i);
        u64 vi = swapped.count(i) ? swapped[i] : i;
        u64 vj = swapped.count(j) ? swapped[j] : j;
        swapped[j] = vi;
        u64 seat = vj;
        if (seat < public_seats) {
            out.on_public[i] = true;
            out.vehicle[i] = u32(seat / kPublicVehicleCapacity);
            public_vehicles[seat / kPublicVehicleCapacity].push_back(travelers[i]);
        } else {
            out.on_public[i] = false;
            private_order.push_back(u32(i));
        }
    }
    for (auto& [veh, members] : public_vehicles) {
        Group g;
        g.kind = GroupKind::Transportation;
        g.members = members;
        out.groups.push_back(std::move(g));
    }
    for (std::size_t i = 0; i < private_order.size(); i += kPrivateVehicleCapacity) {
        Group g;
        g.kind = GroupKind::Transportation;
        for (std::size_t s = i; s < std::min(private_order.size(), i + kPrivateVehicleCapacity);
             ++s) {
            out.vehicle[private_order[s]] = u32(i / kPrivateVehicleCapacity);
            g.members.push_back(travelers[private_order[s]]);
        }
        out.groups.push_back(std::move(g));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Actions

enum class ActionKind : u8 {
    Sneeze = 0,
    ContaminateObject,
    PhysicalContact,
    WashHands,
    TouchContaminatedObject,
};
inline constexpr int kActionKinds = 5;

inline const char* action_kind_name(ActionKind k) {
    switch (k) {
        case ActionKind::Sneeze: return "Sneeze";
        case ActionKind::ContaminateObject: return "ContaminateObject";
        case ActionKind::PhysicalContact: return "PhysicalContact";
        case ActionKind::WashHands: return "WashHands";
        case ActionKind::TouchContaminatedObject: return "TouchContaminatedObject";
    }
    return "?";
}

inline ActionKind action_kind_from_name(std::string_view s) {
    for (int i = 0; i < kActionKinds; ++i)
        if (s == action_kind_name(ActionKind(i))) return ActionKind(i);
    throw ParseError("unknown action kind: " + std::string(s));
}

inline bool is_risk_action(ActionKind k) {
    return k == ActionKind::Sneeze || k == ActionKind::PhysicalContact ||
           k == ActionKind::TouchContaminatedObject;
}

struct ActionEvent {
    ActionKind kind;
    double duration_minutes;
    double occurrence_prob;
    double effect_on_others;  // in [0,1]
};

struct ActionTemplate {
    ActionKind kind;
    double prob_lo, prob_hi;
    double dur_lo, dur_hi;      // minutes
    double effect_lo, effect_hi;
};

struct ActionConfig {
    std::array<ActionTemplate, kActionKinds> templates;

    static ActionConfig defaults() {
        ActionConfig c;
        c.templates[0] = {ActionKind::Sneeze, 0.05, 0.15, 0.1, 0.5, 0.3, 0.8};
        c.templates[1] = {ActionKind::ContaminateObject, 0.10, 0.20, 0.2, 1.0, 0.2, 0.5};
        c.templates[2] = {ActionKind::PhysicalContact, 0.10, 0.30, 0.5, 5.0, 0.4, 0.9};
        c.templates[3] = {ActionKind::WashHands, 0.20, 0.50, 0.5, 2.0, 0.0, 0.0};
        c.templates[4] = {ActionKind::TouchContaminatedObject, 0.10, 0.30, 0.1, 1.0, 0.0, 0.0};
        return c;
    }

    static ActionConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open actions config: " + path);
        ActionConfig c = defaults();
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError("actions line " + std::to_string(line_no) + ": " + e.what());
            }
            ActionKind k = action_kind_from_name(j.at("kind").get<std::string>());
            ActionTemplate& t = c.templates[int(k)];
            t.kind = k;
            t.prob_lo = j.at("probability_window")[0].get<double>();
            t.prob_hi = j.at("probability_window")[1].get<double>();
            t.dur_lo = j.at("duration_window")[0].get<double>();
            t.dur_hi = j.at("duration_window")[1].get<double>();
            t.effect_lo = j.at("effect_window")[0].get<double>();
            t.effect_hi = j.at("effect_window")[1].get<double>();
        }
        return c;
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        for (const ActionTemplate& t : templates) {
            nlohmann::json j;
            j["kind"] = action_kind_name(t.kind);
            j["probability_window"] = {t.prob_lo, t.prob_hi};
            j["duration_window"] = {t.dur_lo, t.dur_hi};
            j["effect_window"] = {t.effect_lo, t.effect_hi};
            out << j.dump() << '\n';
        }
    }
};

// Hourly action draw. Self-protection suppresses risk actions and promotes
// hand washing.
inline std::vector<ActionEvent> generate_actions(double self_protection, const ActionConfig& cfg,
                                                 RngStream& rng) {
    std::vector<ActionEvent> out;
    for (const ActionTemplate& t : cfg.templates) {
        double p = rng.uniform(t.prob_lo, t.prob_hi);
        if (is_risk_action(t.kind))
            p *= (1.0 - self_protection);
        else if (t.kind == ActionKind::WashHands)
            p = std::min(1.0, p * (1.0 + self_protection));
        if (!rng.bernoulli(p)) continue;
        ActionEvent e;
        e.kind = t.kind;
        e.occurrence_prob = p;
        e.duration_minutes = rng.uniform(t.dur_lo, t.dur_hi);
        e.effect_on_others = rng.uniform(t.effect_lo, t.effect_hi);
        out.push_back(e);
    }
    return out;
}

}  // namespace aic
