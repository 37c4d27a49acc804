#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <vector>

#include <json.hpp>

#include "aic/geodata.hpp"
#include "aic/rng.hpp"

namespace aic {

enum class EpiState : u8 {
    Susceptible = 0,
    InfectedNonContagious,
    InfectedSymptomatic,
    InfectedAsymptomatic,
    Recovered,
    Dead,
};
inline constexpr int kEpiStates = 6;

inline const char* epi_state_name(EpiState s) {
    switch (s) {
        case EpiState::Susceptible: return "S";
        case EpiState::InfectedNonContagious: return "I_nc";
        case EpiState::InfectedSymptomatic: return "I_s";
        case EpiState::InfectedAsymptomatic: return "I_a";
        case EpiState::Recovered: return "R";
        case EpiState::Dead: return "D";
    }
    return "?";
}

inline bool is_contagious(EpiState s) {
    return s == EpiState::InfectedSymptomatic || s == EpiState::InfectedAsymptomatic;
}

inline bool is_infected(EpiState s) {
    return s == EpiState::InfectedNonContagious || is_contagious(s);
}

// One represented agent's medical record inside a super-agent.
struct EpiStatus {
    EpiState state = EpiState::Susceptible;
    i32 infection_day = -1;
    i32 recovery_day = -1;
    i32 death_day = -1;
    i32 immunity_end_day = -1;
    bool self_quarantined = false;
    bool hospitalized = false;
    bool pending_infection = false;
};

struct EpiParams {
    int incubation_days = 2;
    double p_asymptomatic = 0.70;
    double p_death_symptomatic = 0.03;
    int recovery_lo = 14, recovery_hi = 16;    // days after infection
    int immunity_lo = 55, immunity_hi = 65;    // days after recovery
    double p_self_quarantine = 0.5;
    double base_self_protection = 0.2;
    // action-mediated transmission at home/work/transport
    double action_effective_prob = 0.3;
    double action_transmission_prob = 0.15;

    void validate() const {
        for (double p : {p_asymptomatic, p_death_symptomatic, p_self_quarantine,
                         base_self_protection, action_effective_prob, action_transmission_prob})
            if (p < 0.0 || p > 1.0) throw ConfigError("epi probability outside [0,1]");
        if (recovery_lo > recovery_hi || immunity_lo > immunity_hi)
            throw ConfigError("epi windows out of order");
    }
};

// P_c rows encode the per-exposure escape probability by distance; a smaller
// value means a hotter exposure since the transmission formula exponentiates
// it. Masked values shrink the complement by twenty percent.
struct ContactParams {
    struct PcRow {
        double distance;
        double unmasked;
        double masked;
    };
    std::vector<PcRow> pc_table = {
        {0.5, 0.90, 0.92},
        {1.0, 0.95, 0.96},
        {2.0, 0.985, 0.988},
        {3.0, 0.998, 0.9984},
    };
    // contacts/hour by (victim bucket, other bucket); child contacts dominate
    std::array<std::array<double, kAgeBuckets>, kAgeBuckets> contact_rates{};
    int active_hour_lo = 6, active_hour_hi = 22;  // [lo, hi)
    double mask_threshold = 0.5;
    double max_pair_distance = 10.0;

    static ContactParams defaults() {
        ContactParams c;
        for (int a = 0; a < kAgeBuckets; ++a)
            for (int b = 0; b < kAgeBuckets; ++b) {
                bool child = a == int(AgeBucket::child) || b == int(AgeBucket::child);
                bool senior = a == int(AgeBucket::senior) || b == int(AgeBucket::senior);
                c.contact_rates[a][b] = child ? 2.0 : (senior ? 1.0 : 1.5);
            }
        return c;
    }

    void validate() const {
        if (pc_table.empty()) throw ConfigError("pc_table is empty");
        for (std::size_t i = 0; i < pc_table.size(); ++i) {
            const PcRow& r = pc_table[i];
            if (r.unmasked <= 0.0 || r.unmasked > 1.0 || r.masked <= 0.0 || r.masked > 1.0)
                throw ConfigError("pc_table values must lie in (0,1]");
            if (i == 0) continue;
            if (r.distance <= pc_table[i - 1].distance)
                throw ConfigError("pc_table distances must increase");
            // escape probability grows (or holds) with distance
            if (r.unmasked < pc_table[i - 1].unmasked - 1e-12 ||
                r.masked < pc_table[i - 1].masked - 1e-12)
                throw ConfigError("pc_table must be non-decreasing in distance");
        }
    }

    double contact_rate(AgeBucket victim, const std::array<u32, kAgeBuckets>& present,
                        int hour) const {
        if (hour < active_hour_lo || hour >= active_hour_hi) return 0.0;
        double total = 0.0, weighted = 0.0;
        for (int b = 0; b < kAgeBuckets; ++b) {
            total += present[b];
            weighted += double(present[b]) * contact_rates[int(victim)][b];
        }
        return total > 0.0 ? weighted / total : 0.0;
    }
};

struct ContaminationParams {
    double decay_rate_per_minute = 0.011552453009332421;  // half-life of 60 minutes
    double deposit_per_infected_minute = 1.0;
    double p_surface_infection_per_level = 1e-4;
};

struct EpiConfig {
    EpiParams params;
    ContactParams contact = ContactParams::defaults();
    ContaminationParams contamination;

    static EpiConfig from_json(const nlohmann::json& j) {
        EpiConfig c;
        if (j.contains("epi_params")) {
            const auto& p = j.at("epi_params");
            auto get = [&](const char* k, auto& field) {
                if (p.contains(k)) field = p.at(k).get<std::decay_t<decltype(field)>>();
            };
            get("incubation_days", c.params.incubation_days);
            get("p_asymptomatic", c.params.p_asymptomatic);
            get("p_death_symptomatic", c.params.p_death_symptomatic);
            get("recovery_lo", c.params.recovery_lo);
            get("recovery_hi", c.params.recovery_hi);
            get("immunity_lo", c.params.immunity_lo);
            get("immunity_hi", c.params.immunity_hi);
            get("p_self_quarantine", c.params.p_self_quarantine);
            get("base_self_protection", c.params.base_self_protection);
            get("action_effective_prob", c.params.action_effective_prob);
            get("action_transmission_prob", c.params.action_transmission_prob);
        }
        if (j.contains("contact")) {
            const auto& ct = j.at("contact");
            if (ct.contains("pc_table")) {
                c.contact.pc_table.clear();
                for (const auto& row : ct.at("pc_table"))
                    c.contact.pc_table.push_back({row.at("distance").get<double>(),
                                                  row.at("unmasked").get<double>(),
                                                  row.at("masked").get<double>()});
            }
            if (ct.contains("contact_rates")) {
                const auto& cr = ct.at("contact_rates");
                for (int a = 0; a < kAgeBuckets; ++a)
                    for (int b = 0; b < kAgeBuckets; ++b)
                        c.contact.contact_rates[a][b] = cr[a][b].get<double>();
            }
            if (ct.contains("active_hours")) {
                c.contact.active_hour_lo = ct.at("active_hours")[0].get<int>();
                c.contact.active_hour_hi = ct.at("active_hours")[1].get<int>();
            }
            if (ct.contains("mask_threshold"))
                c.contact.mask_threshold = ct.at("mask_threshold").get<double>();
            if (ct.contains("max_pair_distance"))
                c.contact.max_pair_distance = ct.at("max_pair_distance").get<double>();
        }
        if (j.contains("contamination")) {
            const auto& cn = j.at("contamination");
            if (cn.contains("decay_rate_per_minute"))
                c.contamination.decay_rate_per_minute =
                    cn.at("decay_rate_per_minute").get<double>();
            if (cn.contains("deposit_per_infected_minute"))
                c.contamination.deposit_per_infected_minute =
                    cn.at("deposit_per_infected_minute").get<double>();
            if (cn.contains("p_surface_infection_per_level"))
                c.contamination.p_surface_infection_per_level =
                    cn.at("p_surface_infection_per_level").get<double>();
        }
        c.params.validate();
        c.contact.validate();
        return c;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["epi_params"] = {{"incubation_days", params.incubation_days},
                           {"p_asymptomatic", params.p_asymptomatic},
                           {"p_death_symptomatic", params.p_death_symptomatic},
                           {"recovery_lo", params.recovery_lo},
                           {"recovery_hi", params.recovery_hi},
                           {"immunity_lo", params.immunity_lo},
                           {"immunity_hi", params.immunity_hi},
                           {"p_self_quarantine", params.p_self_quarantine},
                           {"base_self_protection", params.base_self_protection},
                           {"action_effective_prob", params.action_effective_prob},
                           {"action_transmission_prob", params.action_transmission_prob}};
        auto rows = nlohmann::json::array();
        for (const auto& r : contact.pc_table)
            rows.push_back(
                {{"distance", r.distance}, {"unmasked", r.unmasked}, {"masked", r.masked}});
        auto rates = nlohmann::json::array();
        for (int a = 0; a < kAgeBuckets; ++a) {
            auto row = nlohmann::json::array();
            for (int b = 0; b < kAgeBuckets; ++b) row.push_back(contact.contact_rates[a][b]);
            rates.push_back(row);
        }
        j["contact"] = {{"pc_table", rows},
                        {"contact_rates", rates},
                        {"active_hours", {contact.active_hour_lo, contact.active_hour_hi}},
                        {"mask_threshold", contact.mask_threshold},
                        {"max_pair_distance", contact.max_pair_distance}};
        j["contamination"] = {
            {"decay_rate_per_minute", contamination.decay_rate_per_minute},
            {"deposit_per_infected_minute", contamination.deposit_per_infected_minute},
            {"p_surface_infection_per_level", contamination.p_surface_infection_per_level}};
        return j;
    }

    static EpiConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open epi config: " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("epi config: ") + e.what());
        }
        return from_json(j);
    }
};

// ---------------------------------------------------------------------------
// Transmission pipeline

// People per square meter of total floor space; N comes from the observed
// hourly visit profile, not from simulated presence, so the estimate is
// independent of the simulated agent count.
inline double density(const Poi& poi, int hour) {
    return poi.hourly_visits[hour] / (poi.area_m2 * double(poi.floors));
}

// Expected pair distance: the side of the per-person contact area.
inline double pair_distance(double delta, double d_max = 10.0) {
    if (delta <= 0.0) return d_max;
    return std::sqrt(1.0 / delta);
}

inline double pc_lookup(const ContactParams& cp, double d, bool masked) {
    const auto& t = cp.pc_table;
    auto value = [&](const ContactParams::PcRow& r) { return masked ? r.masked : r.unmasked; };
    if (d <= t.front().distance) return value(t.front());
    if (d >= t.back().distance) return value(t.back());
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (d <= t[i].distance) {
            double f = (d - t[i - 1].distance) / (t[i].distance - t[i - 1].distance);
            return value(t[i - 1]) + f * (value(t[i]) - value(t[i - 1]));
        }
    }
    return value(t.back());
}

// Per-visit infection probability for a random pair sharing the building.
inline double transmission_probability(double pc, double contacts_per_hour, double dwell_hours,
                                       double infected_fraction) {
    double exponent = contacts_per_hour * dwell_hours * infected_fraction;
    if (exponent <= 0.0) return 0.0;
    double p = 1.0 - std::pow(pc, exponent);
    return std::clamp(p, 0.0, 1.0);
}

// Per-minute hazard that compounds exactly to the per-visit probability over
// the sampled dwell.
inline double per_minute_probability(double p_visit, double dwell_minutes) {
    if (p_visit <= 0.0) return 0.0;
    if (p_visit >= 1.0) return 1.0;
    if (dwell_minutes < 1.0) dwell_minutes = 1.0;
    return 1.0 - std::pow(1.0 - p_visit, 1.0 / dwell_minutes);
}

struct StatusCounts {
    u64 total = 0;
    u64 contagious = 0;
    std::array<u32, kAgeBuckets> by_bucket{};
};

inline double infected_fraction(const StatusCounts& counts) {
    if (counts.total == 0) return 0.0;
    return double(counts.contagious) / double(counts.total);
}

// ---------------------------------------------------------------------------
// Environmental contamination

struct Contamination {
    double level = 0.0;
    u64 last_minute = 0;

    void decay_to(u64 minute, const ContaminationParams& p) {
        if (minute <= last_minute) return;
        level *= std::exp(-p.decay_rate_per_minute * double(minute - last_minute));
        last_minute = minute;
    }

    void deposit(u64 minute, u64 contagious_present, const ContaminationParams& p) {
        decay_to(minute, p);
        level += p.deposit_per_infected_minute * double(contagious_present);
    }
};

inline double surface_infection_probability(double level, const ContaminationParams& p) {
    return std::min(1.0, p.p_surface_infection_per_level * std::max(0.0, level));
}

// ---------------------------------------------------------------------------
// Daily state machine

struct StateTransition {
    EpiState from, to;
};

// End-of-day update for one status. Returns the transition if one fired.
// Transitions follow the fixed chain: S -> I_nc -> {I_s, I_a} -> R (or D from
// I_s) -> S again once immunity lapses; Dead is absorbing.
inline std::optional<StateTransition> daily_state_update(EpiStatus& st, int day,
                                                         const EpiParams& params,
                                                         RngStream& rng) {
    switch (st.state) {
        case EpiState::Dead:
            return std::nullopt;
        case EpiState::Susceptible:
            if (st.pending_infection) {
                st.pending_infection = false;
                st.state = EpiState::InfectedNonContagious;
                st.infection_day = day;
                return StateTransition{EpiState::Susceptible, EpiState::InfectedNonContagious};
            }
            return std::nullopt;
        case EpiState::InfectedNonContagious: {
            if (day - st.infection_day < params.incubation_days) return std::nullopt;
            bool asym = rng.bernoulli(params.p_asymptomatic);
            st.recovery_day =
                st.infection_day + int(rng.uniform_int(params.recovery_lo, params.recovery_hi));
            if (asym) {
                st.state = EpiState::InfectedAsymptomatic;
                return StateTransition{EpiState::InfectedNonContagious,
                                       EpiState::InfectedAsymptomatic};
            }
            st.state = EpiState::InfectedSymptomatic;
            if (rng.bernoulli(params.p_death_symptomatic))
                st.death_day = st.infection_day +
                               int(rng.uniform_int(params.recovery_lo, params.recovery_hi));
            st.self_quarantined = rng.bernoulli(params.p_self_quarantine);
            st.hospitalized = !st.self_quarantined;
            return StateTransition{EpiState::InfectedNonContagious,
                                   EpiState::InfectedSymptomatic};
        }
        case EpiState::InfectedSymptomatic:
        case EpiState::InfectedAsymptomatic: {
            EpiState from = st.state;
            if (st.death_day >= 0) {  // a scheduled death preempts recovery
                if (day < st.death_day) return std::nullopt;
                st.state = EpiState::Dead;
                st.self_quarantined = false;
                st.hospitalized = false;
                return StateTransition{from, EpiState::Dead};
            }
            if (day >= st.recovery_day) {
                st.state = EpiState::Recovered;
                st.immunity_end_day =
                    st.recovery_day + int(rng.uniform_int(params.immunity_lo, params.immunity_hi));
                st.self_quarantined = false;
                st.hospitalized = false;
                return StateTransition{from, EpiState::Recovered};
            }
            return std::nullopt;
        }
        case EpiState::Recovered:
            if (day >= st.immunity_end_day) {
                st = EpiStatus{};  // susceptible again, timers cleared
                return StateTransition{EpiState::Recovered, EpiState::Susceptible};
            }
            return std::nullopt;
    }
    throw SimError("status in impossible state");
}

}  // namespace aic
