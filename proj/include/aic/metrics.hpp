#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aic/engine.hpp"

namespace aic {

enum class MetricKind : u8 { NOV = 0, AVD, PCV };
inline constexpr int kMetricKinds = 3;

inline const char* metric_name(MetricKind m) {
    switch (m) {
        case MetricKind::NOV: return "NOV";
        case MetricKind::AVD: return "AVD";
        case MetricKind::PCV: return "PCV";
    }
    return "?";
}

// A completed stay at a POI reconstructed from paired arrive/depart events.
struct Visit {
    u64 sa = 0;
    u32 poi = 0;
    u32 start = 0;  // minutes
    u32 end = 0;
    u32 k = 1;
    u32 cbg = kNone32;  // visitor stays unattributed
};

inline std::vector<Visit> extract_visits(const RunOutput& run) {
    std::vector<Visit> visits;
    std::map<u64, std::pair<u32, u32>> open;  // sa -> (poi, start)
    for (const EventRec& e : run.events) {
        if (e.kind == EventKind::arrive_poi) {
            open[e.subject] = {u32(e.place), e.minute};
        } else if (e.kind == EventKind::depart_poi) {
            auto it = open.find(e.subject);
            if (it == open.end()) throw SimError("depart without a matching arrival");
            Visit v;
            v.sa = e.subject;
            v.poi = it->second.first;
            v.start = it->second.second;
            v.end = e.minute;
            v.k = run.sa_k[std::size_t(e.subject)];
            v.cbg = run.sa_home_cbg[std::size_t(e.subject)];
            visits.push_back(v);
            open.erase(it);
        }
    }
    return visits;
}

// ---------------------------------------------------------------------------
// MVPOI selection

// Most visited POI; ties go to the lexicographically smaller id.
inline u32 select_mvpoi(const VisitPatterns& patterns, const std::vector<Poi>& pois,
                        std::optional<PoiCategory> category = std::nullopt,
                        std::optional<u32> source_cbg = std::nullopt) {
    std::vector<double> totals(pois.size(), 0.0);
    bool any = false;
    for (const auto& e : patterns.entries) {
        if (category && pois[e.poi].category != *category) continue;
        if (source_cbg && e.cbg != *source_cbg) continue;
        totals[e.poi] += e.weekly_count;
        any = true;
    }
    if (!any) throw ValidationError("no visit data in the requested scope");
    u32 best = kNone32;
    for (u32 p = 0; p < pois.size(); ++p) {
        if (totals[p] <= 0.0) continue;
        if (best == kNone32 || totals[p] > totals[best] ||
            (totals[p] == totals[best] && pois[p].id < pois[best].id))
            best = p;
    }
    return best;
}

inline u32 select_mvpoi_from_log(const std::vector<Visit>& visits, const std::vector<Poi>& pois) {
    std::vector<u64> totals(pois.size(), 0);
    bool any = false;
    for (const Visit& v : visits) {
        totals[v.poi] += v.k;
        any = true;
    }
    if (!any) throw ValidationError("no visits in the log");
    u32 best = 0;
    for (u32 p = 1; p < pois.size(); ++p) {
        if (totals[p] > totals[best] ||
            (totals[p] == totals[best] && pois[p].id < pois[best].id))
            best = p;
    }
    return best;
}

// ---------------------------------------------------------------------------
// NOV / AVD / PCV over a time window, in minutes

struct Window {
    u32 start = 0;
    u32 end = 7 * 1440;

    bool contains(u32 minute) const { return minute >= start && minute < end; }
};

// Number of visits: arrivals weighted by the statuses each presence carries.
inline u64 nov(const std::vector<Visit>& visits, u32 poi, Window w) {
    u64 count = 0;
    for (const Visit& v : visits)
        if (v.poi == poi && w.contains(v.start)) count += v.k;
    return count;
}

inline u64 nov(const RunOutput& run, u32 poi, Window w) {
    u64 count = 0;
    for (const EventRec& e : run.events)
        if (e.kind == EventKind::arrive_poi && u32(e.place) == poi && w.contains(e.minute))
            count += run.sa_k[std::size_t(e.subject)];
    return count;
}

// Average visit duration in minutes, k-weighted; empty windows have no value.
inline std::optional<double> avd(const std::vector<Visit>& visits, u32 poi, Window w) {
    double weighted = 0.0;
    u64 total_k = 0;
    for (const Visit& v : visits) {
        if (v.poi != poi || !w.contains(v.start)) continue;
        weighted += double(v.end - v.start) * double(v.k);
        total_k += v.k;
    }
    if (total_k == 0) return std::nullopt;
    return weighted / double(total_k);
}

// Two CBGs sending the most visits to the POI; ties by id.
inline std::pair<u32, u32> select_top_source_cbgs(const std::vector<Visit>& visits, u32 poi,
                                                  const std::vector<CbgPolygon>& cbgs, Window w) {
    std::map<u32, u64> counts;
    for (const Visit& v : visits)
        if (v.poi == poi && v.cbg != kNone32 && w.contains(v.start)) counts[v.cbg] += v.k;
    if (counts.size() < 2)
        throw ValidationError("fewer than two source CBGs with visits to the POI");
    std::vector<std::pair<u32, u64>> order(counts.begin(), counts.end());
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return cbgs[a.first].id < cbgs[b.first].id;
    });
    return {order[0].first, order[1].first};
}

inline std::pair<u32, u32> select_top_source_cbgs(const VisitPatterns& patterns, u32 poi,
                                                  const std::vector<CbgPolygon>& cbgs) {
    std::map<u32, double> counts;
    for (const auto& e : patterns.entries)
        if (e.poi == poi && e.weekly_count > 0) counts[e.cbg] += e.weekly_count;
    if (counts.size() < 2)
        throw ValidationError("fewer than two source CBGs with visits to the POI");
    std::vector<std::pair<u32, double>> order(counts.begin(), counts.end());
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return cbgs[a.first].id < cbgs[b.first].id;
    });
    return {order[0].first, order[1].first};
}

// Probability of co-visiting: a visit counts as a co-visit when some visit
// from the other CBG overlaps it for strictly more than five minutes.
inline std::optional<double> pcv(const std::vector<Visit>& visits, u32 poi, u32 cbg1, u32 cbg2,
                                 Window w) {
    if (cbg1 == cbg2) throw ValidationError("pcv requires two distinct CBGs");
    std::vector<const Visit*> from1, from2;
    for (const Visit& v : visits) {
        if (v.poi != poi || !w.contains(v.start)) continue;
        if (v.cbg == cbg1) from1.push_back(&v);
        if (v.cbg == cbg2) from2.push_back(&v);
    }
    u64 total = from1.size() + from2.size();
    if (total == 0) return std::nullopt;
    auto overlaps = [](const Visit& a, const Visit& b) {
        double lo = std::max(a.start, b.start);
        double hi = std::min(a.end, b.end);
        return hi - lo > 5.0;  // strictly more than five minutes together
    };
    u64 co = 0;
    for (const Visit* a : from1)
        for (const Visit* b : from2)
            if (overlaps(*a, *b)) {
                ++co;
                break;
            }
    for (const Visit* b : from2)
        for (const Visit* a : from1)
            if (overlaps(*b, *a)) {
                ++co;
                break;
            }
    return double(co) / double(total);
}

// ---------------------------------------------------------------------------
// Cross-scenario error aggregation

struct ErrorReport {
    std::map<double, double> per_fraction;  // fraction -> |mean_tess - mean_nt|
    double aggregate = 0.0;
};

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
}

inline double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size() - 1));
}

// Mean absolute error against the ground-truth samples, per agent-reduction
// fraction, averaged into the aggregate.
inline ErrorReport aggregate_abs_error(const std::map<double, std::vector<double>>& tess_samples,
                                       const std::map<double, std::vector<double>>& nt_samples,
                                       const std::vector<double>& fractions = {0.75, 0.5, 0.25,
                                                                               0.1}) {
    ErrorReport report;
    double sum = 0.0;
    for (double f : fractions) {
        auto t = tess_samples.find(f);
        auto n = nt_samples.find(f);
        if (t == tess_samples.end() || n == nt_samples.end())
            throw ValidationError("missing samples for fraction " + std::to_string(f));
        double err = std::abs(mean_of(t->second) - mean_of(n->second));
        report.per_fraction[f] = err;
        sum += err;
    }
    report.aggregate = sum / double(fractions.size());
    return report;
}

// Super-agent contribution: how much of the tessellation's deviation from the
// ground truth the super-agents recover. Sign is reported raw.
inline std::optional<double> sa_contribution(double val_nt, double val_with_sa,
                                             double val_without_sa) {
    double denom = val_nt - val_without_sa;
    if (denom == 0.0) return std::nullopt;
    return (val_without_sa - val_with_sa) / denom;
}

// ---------------------------------------------------------------------------
// Replication convergence by change-point detection

namespace cpd_detail {

struct PrefixSums {
    std::vector<double> s1, s2;

    explicit PrefixSums(const std::vector<double>& x) : s1(x.size() + 1), s2(x.size() + 1) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            s1[i + 1] = s1[i] + x[i];
            s2[i + 1] = s2[i] + x[i] * x[i];
        }
    }

    // within-segment sum of squared deviations over [lo, hi)
    double sse(std::size_t lo, std::size_t hi) const {
        double n = double(hi - lo);
        if (n <= 0) return 0.0;
        double sum = s1[hi] - s1[lo];
        double sq = s2[hi] - s2[lo];
        return std::max(0.0, sq - sum * sum / n);
    }
};

inline void split(const PrefixSums& ps, std::size_t lo, std::size_t hi, double penalty,
                  std::vector<std::size_t>& out) {
    if (hi - lo < 4) return;  // segments of at least two on both sides
    double whole = ps.sse(lo, hi);
    double best_gain = 0.0;
    std::size_t best_k = 0;
    for (std::size_t k = lo + 2; k + 2 <= hi; ++k) {
        double gain = whole - ps.sse(lo, k) - ps.sse(k, hi);
        if (gain > best_gain) {
            best_gain = gain;
            best_k = k;
        }
    }
    if (best_k == 0 || best_gain <= penalty || best_gain <= 1e-12) return;
    out.push_back(best_k);
    split(ps, lo, best_k, penalty, out);
    split(ps, best_k, hi, penalty, out);
}

// Binary segmentation with a variance cost and a 2*log(n) penalty scaled by
// the local noise level (estimated from first differences).
inline std::vector<std::size_t> change_points(const std::vector<double>& x) {
    std::size_t n = x.size();
    if (n < 4) return {};
    double var_diff = 0.0;
    for (std::size_t i = 1; i < n; ++i) var_diff += (x[i] - x[i - 1]) * (x[i] - x[i - 1]);
    double sigma2 = var_diff / (2.0 * double(n - 1));
    double penalty = 2.0 * std::log(double(n)) * sigma2;
    PrefixSums ps(x);
    std::vector<std::size_t> out;
    split(ps, 0, n, penalty, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace cpd_detail

struct ConvergenceResult {
    bool converged = true;
    std::size_t n_star = 1;  // replications needed
    std::vector<std::size_t> mean_change_points;
    std::vector<std::size_t> std_change_points;
};

// Change points on the replication series and on its squared residuals (the
// spread); the verdict requires the last change to clear the final tenth of
// the sequence.
inline ConvergenceResult convergence_check(const std::vector<double>& values) {
    if (values.size() < 10)
        throw ValidationError("convergence check needs at least 10 replications");
    ConvergenceResult r;
    r.mean_change_points = cpd_detail::change_points(values);

    // residuals against the piecewise means found above
    std::vector<double> residual2(values.size());
    std::vector<std::size_t> bounds = r.mean_change_points;
    bounds.insert(bounds.begin(), 0);
    bounds.push_back(values.size());
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        double m = 0.0;
        for (std::size_t i = bounds[b]; i < bounds[b + 1]; ++i) m += values[i];
        m /= double(bounds[b + 1] - bounds[b]);
        for (std::size_t i = bounds[b]; i < bounds[b + 1]; ++i)
            residual2[i] = (values[i] - m) * (values[i] - m);
    }
    r.std_change_points = cpd_detail::change_points(residual2);

    std::size_t last = 0;
    for (std::size_t cp : r.mean_change_points) last = std::max(last, cp);
    for (std::size_t cp : r.std_change_points) last = std::max(last, cp);
    r.n_star = last + 1;
    r.converged = double(last) <= 0.9 * double(values.size());
    return r;
}

// ---------------------------------------------------------------------------
// Series comparison and histograms

struct SeriesDistance {
    double max_abs = 0.0;
    double mean_abs = 0.0;
};

inline SeriesDistance infection_series_distance(const std::vector<double>& a,
                                                const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("series length mismatch");
    SeriesDistance d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = std::abs(a[i] - b[i]);
        d.max_abs = std::max(d.max_abs, diff);
        d.mean_abs += diff;
    }
    if (!a.empty()) d.mean_abs /= double(a.size());
    return d;
}

inline std::vector<double> infected_series(const RunOutput& run) {
    std::vector<double> s;
    s.reserve(run.series.size());
    for (const DayStat& d : run.series) s.push_back(d.infected_fraction);
    return s;
}

struct HistogramSpec {
    double lo = 0.0;
    double width = 1.0;
    int bins = 1;
};

// Freedman-Diaconis width on the reference samples, shared across scenarios.
inline HistogramSpec freedman_diaconis(std::vector<double> reference) {
    if (reference.empty()) throw ValidationError("histogram needs reference samples");
    std::sort(reference.begin(), reference.end());
    auto quantile = [&](double q) {
        double idx = q * double(reference.size() - 1);
        std::size_t lo = std::size_t(idx);
        double f = idx - double(lo);
        if (lo + 1 >= reference.size()) return reference.back();
        return reference[lo] * (1 - f) + reference[lo + 1] * f;
    };
    double iqr = quantile(0.75) - quantile(0.25);
    double lo = reference.front(), hi = reference.back();
    HistogramSpec spec;
    spec.lo = lo;
    if (iqr <= 0.0 || hi <= lo) {
        spec.width = std::max(1e-9, hi - lo);
        spec.bins = 1;
        return spec;
    }
    spec.width = 2.0 * iqr / std::cbrt(double(reference.size()));
    spec.bins = std::max(1, int(std::ceil((hi - lo) / spec.width)));
    return spec;
}

inline std::vector<u64> histogram(const std::vector<double>& values, const HistogramSpec& spec) {
    std::vector<u64> counts(std::size_t(spec.bins), 0);
    for (double v : values) {
        double f = (v - spec.lo) / spec.width;
        i64 b = i64(std::floor(f));
        if (b < 0) b = 0;
        if (b >= spec.bins) b = spec.bins - 1;
        ++counts[std::size_t(b)];
    }
    return counts;
}

}  // namespace aic
