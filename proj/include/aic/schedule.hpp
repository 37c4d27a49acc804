#pragma once

#include <array>
#include <map>
#include <numeric>
#include <vector>

#include "aic/common.hpp"

namespace aic {

// Per-cell POI visit-frequency table. Stored as an ordered map so iteration,
// serialization, and split/merge arithmetic are deterministic.
struct Schedule {
    std::map<u32, double> entries;  // poi index -> weekly frequency

    double total() const {
        double s = 0.0;
        for (const auto& [_, f] : entries) s += f;
        return s;
    }

    void add(u32 poi, double freq) {
        if (freq == 0.0) return;
        entries[poi] += freq;
    }
};

using Demographics = std::array<i64, kAgeBuckets>;

inline Demographics demographics_sum(const Demographics& a, const Demographics& b) {
    Demographics out{};
    for (int i = 0; i < kAgeBuckets; ++i) out[i] = a[i] + b[i];
    return out;
}

// Apportion an integer total across fractions with largest-remainder
// rounding; remainder ties go to the smaller index.
inline std::vector<i64> apportion(i64 total, const std::vector<double>& fractions) {
    std::size_t n = fractions.size();
    std::vector<i64> out(n, 0);
    std::vector<std::pair<double, std::size_t>> rema(n);
    i64 assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double quota = double(total) * fractions[i];
        i64 base = i64(quota);
        out[i] = base;
        assigned += base;
        rema[i] = {quota - double(base), i};
    }
    i64 leftover = total - assigned;
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (i64 k = 0; k < leftover && k < i64(n); ++k) out[rema[std::size_t(k)].second] += 1;
    return out;
}

inline void check_fractions(const std::vector<double>& fractions) {
    double sum = 0.0;
    for (double f : fractions) {
        if (f < 0.0 || f > 1.0 + 1e-12)
            throw ValidationError("split fraction outside [0,1]");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("split fractions sum to " + std::to_string(sum) + ", expected 1");
}

// Area-proportional schedule split. The last child absorbs the floating
// point residue so the children always sum back to the parent exactly.
inline std::vector<Schedule> split_schedule(const Schedule& parent,
                                            const std::vector<double>& fractions) {
    check_fractions(fractions);
    std::size_t n = fractions.size();
    std::vector<Schedule> children(n);
    for (const auto& [poi, freq] : parent.entries) {
        double used = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double part = freq * fractions[i];
            if (part != 0.0) children[i].entries[poi] = part;
            used += part;
        }
        double last = freq - used;
        if (last < 0.0) last = 0.0;
        if (last != 0.0 || n == 1) children[n - 1].entries[poi] = last;
    }
    return children;
}

inline std::vector<Demographics> split_demographics(const Demographics& parent,
                                                    const std::vector<double>& fractions) {
    check_fractions(fractions);
    std::vector<Demographics> children(fractions.size(), Demographics{});
    for (int b = 0; b < kAgeBuckets; ++b) {
        std::vector<i64> parts = apportion(parent[b], fractions);
        for (std::size_t i = 0; i < parts.size(); ++i) children[i][b] = parts[i];
    }
    return children;
}

inline Schedule merge_schedules(const std::vector<Schedule>& children) {
    Schedule out;
    for (const Schedule& c : children)
        for (const auto& [poi, freq] : c.entries) out.add(poi, freq);
    return out;
}

}  // namespace aic
