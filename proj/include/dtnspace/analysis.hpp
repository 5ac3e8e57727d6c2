#pragma once

// Post-processing of run results: mean delay and route length, Student-t
// confidence intervals, delay differences against Epidemic and delay
// evolution over time.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "engine.hpp"

namespace dtnspace {

struct ConfidenceInterval {
    double mean = 0.0;
    double half_width = 0.0;
    double level = 0.90;
    std::size_t n = 0;
};

inline double mean_delay(const RunStats& s) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& b : s.bundles) {
        if (!b.delivered_at) continue;
        sum += static_cast<double>(*b.delivered_at - b.created_at) * s.time_step;
        ++n;
    }
    if (n == 0) throw std::domain_error("mean delay of a run without deliveries");
    return sum / static_cast<double>(n);
}

inline double mean_route_length(const RunStats& s) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& b : s.bundles) {
        if (!b.delivered_at) continue;
        sum += b.hops;
        ++n;
    }
    if (n == 0) throw std::domain_error("mean route length of a run without deliveries");
    return sum / static_cast<double>(n);
}

inline double delivery_ratio(const RunStats& s) {
    return s.bundles.empty() ? 0.0 : static_cast<double>(s.delivered()) / static_cast<double>(s.generated());
}

/// Two-sided 90% Student-t critical value. Degrees of freedom beyond the
/// table use the largest tabulated df not exceeding them.
inline double student_t_90(std::size_t df) {
    static constexpr std::array<double, 30> small = {
        6.314, 2.920, 2.353, 2.132, 2.015, 1.943, 1.895, 1.860, 1.833, 1.812,
        1.796, 1.782, 1.771, 1.761, 1.753, 1.746, 1.740, 1.734, 1.729, 1.725,
        1.721, 1.717, 1.714, 1.711, 1.708, 1.706, 1.703, 1.701, 1.699, 1.697};
    if (df == 0) throw std::invalid_argument("t quantile needs df >= 1");
    if (df <= small.size()) return small[df - 1];
    if (df < 40) return small.back();
    if (df < 60) return 1.684;
    if (df < 120) return 1.671;
    return 1.658;
}

inline ConfidenceInterval student_t_ci(std::span<const double> samples, double level = 0.90) {
    if (level != 0.90) throw std::invalid_argument("only the 90% level is tabulated");
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("confidence interval needs at least 2 samples");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return {mean, student_t_90(n - 1) * sd / std::sqrt(static_cast<double>(n)), level, n};
}

/// Per-bundle delay minus Epidemic's delay for the same bundle, in 1 s bins
/// keyed by the bin's lower edge.
struct DelayHistogram {
    std::map<std::int64_t, std::size_t> bins;
    std::size_t matched = 0;
    std::size_t only_in_x = 0;    // delivered by the policy but not by Epidemic
    std::size_t only_in_epi = 0;  // delivered by Epidemic but not by the policy

    bool has_negative_bins() const { return !bins.empty() && bins.begin()->first < 0; }

    /// Pools another histogram into this one.
    DelayHistogram& operator+=(const DelayHistogram& o) {
        for (const auto& [bin, count] : o.bins) bins[bin] += count;
        matched += o.matched;
        only_in_x += o.only_in_x;
        only_in_epi += o.only_in_epi;
        return *this;
    }
};

inline DelayHistogram delay_vs_epidemic(const RunStats& x, const RunStats& epi) {
    if (x.bundles.size() != epi.bundles.size() || x.time_step != epi.time_step)
        throw std::invalid_argument("runs do not share a bundle set");
    DelayHistogram h;
    for (std::size_t i = 0; i < x.bundles.size(); ++i) {
        const auto& a = x.bundles[i];
        const auto& e = epi.bundles[i];
        if (a.id != e.id || a.source != e.source || a.destination != e.destination || a.created_at != e.created_at)
            throw std::invalid_argument("runs do not share a bundle set");
        if (a.delivered_at && e.delivered_at) {
            // Integer tick difference keeps the bin assignment exact.
            const Tick diff = *a.delivered_at - *e.delivered_at;
            const double seconds = static_cast<double>(diff) * x.time_step;
            ++h.bins[static_cast<std::int64_t>(std::floor(seconds))];
            ++h.matched;
        } else if (a.delivered_at) {
            ++h.only_in_x;
        } else if (e.delivered_at) {
            ++h.only_in_epi;
        }
    }
    return h;
}

/// Mean delay of the bundles delivered in each 100 s bucket of the run.
struct EvolutionSeries {
    double bucket_seconds = 100.0;
    std::vector<std::optional<double>> mean_delay;  // empty bucket: nullopt
};

/// Pools the deliveries of all given runs into one series.
inline EvolutionSeries delay_evolution(std::span<const RunStats> runs, double duration,
                                       double bucket_seconds = 100.0) {
    if (!(bucket_seconds > 0.0) || !(duration > 0.0)) throw std::invalid_argument("bad evolution bucket");
    const auto n_buckets = static_cast<std::size_t>(std::ceil(duration / bucket_seconds));
    std::vector<double> sum(n_buckets, 0.0);
    std::vector<std::size_t> count(n_buckets, 0);
    for (const auto& s : runs) {
        for (const auto& b : s.bundles) {
            if (!b.delivered_at) continue;
            const double at = static_cast<double>(*b.delivered_at) * s.time_step;
            const auto k = std::min(n_buckets - 1, static_cast<std::size_t>(at / bucket_seconds));
            sum[k] += static_cast<double>(*b.delivered_at - b.created_at) * s.time_step;
            ++count[k];
        }
    }
    EvolutionSeries out;
    out.bucket_seconds = bucket_seconds;
    out.mean_delay.resize(n_buckets);
    for (std::size_t k = 0; k < n_buckets; ++k)
        if (count[k]) out.mean_delay[k] = sum[k] / static_cast<double>(count[k]);
    return out;
}

inline EvolutionSeries delay_evolution(const RunStats& s, double duration, double bucket_seconds = 100.0) {
    return delay_evolution(std::span<const RunStats>(&s, 1), duration, bucket_seconds);
}

/// One experiment cell: a policy, its metric and knowledge level, and d.
struct CellKey {
    Policy policy = Policy::epidemic;
    std::optional<MetricId> metric;
    double d = 1.0;
    std::uint32_t knowledge = 0;

    static CellKey of(const RunLabel& l) { return {l.policy, l.metric, l.d, l.knowledge}; }

    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

/// Per-run summary; the input to aggregation.
struct RunSummary {
    RunLabel label;
    std::optional<double> mean_delay;  // absent without deliveries
    std::optional<double> mean_hops;
    double delivery_ratio = 0.0;
};

inline RunSummary summarize(const RunStats& s) {
    RunSummary r;
    r.label = s.label;
    r.delivery_ratio = delivery_ratio(s);
    if (s.delivered() > 0) {
        r.mean_delay = mean_delay(s);
        r.mean_hops = mean_route_length(s);
    }
    return r;
}

/// Aggregated cell. Half-widths are absent with a single run.
struct TableRow {
    CellKey key;
    std::size_t runs = 0;
    double mean_delay = 0.0;
    std::optional<double> delay_half_width;
    double mean_hops = 0.0;
    std::optional<double> hops_half_width;
    double delivery_ratio = 0.0;
};

/// Groups per-run summaries by cell and computes intervals over the per-run
/// means. Rows come out in cell order, so d ascends within a policy.
/// Throws if a cell has a run without deliveries or fewer than min_runs runs.
inline std::vector<TableRow> aggregate_table(std::span<const RunSummary> runs, std::size_t min_runs = 2) {
    std::map<CellKey, std::vector<const RunSummary*>> cells;
    for (const auto& r : runs) cells[CellKey::of(r.label)].push_back(&r);
    std::vector<TableRow> out;
    for (const auto& [key, members] : cells) {
        if (members.size() < min_runs) throw std::invalid_argument("cell has too few runs");
        std::vector<double> delays, hops;
        double ratio = 0.0;
        for (const auto* m : members) {
            if (!m->mean_delay) throw std::domain_error("cell contains a run without deliveries");
            delays.push_back(*m->mean_delay);
            hops.push_back(*m->mean_hops);
            ratio += m->delivery_ratio;
        }
        TableRow row;
        row.key = key;
        row.runs = members.size();
        row.delivery_ratio = ratio / static_cast<double>(members.size());
        if (members.size() >= 2) {
            const auto dc = student_t_ci(delays);
            const auto hc = student_t_ci(hops);
            row.mean_delay = dc.mean;
            row.delay_half_width = dc.half_width;
            row.mean_hops = hc.mean;
            row.hops_half_width = hc.half_width;
        } else {
            row.mean_delay = delays.front();
            row.mean_hops = hops.front();
        }
        out.push_back(row);
    }
    return out;
}

inline std::vector<TableRow> aggregate_table(std::span<const RunStats> runs, std::size_t min_runs = 2) {
    std::vector<RunSummary> s;
    s.reserve(runs.size());
    for (const auto& r : runs) s.push_back(summarize(r));
    return aggregate_table(std::span<const RunSummary>(s), min_runs);
}

}  // namespace dtnspace
