#pragma once

// Tab-separated text formats: per-run bundle records, aggregated tables,
// histograms and evolution series. Records parse back exactly, so tables
// can be rebuilt from record files alone.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "analysis.hpp"
#include "engine.hpp"

namespace dtnspace {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Decimal places needed to print multiples of the time step exactly.
inline int tick_decimals(double step) {
    int k = 0;
    while (k < 9 && std::abs(step * std::pow(10.0, k) - std::round(step * std::pow(10.0, k))) > 1e-9) ++k;
    return k;
}

inline std::string fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

/// Shortest text that parses back to the same double.
inline std::string shortest(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::logic_error("number formatting failed");
    return std::string(buf, ptr);
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto t = line.find('\t');
        out.push_back(line.substr(0, t));
        if (t == std::string_view::npos) return out;
        line = line.substr(t + 1);
    }
}

template <class T>
T parse_field(std::string_view text, std::string_view what) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw FormatError("bad " + std::string(what) + " field '" + std::string(text) + "'");
    return value;
}

inline std::string metric_field(const RunLabel& l) {
    return l.metric ? std::string(metric_name(*l.metric)) : "-";
}
inline std::string knowledge_field(const RunLabel& l) {
    return l.policy == Policy::pattern ? std::to_string(l.knowledge) : "-";
}

inline RunLabel parse_label(std::string_view policy, std::string_view metric, std::string_view d,
                            std::string_view knowledge) {
    RunLabel l;
    const auto p = parse_policy(policy);
    if (!p) throw FormatError("unknown policy '" + std::string(policy) + "'");
    l.policy = *p;
    if (l.policy == Policy::pattern) {
        l.metric = parse_metric(metric);
        if (!l.metric) throw FormatError("unknown metric '" + std::string(metric) + "'");
        l.knowledge = parse_field<std::uint32_t>(knowledge, "l");
    } else if (metric != "-" || knowledge != "-") {
        throw FormatError("metric and l must be '-' for " + std::string(policy));
    }
    l.d = parse_field<double>(d, "d");
    return l;
}

}  // namespace detail

/// Identifier of an experiment cell, e.g. "pattern_euclidean_l25_d1.5".
inline std::string cell_id(const CellKey& k) {
    std::string s(policy_name(k.policy));
    if (k.policy == Policy::pattern)
        s += "_" + std::string(metric_name(k.metric.value())) + "_l" + std::to_string(k.knowledge);
    return s + "_d" + detail::shortest(k.d);
}

/// Cell-and-seed identifier, also used as the record file stem.
inline std::string run_id(const RunLabel& l) { return cell_id(CellKey::of(l)) + "_s" + std::to_string(l.seed); }

inline std::string record_file_name(const RunLabel& l) { return run_id(l) + ".tsv"; }

inline constexpr std::string_view kRecordColumns =
    "run_id\tpolicy\tmetric\td\tl\tbundle_id\tsource\tdest\tcreated_at\tdelivered_at\thops";

/// One row per bundle. Times are in seconds; delivered_at is empty for
/// undelivered bundles. A leading comment line carries the run label.
inline void write_records(std::ostream& os, const RunStats& s) {
    const auto& l = s.label;
    const int dec = detail::tick_decimals(s.time_step);
    const std::string id = run_id(l);
    const std::string prefix = id + "\t" + std::string(policy_name(l.policy)) + "\t" + detail::metric_field(l) +
                               "\t" + detail::shortest(l.d) + "\t" + detail::knowledge_field(l) + "\t";
    os << "# policy=" << policy_name(l.policy) << " metric=" << detail::metric_field(l) << " d=" << detail::shortest(l.d)
       << " l=" << detail::knowledge_field(l) << " seed=" << l.seed << " time_step=" << detail::shortest(s.time_step)
       << "\n"
       << kRecordColumns << "\n";
    for (const auto& b : s.bundles) {
        os << prefix << b.id << '\t' << b.source.value << '\t' << b.destination.value << '\t'
           << detail::fixed(static_cast<double>(b.created_at) * s.time_step, dec) << '\t';
        if (b.delivered_at) os << detail::fixed(static_cast<double>(*b.delivered_at) * s.time_step, dec);
        os << '\t' << (b.delivered_at ? b.hops : 0u) << '\n';
    }
}

/// Parses a file produced by write_records. Moves and actions are not part
/// of the format and come back empty.
inline RunStats read_records(std::istream& is) {
    RunStats s;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw FormatError("missing record header comment");
    std::map<std::string, std::string, std::less<>> head;
    {
        std::istringstream in(line.substr(2));
        std::string kv;
        while (in >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw FormatError("bad header item '" + kv + "'");
            head[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
    }
    auto field = [&](std::string_view key) -> const std::string& {
        const auto it = head.find(key);
        if (it == head.end()) throw FormatError("record header lacks " + std::string(key));
        return it->second;
    };
    s.label = detail::parse_label(field("policy"), field("metric"), field("d"), field("l"));
    s.label.seed = detail::parse_field<std::uint64_t>(field("seed"), "seed");
    s.time_step = detail::parse_field<double>(field("time_step"), "time_step");
    if (!(s.time_step > 0.0)) throw FormatError("bad time_step in record header");
    if (!std::getline(is, line) || line != kRecordColumns) throw FormatError("unexpected record columns");

    const TimeGrid grid{s.time_step};
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_tabs(line);
        if (f.size() != 11) throw FormatError("record row has " + std::to_string(f.size()) + " fields");
        RunLabel l = detail::parse_label(f[1], f[2], f[3], f[4]);
        l.seed = s.label.seed;
        if (!(l == s.label) || f[0] != run_id(l)) throw FormatError("record row does not match the header");
        BundleRecord b;
        b.id = detail::parse_field<BundleId>(f[5], "bundle_id");
        if (b.id != s.bundles.size()) throw FormatError("bundle ids out of sequence");
        b.source = NodeId(detail::parse_field<std::uint32_t>(f[6], "source"));
        b.destination = NodeId(detail::parse_field<std::uint32_t>(f[7], "dest"));
        b.created_at = grid.to_ticks(detail::parse_field<double>(f[8], "created_at"));
        if (!f[9].empty()) b.delivered_at = grid.to_ticks(detail::parse_field<double>(f[9], "delivered_at"));
        b.hops = detail::parse_field<std::uint32_t>(f[10], "hops");
        s.bundles.push_back(b);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Tables

inline constexpr std::string_view kTableColumns =
    "policy\tmetric\td\tl\tmean_delay\tdelay_halfwidth\tmean_hops\thops_halfwidth\tdelivery_ratio";

/// One row per cell; absent half-widths are written as NA.
inline void write_table(std::ostream& os, std::span<const TableRow> rows) {
    auto opt = [](const std::optional<double>& x) { return x ? detail::fixed(*x, 4) : std::string("NA"); };
    os << kTableColumns << '\n';
    for (const auto& r : rows) {
        RunLabel l{r.key.policy, r.key.metric, r.key.d, r.key.knowledge, 0};
        os << policy_name(l.policy) << '\t' << detail::metric_field(l) << '\t' << detail::shortest(l.d) << '\t'
           << detail::knowledge_field(l) << '\t' << detail::fixed(r.mean_delay, 4) << '\t'
           << opt(r.delay_half_width) << '\t' << detail::fixed(r.mean_hops, 4) << '\t' << opt(r.hops_half_width)
           << '\t' << detail::fixed(r.delivery_ratio, 6) << '\n';
    }
}

/// Display name of a table row: the metric for pattern routing, otherwise
/// the policy.
inline std::string row_name(const CellKey& k) {
    return k.policy == Policy::pattern ? std::string(metric_name(k.metric.value())) : std::string(policy_name(k.policy));
}

enum class Quantity { delay, hops };

/// Pivot with one line per (row name, l) and one column per d, cells
/// formatted "mean +- halfwidth". `keep` selects the cells to include.
template <class Keep>
void write_pivot(std::ostream& os, std::span<const TableRow> rows, Quantity q, Keep keep) {
    std::set<double> ds;
    std::map<std::pair<std::string, std::uint32_t>, std::map<double, const TableRow*>> grid;
    std::vector<std::pair<std::string, std::uint32_t>> order;
    for (const auto& r : rows) {
        if (!keep(r.key)) continue;
        ds.insert(r.key.d);
        const auto name = std::make_pair(row_name(r.key), r.key.knowledge);
        if (!grid.count(name)) order.push_back(name);
        grid[name][r.key.d] = &r;
    }
    os << "name\tl";
    for (double d : ds) os << "\td=" << detail::shortest(d);
    os << '\n';
    for (const auto& name : order) {
        os << name.first << '\t' << (name.second ? std::to_string(name.second) : std::string("-"));
        for (double d : ds) {
            os << '\t';
            const auto it = grid[name].find(d);
            if (it == grid[name].end()) {
                os << "NA";
                continue;
            }
            const auto& r = *it->second;
            const double mean = q == Quantity::delay ? r.mean_delay : r.mean_hops;
            const auto& hw = q == Quantity::delay ? r.delay_half_width : r.hops_half_width;
            os << detail::fixed(mean, q == Quantity::delay ? 1 : 2);
            if (hw) os << " +- " << detail::fixed(*hw, q == Quantity::delay ? 1 : 2);
        }
        os << '\n';
    }
}

/// Two columns: bin lower edge in seconds and bundle count.
inline void write_histogram(std::ostream& os, const DelayHistogram& h) {
    os << "bin_start\tvalue\n";
    for (const auto& [bin, count] : h.bins) os << bin << '\t' << count << '\n';
}

/// Two columns: bucket start in seconds and mean delay, nan when empty.
inline void write_evolution(std::ostream& os, const EvolutionSeries& e) {
    os << "bin_start\tvalue\n";
    for (std::size_t k = 0; k < e.mean_delay.size(); ++k) {
        os << detail::shortest(static_cast<double>(k) * e.bucket_seconds) << '\t';
        os << (e.mean_delay[k] ? detail::fixed(*e.mean_delay[k], 4) : std::string("nan")) << '\n';
    }
}

}  // namespace dtnspace
