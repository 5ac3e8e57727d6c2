// Command-line front end: single runs, the experiment matrix, table
// regeneration from record files, and the property suite.

#include <CLI11.hpp>

#include <dtnspace/analysis.hpp>
#include <dtnspace/config.hpp>
#include <dtnspace/engine.hpp>
#include <dtnspace/io.hpp>
#include <dtnspace/verify.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace dtnspace;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitVerify = 3;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::optional<std::string> policy;
    std::optional<std::string> metric;
    std::optional<std::string> d;
    std::optional<std::string> knowledge;
    std::optional<std::string> seed;
    std::optional<std::string> runs;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    std::string out = "out";
};

void add_common(CLI::App& cmd, Options& o) {
    cmd.add_option("--config", o.config_path, "Scenario config file (key = value)");
    cmd.add_option("--policy", o.policy, "epidemic | opportunistic | random | pattern");
    cmd.add_option("--metric", o.metric, "euclidean | canberra | angle | matching");
    cmd.add_option("--d", o.d, "Power-law exponent");
    cmd.add_option("--knowledge", o.knowledge, "Known pattern components l");
    cmd.add_option("--seed", o.seed, "Master seed of the first run");
    cmd.add_option("--runs", o.runs, "Runs per cell, on consecutive seeds");
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class Fn>
void write_file(const fs::path& p, Fn&& fill) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    fill(out);
    out.flush();
    if (!out) throw IoError("write failed for " + p.string());
}

/// File values first, then command-line overrides.
ScenarioConfig load_config(const Options& o) {
    ScenarioConfig c = o.config_path.empty() ? ScenarioConfig{} : parse_config(read_file(o.config_path));
    auto set = [&](const char* key, const std::optional<std::string>& v) {
        if (v) set_config_value(c, key, *v);
    };
    set("policy", o.policy);
    set("metric", o.metric);
    set("d", o.d);
    set("knowledge", o.knowledge);
    set("seed", o.seed);
    set("runs", o.runs);
    validate(c);
    return c;
}

void make_dirs(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create " + p.string() + ": " + ec.message());
}

/// Runs the configs in batches of `jobs` and writes each record file as soon
/// as its batch finishes, so memory stays bounded.
void simulate_to_records(const std::vector<ScenarioConfig>& configs, unsigned jobs, const fs::path& records) {
    make_dirs(records);
    for (const auto& c : configs) validate_for_run(c);
    for (std::size_t i = 0; i < configs.size(); i += jobs) {
        const std::size_t end = std::min(configs.size(), i + jobs);
        const auto batch = run_matrix(std::span(configs).subspan(i, end - i), jobs);
        for (const auto& s : batch) {
            write_file(records / record_file_name(s.label), [&](std::ostream& os) { write_records(os, s); });
            std::fprintf(stderr, "%s: %zu/%zu delivered\n", run_id(s.label).c_str(), s.delivered(), s.generated());
        }
    }
}

RunStats load_record(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    try {
        return read_records(in);
    } catch (const FormatError& e) {
        throw IoError(p.string() + ": " + e.what());
    }
}

/// Rebuilds every table, histogram and evolution file under `out` from the
/// record files in out/records.
void write_tables(const fs::path& out, double duration) {
    const fs::path records = out / "records";
    if (!fs::is_directory(records)) throw IoError("no records directory under " + out.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(records))
        if (e.is_regular_file() && e.path().extension() == ".tsv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no record files in " + records.string());

    // Group files by cell from their header lines only.
    std::map<CellKey, std::vector<fs::path>> cells;
    std::map<std::pair<double, std::uint64_t>, fs::path> epidemic;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::string head, columns;
        std::getline(in, head);
        std::getline(in, columns);
        std::istringstream text(head + "\n" + columns + "\n");
        RunLabel label;
        try {
            label = read_records(text).label;
        } catch (const FormatError& e) {
            throw IoError(f.string() + ": " + e.what());
        }
        cells[CellKey::of(label)].push_back(f);
        if (label.policy == Policy::epidemic) epidemic[{label.d, label.seed}] = f;
    }

    std::vector<RunSummary> summaries;
    for (const auto& [key, paths] : cells) {
        std::vector<RunStats> runs;
        for (const auto& p : paths) runs.push_back(load_record(p));
        for (const auto& r : runs) summaries.push_back(summarize(r));
        const std::string id = cell_id(key);
        write_file(out / ("evolution_" + id + ".tsv"),
                   [&](std::ostream& os) { write_evolution(os, delay_evolution(runs, duration)); });
        if (key.policy == Policy::epidemic) continue;
        DelayHistogram hist;
        bool complete = true;
        for (const auto& r : runs) {
            const auto it = epidemic.find({r.label.d, r.label.seed});
            if (it == epidemic.end()) {
                complete = false;
                break;
            }
            hist += delay_vs_epidemic(r, load_record(it->second));
        }
        if (complete)
            write_file(out / ("hist_" + id + ".tsv"), [&](std::ostream& os) { write_histogram(os, hist); });
    }

    const auto rows = aggregate_table(std::span<const RunSummary>(summaries), 1);
    write_file(out / "tables.tsv", [&](std::ostream& os) { write_table(os, rows); });

    std::uint32_t full = 0;
    for (const auto& r : rows) full = std::max(full, r.key.knowledge);
    const auto baseline_or_full = [full](const CellKey& k) { return k.policy != Policy::pattern || k.knowledge == full; };
    const auto pattern_only = [](const CellKey& k) { return k.policy == Policy::pattern; };
    write_file(out / "table_delay.tsv", [&](std::ostream& os) { write_pivot(os, rows, Quantity::delay, baseline_or_full); });
    write_file(out / "table_hops.tsv", [&](std::ostream& os) { write_pivot(os, rows, Quantity::hops, baseline_or_full); });
    write_file(out / "table_knowledge_delay.tsv",
               [&](std::ostream& os) { write_pivot(os, rows, Quantity::delay, pattern_only); });
    write_file(out / "table_knowledge_hops.tsv",
               [&](std::ostream& os) { write_pivot(os, rows, Quantity::hops, pattern_only); });
}

int cmd_run(const Options& o) {
    const ScenarioConfig c = load_config(o);
    validate_for_run(c);
    const fs::path out(o.out);
    simulate_to_records(expand_seeds(c), std::max(1u, o.jobs), out / "records");
    write_tables(out, c.duration);
    std::cout << read_file(out / "tables.tsv");
    return 0;
}

/// The experiment grid: every d, the three baselines and the pattern policy
/// under every metric and knowledge level. Options narrow the grid.
std::vector<ScenarioConfig> matrix_grid(const ScenarioConfig& base, const Options& o) {
    std::vector<double> ds = {1.1, 1.5, 2.0};
    if (o.d) ds = {base.d.value()};
    std::vector<Policy> policies = {Policy::epidemic, Policy::opportunistic, Policy::random, Policy::pattern};
    if (o.policy) policies = {base.policy.value()};
    std::vector<MetricId> metrics = {MetricId::euclidean, MetricId::canberra, MetricId::angle, MetricId::matching};
    if (o.metric) metrics = {base.metric.value()};
    std::vector<std::uint32_t> levels;
    if (o.knowledge) {
        levels = {base.knowledge.value()};
    } else {
        for (std::uint32_t l : {1u, 2u, 3u, 4u})
            if (l < base.n_locations) levels.push_back(l);
        levels.push_back(base.n_locations);
    }

    std::vector<ScenarioConfig> out;
    for (double d : ds) {
        for (Policy p : policies) {
            ScenarioConfig c = base;
            c.d = d;
            c.policy = p;
            if (p != Policy::pattern) {
                c.metric.reset();
                c.knowledge.reset();
                for (const auto& s : expand_seeds(c)) out.push_back(s);
                continue;
            }
            for (MetricId m : metrics) {
                for (std::uint32_t l : levels) {
                    c.metric = m;
                    c.knowledge = l;
                    for (const auto& s : expand_seeds(c)) out.push_back(s);
                }
            }
        }
    }
    return out;
}

int cmd_matrix(const Options& o) {
    const ScenarioConfig base = load_config(o);
    const auto configs = matrix_grid(base, o);
    const fs::path out(o.out);
    simulate_to_records(configs, std::max(1u, o.jobs), out / "records");
    write_tables(out, base.duration);
    std::cout << read_file(out / "table_delay.tsv") << '\n' << read_file(out / "table_hops.tsv");
    return 0;
}

int cmd_tables(const Options& o) {
    const ScenarioConfig c = load_config(o);
    write_tables(o.out, c.duration);
    std::cout << read_file(fs::path(o.out) / "tables.tsv");
    return 0;
}

int cmd_verify(const Options& o) {
    if (!o.config_path.empty()) load_config(o);
    bool ok = true;
    for (const auto& r : run_verify_suite()) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.passed) std::cout << ": " << r.detail;
        std::cout << '\n';
        ok = ok && r.passed;
    }
    return ok ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mobility-pattern routing simulator for delay tolerant networks"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "Simulate one cell over --runs seeds");
    auto* matrix = app.add_subcommand("matrix", "Simulate the full experiment grid");
    auto* tables = app.add_subcommand("tables", "Rebuild tables from the record files in --out");
    auto* verify = app.add_subcommand("verify", "Run the property suite");
    for (auto* cmd : {run, matrix, tables}) {
        add_common(*cmd, o);
        cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    }
    for (auto* cmd : {run, matrix}) cmd->add_option("--jobs", o.jobs, "Concurrent simulations")->check(CLI::PositiveNumber);
    verify->add_option("--config", o.config_path, "Config file to validate first");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*run) return cmd_run(o);
        if (*matrix) return cmd_matrix(o);
        if (*tables) return cmd_tables(o);
        return cmd_verify(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    }
}
