#pragma once

// Discrete-event simulation of one scenario run.
//
// Time advances over grid instants. At each instant all due moves happen
// first (ascending node id), then bundle creations, then the routing policy
// is run to a fixpoint at every location that changed. Mobility, traffic and
// policy randomness come from separate substreams of the master seed, so
// every policy sees the same movement trace and the same traffic.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "config.hpp"
#include "mobility.hpp"
#include "patterns.hpp"
#include "rng.hpp"
#include "routing.hpp"

namespace dtnspace {

struct TrafficItem {
    Tick at = 0;
    NodeId source;
    NodeId destination;
};

/// Periodic traffic for every ordered pair of nodes. Each pair starts at a
/// uniform offset in [0, interval) and sends every interval while the send
/// time is at most traffic_horizon - packet_interval. Sorted by (time,
/// source, destination); that order also assigns bundle ids.
inline std::vector<TrafficItem> traffic_schedule(const ScenarioConfig& c, RandomStream& rng) {
    const TimeGrid grid{c.time_step};
    const Tick interval = grid.to_ticks(c.packet_interval);
    const Tick last = grid.to_ticks(c.traffic_horizon) - interval;
    std::vector<TrafficItem> out;
    for (std::uint32_t s = 0; s < c.n_nodes; ++s) {
        for (std::uint32_t t = 0; t < c.n_nodes; ++t) {
            if (s == t) continue;
            const Tick first =
                std::min(grid.floor_ticks(rng.uniform01() * c.packet_interval), interval - 1);
            for (Tick at = first; at <= last; at += interval) out.push_back({at, NodeId(s), NodeId(t)});
        }
    }
    std::sort(out.begin(), out.end(), [](const TrafficItem& a, const TrafficItem& b) {
        if (a.at != b.at) return a.at < b.at;
        if (a.source != b.source) return a.source < b.source;
        return a.destination < b.destination;
    });
    return out;
}

struct RunLabel {
    Policy policy = Policy::epidemic;
    std::optional<MetricId> metric;  // pattern policy only
    double d = 1.0;
    std::uint32_t knowledge = 0;  // pattern policy only
    std::uint64_t seed = 0;

    friend bool operator==(const RunLabel&, const RunLabel&) = default;
};

inline RunLabel label_of(const ScenarioConfig& c) {
    RunLabel l;
    l.policy = c.policy.value_or(Policy::epidemic);
    l.d = c.d.value_or(1.0);
    l.seed = c.seed;
    if (l.policy == Policy::pattern) {
        l.metric = c.metric;
        l.knowledge = c.knowledge_level();
    }
    return l;
}

struct BundleRecord {
    BundleId id = 0;
    NodeId source;
    NodeId destination;
    Tick created_at = 0;
    std::optional<Tick> delivered_at;
    std::uint32_t hops = 0;

    friend bool operator==(const BundleRecord&, const BundleRecord&) = default;
};

struct ActionRecord {
    Tick at = 0;
    TransferAction action;

    friend bool operator==(const ActionRecord&, const ActionRecord&) = default;
};

struct RunStats {
    RunLabel label;
    double time_step = 0.01;
    std::vector<BundleRecord> bundles;  // indexed by bundle id
    std::vector<MoveRecord> moves;      // only with RunOptions::record_moves
    std::vector<ActionRecord> actions;  // only with RunOptions::record_actions

    std::size_t generated() const { return bundles.size(); }
    std::size_t delivered() const {
        return static_cast<std::size_t>(
            std::count_if(bundles.begin(), bundles.end(), [](const auto& b) { return b.delivered_at.has_value(); }));
    }
};

struct RunOptions {
    bool record_moves = false;
    bool record_actions = false;
    /// Re-examine every bundle at a changed location on every pass instead of
    /// only the bundles that can have new options. Results are identical;
    /// this exists to check exactly that.
    bool full_reevaluation = false;
    /// Explicit per-node patterns in place of the power-law construction.
    std::optional<std::vector<MobilityPattern>> patterns;
};

/// Per-node patterns drawn from the master seed: a random rank permutation
/// per node, shaped by exponent d.
inline std::vector<MobilityPattern> node_patterns(const ScenarioConfig& c) {
    std::vector<MobilityPattern> out;
    out.reserve(c.n_nodes);
    for (std::uint32_t n = 0; n < c.n_nodes; ++n) {
        RandomStream rng(derive_seed(c.seed, "patterns", n));
        out.push_back(build_pattern(c.d.value(), random_rank_assignment(c.n_locations, rng)));
    }
    return out;
}

namespace detail {

class Simulation {
public:
    Simulation(const ScenarioConfig& config, const RunOptions& options)
        : cfg_(config),
          opt_(options),
          grid_{config.time_step},
          model_{config.t_min, config.t_max, grid_},
          patterns_(options.patterns ? *options.patterns : node_patterns(config)),
          policy_(config.policy.value()),
          policy_rng_(derive_seed(config.seed, "policy")),
          world_(config.n_locations, config.n_nodes),
          custody_(0, 0),
          visits_(0, 0) {
        if (patterns_.size() != cfg_.n_nodes) throw std::invalid_argument("need one pattern per node");
        for (const auto& p : patterns_)
            if (p.size() != cfg_.n_locations) throw std::invalid_argument("pattern length differs from n_locations");

        RandomStream traffic_rng(derive_seed(cfg_.seed, "traffic"));
        schedule_ = traffic_schedule(cfg_, traffic_rng);
        bundles_.reserve(schedule_.size());
        for (std::size_t i = 0; i < schedule_.size(); ++i) {
            Bundle b;
            b.id = static_cast<BundleId>(i);
            b.source = schedule_[i].source;
            b.destination = schedule_[i].destination;
            b.created_at = schedule_[i].at;
            bundles_.push_back(b);
        }
        custody_ = CustodyTable(cfg_.n_nodes, bundles_.size());
        visits_ = VisitLog(cfg_.n_nodes, bundles_.size());

        if (policy_ == Policy::pattern) {
            const KnowledgeOracle oracle(patterns_, cfg_.knowledge_level(), cfg_.truncation);
            scores_.emplace(oracle, cfg_.metric_kind());
        }

        mobility_rng_.reserve(cfg_.n_nodes);
        for (std::uint32_t n = 0; n < cfg_.n_nodes; ++n) {
            mobility_rng_.emplace_back(derive_seed(cfg_.seed, "mobility", n));
            nodes_.push_back(place_node(NodeId(n), patterns_[n], 0, model_, mobility_rng_.back()));
            world_.place(NodeId(n), nodes_.back().location);
        }
        dirty_.assign(cfg_.n_locations, Dirty::none);
        fresh_.resize(cfg_.n_locations);
    }

    RunStats run() {
        const Tick end = grid_.to_ticks(cfg_.duration);
        std::size_t next_bundle = 0;
        for (;;) {
            Tick now = std::numeric_limits<Tick>::max();
            for (const auto& s : nodes_) now = std::min(now, s.next_move_at);
            if (next_bundle < schedule_.size()) now = std::min(now, schedule_[next_bundle].at);
            if (now > end) break;

            for (auto& s : nodes_) {
                if (s.next_move_at != now) continue;
                const LocationId from = s.location;
                s = advance_node(s, now, model_, mobility_rng_[s.node.value]);
                world_.place(s.node, s.location);
                visits_.clear(s.node);
                touch(from);
                touch(s.location);
                if (opt_.record_moves) moves_.push_back({now, s.node, from, s.location});
            }

            while (next_bundle < schedule_.size() && schedule_[next_bundle].at == now) {
                const auto& item = schedule_[next_bundle];
                const auto id = static_cast<BundleId>(next_bundle);
                custody_.give(item.source, id, 0);
                const LocationId loc = nodes_[item.source.value].location;
                if (dirty_[loc.value] == Dirty::none) {
                    dirty_[loc.value] = Dirty::fresh_only;
                    changed_.push_back(loc);
                }
                fresh_[loc.value].push_back(id);
                ++next_bundle;
            }

            std::sort(changed_.begin(), changed_.end());
            for (LocationId loc : changed_) {
                settle(loc, now);
                dirty_[loc.value] = Dirty::none;
                fresh_[loc.value].clear();
            }
            changed_.clear();
        }
        return stats();
    }

private:
    enum class Dirty : std::uint8_t { none, fresh_only, population };

    void touch(LocationId loc) {
        if (dirty_[loc.value] == Dirty::none) changed_.push_back(loc);
        dirty_[loc.value] = Dirty::population;
    }

    std::vector<BundleId> everything_at(std::span<const NodeId> here) const {
        if (policy_ == Policy::epidemic && !opt_.full_reevaluation) return unsaturated_bundles_at(here, custody_);
        return bundles_at(here, custody_);
    }

    std::vector<TransferAction> decide(std::span<const NodeId> here, std::span<const BundleId> work) {
        switch (policy_) {
            case Policy::epidemic: return epidemic_decide(here, work, custody_, bundles_);
            case Policy::opportunistic: return opportunistic_decide(here, work, custody_, bundles_);
            case Policy::random: return random_decide(here, work, custody_, bundles_, visits_, policy_rng_);
            case Policy::pattern: return pattern_greedy_decide(here, work, custody_, bundles_, *scores_, visits_);
        }
        return {};
    }

    // Runs the policy at one location until it proposes nothing more. Only
    // bundles that just arrived or just moved can have new options unless the
    // population changed.
    void settle(LocationId loc, Tick now) {
        const auto here = world_.colocated_nodes(loc);
        std::vector<BundleId> work = (dirty_[loc.value] == Dirty::population || opt_.full_reevaluation)
                                         ? everything_at(here)
                                         : fresh_[loc.value];
        while (!work.empty()) {
            const auto actions = decide(here, work);
            if (actions.empty()) break;
            if (opt_.record_actions)
                for (const auto& a : actions) actions_.push_back({now, a});
            auto moved = apply_actions(actions, policy_, now, custody_, bundles_, visits_);
            work = opt_.full_reevaluation ? everything_at(here) : std::move(moved);
        }
    }

    RunStats stats() {
        RunStats out;
        out.label = label_of(cfg_);
        out.time_step = cfg_.time_step;
        out.bundles.reserve(bundles_.size());
        for (const auto& b : bundles_)
            out.bundles.push_back({b.id, b.source, b.destination, b.created_at, b.delivered_at,
                                   b.delivered_at ? b.hops : 0u});
        out.moves = std::move(moves_);
        out.actions = std::move(actions_);
        return out;
    }

    ScenarioConfig cfg_;
    RunOptions opt_;
    TimeGrid grid_;
    MovementModel model_;
    std::vector<MobilityPattern> patterns_;
    Policy policy_;
    RandomStream policy_rng_;
    std::vector<RandomStream> mobility_rng_;
    std::vector<NodeState> nodes_;
    Colocation world_;
    std::vector<TrafficItem> schedule_;
    std::vector<Bundle> bundles_;
    CustodyTable custody_;
    VisitLog visits_;
    std::optional<ScoreTable> scores_;

    std::vector<Dirty> dirty_;
    std::vector<std::vector<BundleId>> fresh_;
    std::vector<LocationId> changed_;
    std::vector<MoveRecord> moves_;
    std::vector<ActionRecord> actions_;
};

}  // namespace detail

/// One complete run; fully determined by the config (including its seed).
inline RunStats run(const ScenarioConfig& config, const RunOptions& options = {}) {
    validate_for_run(config);
    return detail::Simulation(config, options).run();
}

/// The config repeated over seeds seed, seed + 1, ..., seed + runs - 1.
inline std::vector<ScenarioConfig> expand_seeds(const ScenarioConfig& config) {
    std::vector<ScenarioConfig> out;
    for (std::uint32_t r = 0; r < config.runs; ++r) {
        ScenarioConfig c = config;
        c.seed = config.seed + r;
        out.push_back(c);
    }
    return out;
}

/// Independent runs, up to `jobs` at a time. Results are in input order.
inline std::vector<RunStats> run_matrix(std::span<const ScenarioConfig> configs, unsigned jobs = 1,
                                        const RunOptions& options = {}) {
    for (const auto& c : configs) validate_for_run(c);
    std::vector<RunStats> results(configs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < configs.size() && !failed;) {
            try {
                results[i] = detail::Simulation(configs[i], options).run();
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace dtnspace
