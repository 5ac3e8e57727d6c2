#pragma once

// Cross-module property checks on small instances. Each check reports a
// named pass/fail with a short explanation of the first counterexample.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "engine.hpp"
#include "metrics.hpp"
#include "patterns.hpp"
#include "routing.hpp"

namespace dtnspace {

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace verify_detail {

struct Failure {
    std::string what;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw Failure{what};
}

inline std::vector<double> random_pattern_vector(std::size_t n, double d, RandomStream& rng) {
    const auto p = build_pattern(d, random_rank_assignment(n, rng));
    return {p.probs().begin(), p.probs().end()};
}

inline std::vector<double> random_simplex_vector(std::size_t n, RandomStream& rng) {
    std::vector<double> v(n);
    double sum = 0.0;
    for (auto& x : v) sum += (x = rng.uniform01() + 1e-3);
    for (auto& x : v) x /= sum;
    return v;
}

inline void pattern_normalization() {
    RandomStream rng(derive_seed(7, "verify-patterns"));
    for (std::size_t n : {1u, 2u, 5u, 25u, 100u}) {
        for (double d : {1.0, 1.1, 1.5, 2.0, 5.0, 40.0}) {
            const auto v = random_pattern_vector(n, d, rng);
            double sum = 0.0;
            for (double x : v) {
                require(x >= 0.0, "negative probability");
                sum += x;
            }
            require(std::abs(sum - 1.0) <= 1e-12, "pattern sum off by " + std::to_string(sum - 1.0));
        }
    }
}

inline void metric_identities() {
    RandomStream rng(derive_seed(7, "verify-metrics"));
    constexpr std::size_t n = 25;
    for (int i = 0; i < 1000; ++i) {
        const auto a = i % 2 ? random_simplex_vector(n, rng) : random_pattern_vector(n, 1.0 + rng.uniform01(), rng);
        const auto b = random_simplex_vector(n, rng);
        require(euclidean_distance(a, b) == euclidean_distance(b, a), "euclidean not symmetric");
        require(canberra_distance(a, b) == canberra_distance(b, a), "canberra not symmetric");
        require(cosine_similarity(a, b) == cosine_similarity(b, a), "cosine not symmetric");
        require(matching_similarity(a, b, 0.01) == matching_similarity(b, a, 0.01), "matching not symmetric");
        require(euclidean_distance(a, a) == 0.0, "euclidean self-distance nonzero");
        require(canberra_distance(a, a) == 0.0, "canberra self-distance nonzero");
        require(std::abs(cosine_similarity(a, a) - 1.0) <= 1e-12, "cosine self-similarity not 1");
        require(matching_similarity(a, a, 0.0) == static_cast<int>(n), "matching self-similarity not N");
    }
}

inline void canberra_bound() {
    RandomStream rng(derive_seed(7, "verify-canberra"));
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 1 + rng.below(30);
        auto a = random_simplex_vector(n, rng);
        auto b = random_pattern_vector(n, 1.0 + 3.0 * rng.uniform01(), rng);
        if (i % 3 == 0) a[rng.below(n)] = 0.0;
        const double c = canberra_distance(a, b);
        require(c >= 0.0 && c <= static_cast<double>(n), "canberra outside [0, N]");
    }
}

inline void matching_monotone() {
    RandomStream rng(derive_seed(7, "verify-matching"));
    for (int i = 0; i < 1000; ++i) {
        const auto a = random_simplex_vector(25, rng);
        const auto b = random_simplex_vector(25, rng);
        int prev = -1;
        for (double delta : {0.0, 1e-8, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 1.0}) {
            const int m = matching_similarity(a, b, delta);
            require(m >= prev, "matching decreased as delta grew");
            prev = m;
        }
        require(prev == 25, "matching below N at delta 1");
    }
}

inline void euclidean_angle_order() {
    RandomStream rng(derive_seed(7, "verify-order"));
    for (int i = 0; i < 1000; ++i) {
        const double d = 1.0 + 2.0 * rng.uniform01();
        const auto t = random_pattern_vector(25, d, rng);
        const auto x = random_pattern_vector(25, d, rng);
        const auto y = random_pattern_vector(25, d, rng);
        const bool by_distance = euclidean_distance(x, t) < euclidean_distance(y, t);
        const bool by_angle = cosine_similarity(x, t) > cosine_similarity(y, t);
        // Exact ties in one metric may round apart in the other; they are
        // measure-zero and skipped.
        if (std::abs(euclidean_distance(x, t) - euclidean_distance(y, t)) < 1e-12) continue;
        require(by_distance == by_angle, "euclidean and angle orderings disagree");
    }
}

/// Exhaustive check of the greedy forwarding decision in a 5-node world:
/// every colocated subset, custodian, destination and metric.
inline void greedy_brute_force() {
    constexpr std::uint32_t n = 5;
    RandomStream rng(derive_seed(7, "verify-greedy"));
    for (int world = 0; world < 4; ++world) {
        std::vector<MobilityPattern> patterns;
        for (std::uint32_t i = 0; i < n; ++i)
            patterns.push_back(build_pattern(1.0 + world * 0.4, random_rank_assignment(6, rng)));
        // Two nodes share a pattern so score ties occur.
        patterns[3] = patterns[1];
        for (const auto metric :
             {MetricKind::euclidean(), MetricKind::canberra(), MetricKind::angle(), MetricKind::matching(1e-3)}) {
            for (const auto& [level, scope] : {std::pair{6u, TruncationScope::destination},
                                              std::pair{2u, TruncationScope::destination},
                                              std::pair{1u, TruncationScope::destination},
                                              std::pair{2u, TruncationScope::all},
                                              std::pair{1u, TruncationScope::all}}) {
                const KnowledgeOracle oracle(patterns, level, scope);
                const ScoreTable table(oracle, metric);
                for (std::uint32_t dest = 0; dest < n; ++dest) {
                    std::vector<Bundle> bundles(1);
                    bundles[0].destination = NodeId(dest);
                    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
                        std::vector<NodeId> nodes;
                        for (std::uint32_t i = 0; i < n; ++i)
                            if (mask >> i & 1u) nodes.push_back(NodeId(i));
                        for (NodeId c : nodes) {
                            if (c.value == dest) continue;
                            CustodyTable custody(n, 1);
                            custody.give(c, 0, 0);
                            const VisitLog visits(n, 1);
                            const auto got = pattern_greedy_decide(nodes, custody, bundles, table, visits);

                            std::optional<TransferAction> want;
                            if (mask >> dest & 1u) {
                                want = TransferAction{0, c, NodeId(dest), TransferKind::deliver};
                            } else {
                                const Score own = score_to_destination(c, NodeId(dest), oracle, metric);
                                std::optional<NodeId> best;
                                for (NodeId x : nodes) {
                                    if (x == c) continue;
                                    const Score s = score_to_destination(x, NodeId(dest), oracle, metric);
                                    if (!better(s, own)) continue;
                                    if (!best || better(s, score_to_destination(*best, NodeId(dest), oracle, metric)))
                                        best = x;
                                }
                                if (best) want = TransferAction{0, c, *best, TransferKind::forward};
                            }
                            require(got.size() == (want ? 1u : 0u) && (!want || got.front() == *want),
                                    "greedy decision differs from exhaustive search");
                        }
                    }
                }
            }
        }
    }
}

inline ScenarioConfig micro_config(Policy p) {
    ScenarioConfig c;
    c.n_nodes = 5;
    c.n_locations = 3;
    c.duration = 600.0;
    c.traffic_horizon = 200.0;
    c.d = 1.5;
    c.policy = p;
    c.seed = 11;
    if (p == Policy::pattern) {
        c.metric = MetricId::euclidean;
        c.knowledge = 3;
    }
    return c;
}

inline void epidemic_lower_bound() {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        auto ec = micro_config(Policy::epidemic);
        ec.seed = seed;
        const auto epi = run(ec);
        for (Policy p : {Policy::opportunistic, Policy::random, Policy::pattern}) {
            for (MetricId m : {MetricId::euclidean, MetricId::canberra, MetricId::angle, MetricId::matching}) {
                auto c = micro_config(p);
                c.seed = seed;
                if (p == Policy::pattern) c.metric = m;
                const auto other = run(c);
                for (std::size_t i = 0; i < other.bundles.size(); ++i) {
                    const auto& b = other.bundles[i];
                    if (!b.delivered_at) continue;
                    require(epi.bundles[i].delivered_at.has_value(), "epidemic missed a bundle another policy delivered");
                    require(*epi.bundles[i].delivered_at <= *b.delivered_at, "epidemic delivered later than " +
                                                                                  std::string(policy_name(p)));
                }
                require(!delay_vs_epidemic(other, epi).has_negative_bins(), "negative delay difference");
                if (p != Policy::pattern) break;
            }
        }
    }
}

inline void colocated_pair() {
    for (Policy p : {Policy::epidemic, Policy::opportunistic}) {
        ScenarioConfig c;
        c.n_nodes = 2;
        c.n_locations = 2;
        c.duration = 200.0;
        c.traffic_horizon = 100.0;
        c.d = 1.0;
        c.policy = p;
        RunOptions opt;
        opt.patterns = std::vector<MobilityPattern>(2, MobilityPattern::from_probabilities({1.0, 0.0}));
        const auto s = run(c, opt);
        require(s.generated() > 0 && s.delivered() == s.generated(), "colocated pair left bundles undelivered");
        require(mean_delay(s) == 0.0, "colocated pair has nonzero delay");
        require(mean_route_length(s) == 1.0, "colocated pair route length is not 1");
    }
}

inline void incremental_matches_full() {
    for (Policy p : {Policy::epidemic, Policy::opportunistic, Policy::random, Policy::pattern}) {
        auto c = micro_config(p);
        c.n_nodes = 8;
        RunOptions a, b;
        a.record_actions = b.record_actions = true;
        b.full_reevaluation = true;
        const auto x = run(c, a);
        const auto y = run(c, b);
        require(x.bundles == y.bundles && x.actions == y.actions,
                "incremental evaluation differs for " + std::string(policy_name(p)));
    }
}

inline void deterministic_and_isolated() {
    auto c = micro_config(Policy::random);
    RunOptions opt;
    opt.record_moves = opt.record_actions = true;
    const auto a = run(c, opt);
    const auto b = run(c, opt);
    require(a.bundles == b.bundles && a.actions == b.actions, "rerun differs");
    c.policy = Policy::epidemic;
    const auto e = run(c, opt);
    require(e.moves.size() == a.moves.size(), "mobility differs across policies");
    for (std::size_t i = 0; i < a.moves.size(); ++i)
        require(a.moves[i].at == e.moves[i].at && a.moves[i].node == e.moves[i].node && a.moves[i].to == e.moves[i].to,
                "mobility differs across policies");
    require(a.generated() == e.generated(), "traffic differs across policies");
    for (std::size_t i = 0; i < a.bundles.size(); ++i)
        require(a.bundles[i].created_at == e.bundles[i].created_at && a.bundles[i].source == e.bundles[i].source,
                "traffic differs across policies");
}

}  // namespace verify_detail

/// Runs every property; never throws.
inline std::vector<PropertyResult> run_verify_suite() {
    const std::vector<std::pair<std::string, std::function<void()>>> checks = {
        {"pattern_normalization", verify_detail::pattern_normalization},
        {"metric_symmetry_identity", verify_detail::metric_identities},
        {"canberra_bound", verify_detail::canberra_bound},
        {"matching_monotone_in_delta", verify_detail::matching_monotone},
        {"euclidean_angle_ordering", verify_detail::euclidean_angle_order},
        {"greedy_exhaustive_5_nodes", verify_detail::greedy_brute_force},
        {"epidemic_lower_bound", verify_detail::epidemic_lower_bound},
        {"colocated_pair_zero_delay", verify_detail::colocated_pair},
        {"incremental_equals_full", verify_detail::incremental_matches_full},
        {"determinism_and_isolation", verify_detail::deterministic_and_isolated},
    };
    std::vector<PropertyResult> out;
    for (const auto& [name, check] : checks) {
        PropertyResult r{name, true, ""};
        try {
            check();
        } catch (const verify_detail::Failure& f) {
            r.passed = false;
            r.detail = f.what;
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace dtnspace
