#include <gtest/gtest.h>

#include <dtnspace/engine.hpp>

#include <map>

using namespace dtnspace;

namespace {

ScenarioConfig small(Policy p, std::uint64_t seed = 1) {
    ScenarioConfig c;
    c.n_nodes = 16;
    c.n_locations = 8;
    c.duration = 1500.0;
    c.traffic_horizon = 300.0;
    c.d = 1.5;
    c.policy = p;
    c.seed = seed;
    if (p == Policy::pattern) {
        c.metric = MetricId::euclidean;
        c.knowledge = 8;
    }
    return c;
}

}  // namespace

TEST(TrafficSchedule, PerPairRule) {
    ScenarioConfig c;
    RandomStream rng(1);
    const auto s = traffic_schedule(c, rng);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<Tick>> pairs;
    for (const auto& t : s) pairs[{t.source.value, t.destination.value}].push_back(t.at);
    EXPECT_EQ(pairs.size(), 50u * 49u);
    for (const auto& [pair, times] : pairs) {
        ASSERT_NE(pair.first, pair.second);
        ASSERT_LT(times.front(), 3000);
        for (std::size_t k = 1; k < times.size(); ++k) ASSERT_EQ(times[k] - times[k - 1], 3000);
        ASSERT_LE(times.back(), 47000);
        // 16 sends when the offset leaves room for 450 s + offset <= 470 s.
        ASSERT_EQ(times.size(), times.front() <= 2000 ? 16u : 15u);
    }
}

TEST(TrafficSchedule, SortedByTimeSourceDestination) {
    ScenarioConfig c;
    c.n_nodes = 10;
    RandomStream rng(2);
    const auto s = traffic_schedule(c, rng);
    for (std::size_t i = 1; i < s.size(); ++i) {
        const auto& a = s[i - 1];
        const auto& b = s[i];
        ASSERT_TRUE(a.at < b.at || (a.at == b.at && (a.source < b.source ||
                                                      (a.source == b.source && a.destination < b.destination))));
    }
}

TEST(TrafficSchedule, TwoNodes) {
    ScenarioConfig c;
    c.n_nodes = 2;
    RandomStream rng(3);
    const auto s = traffic_schedule(c, rng);
    int forward = 0, backward = 0;
    for (const auto& t : s) (t.source == NodeId(0) ? forward : backward)++;
    EXPECT_GE(forward, 15);
    EXPECT_GE(backward, 15);
}

TEST(TrafficSchedule, ExpectedVolume) {
    ScenarioConfig c;
    double total = 0.0;
    constexpr int seeds = 40;
    for (int i = 0; i < seeds; ++i) {
        RandomStream rng(derive_seed(static_cast<std::uint64_t>(i), "traffic"));
        total += static_cast<double>(traffic_schedule(c, rng).size());
    }
    // Expectation 115150 / 3; one run has standard deviation about 23.
    EXPECT_NEAR(total / seeds, 38383.33, 15.0);
}

TEST(Run, PermanentlyColocatedPair) {
    ScenarioConfig c;
    c.n_nodes = 2;
    c.n_locations = 2;
    c.d = 1.0;
    c.policy = Policy::opportunistic;
    RunOptions opt;
    opt.patterns = std::vector<MobilityPattern>(2, MobilityPattern::from_probabilities({1.0, 0.0}));
    const auto s = run(c, opt);
    ASSERT_GT(s.generated(), 0u);
    for (const auto& b : s.bundles) {
        ASSERT_TRUE(b.delivered_at);
        EXPECT_EQ(*b.delivered_at, b.created_at);
        EXPECT_EQ(b.hops, 1u);
    }
}

TEST(Run, NeverColocatedPair) {
    for (Policy p : {Policy::epidemic, Policy::opportunistic, Policy::random}) {
        ScenarioConfig c;
        c.n_nodes = 2;
        c.n_locations = 2;
        c.d = 1.0;
        c.policy = p;
        RunOptions opt;
        opt.patterns = std::vector<MobilityPattern>{MobilityPattern::from_probabilities({1.0, 0.0}),
                                                    MobilityPattern::from_probabilities({0.0, 1.0})};
        const auto s = run(c, opt);
        EXPECT_GT(s.generated(), 0u);
        EXPECT_EQ(s.delivered(), 0u);
    }
}

TEST(Run, RejectsInvalidConfig) {
    ScenarioConfig c;
    c.policy = Policy::epidemic;
    EXPECT_THROW(run(c), ConfigError);
    c.d = 1.5;
    c.policy = Policy::pattern;
    EXPECT_THROW(run(c), ConfigError);
}

TEST(Run, ConservationAndOrdering) {
    for (Policy p : {Policy::epidemic, Policy::opportunistic, Policy::random, Policy::pattern}) {
        RunOptions opt;
        opt.record_moves = true;
        const auto s = run(small(p), opt);
        const Tick end = 150000;
        for (const auto& b : s.bundles) {
            if (!b.delivered_at) continue;
            EXPECT_GE(*b.delivered_at, b.created_at);
            EXPECT_LE(*b.delivered_at, end);
            EXPECT_GE(b.hops, 1u);
        }
        for (std::size_t i = 1; i < s.moves.size(); ++i) ASSERT_LE(s.moves[i - 1].at, s.moves[i].at);
        if (p == Policy::opportunistic) {
            for (const auto& b : s.bundles)
                if (b.delivered_at) {
                    EXPECT_EQ(b.hops, 1u);
                }
        }
    }
}

TEST(Run, SingleCustodyForSingleCopyPolicies) {
    for (Policy p : {Policy::opportunistic, Policy::random, Policy::pattern}) {
        RunOptions opt;
        opt.record_actions = true;
        const auto s = run(small(p), opt);
        for (const auto& a : s.actions) EXPECT_NE(a.action.kind, TransferKind::replicate);
    }
}

TEST(Run, EnvironmentIsPolicyIndependent) {
    RunOptions opt;
    opt.record_moves = true;
    const auto a = run(small(Policy::epidemic, 4), opt);
    for (Policy p : {Policy::opportunistic, Policy::random, Policy::pattern}) {
        const auto b = run(small(p, 4), opt);
        ASSERT_EQ(a.moves.size(), b.moves.size());
        for (std::size_t i = 0; i < a.moves.size(); ++i) {
            EXPECT_EQ(a.moves[i].at, b.moves[i].at);
            EXPECT_EQ(a.moves[i].node, b.moves[i].node);
            EXPECT_EQ(a.moves[i].to, b.moves[i].to);
        }
        ASSERT_EQ(a.bundles.size(), b.bundles.size());
        for (std::size_t i = 0; i < a.bundles.size(); ++i) {
            EXPECT_EQ(a.bundles[i].created_at, b.bundles[i].created_at);
            EXPECT_EQ(a.bundles[i].source, b.bundles[i].source);
            EXPECT_EQ(a.bundles[i].destination, b.bundles[i].destination);
        }
    }
}

TEST(Run, EpidemicIsALowerBound) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto epi = run(small(Policy::epidemic, seed));
        for (Policy p : {Policy::opportunistic, Policy::random, Policy::pattern}) {
            const auto x = run(small(p, seed));
            for (std::size_t i = 0; i < x.bundles.size(); ++i) {
                if (!x.bundles[i].delivered_at) continue;
                ASSERT_TRUE(epi.bundles[i].delivered_at);
                EXPECT_LE(*epi.bundles[i].delivered_at, *x.bundles[i].delivered_at);
            }
        }
    }
}

TEST(Run, Deterministic) {
    RunOptions opt;
    opt.record_actions = opt.record_moves = true;
    for (Policy p : {Policy::epidemic, Policy::random, Policy::pattern}) {
        const auto a = run(small(p, 9), opt);
        const auto b = run(small(p, 9), opt);
        EXPECT_EQ(a.bundles, b.bundles);
        EXPECT_EQ(a.actions, b.actions);
    }
}

TEST(Run, IncrementalEvaluationMatchesFull) {
    for (Policy p : {Policy::epidemic, Policy::opportunistic, Policy::random, Policy::pattern}) {
        for (MetricId m : {MetricId::euclidean, MetricId::matching}) {
            auto c = small(p, 5);
            if (p == Policy::pattern) {
                c.metric = m;
                c.knowledge = 2;
            }
            RunOptions inc, full;
            inc.record_actions = full.record_actions = true;
            full.full_reevaluation = true;
            const auto a = run(c, inc);
            const auto b = run(c, full);
            EXPECT_EQ(a.bundles, b.bundles) << policy_name(p);
            EXPECT_EQ(a.actions, b.actions) << policy_name(p);
            if (p != Policy::pattern) break;
        }
    }
}

TEST(Run, EuclideanAndAngleTakeIdenticalActions) {
    auto e = small(Policy::pattern, 6);
    auto a = e;
    a.metric = MetricId::angle;
    RunOptions opt;
    opt.record_actions = true;
    const auto x = run(e, opt);
    const auto y = run(a, opt);
    EXPECT_FALSE(x.actions.empty());
    EXPECT_EQ(x.actions, y.actions);
}

TEST(RunMatrix, ParallelMatchesSequential) {
    std::vector<ScenarioConfig> cs;
    for (Policy p : {Policy::epidemic, Policy::random, Policy::pattern}) {
        auto c = small(p, 7);
        c.runs = 2;
        for (const auto& s : expand_seeds(c)) cs.push_back(s);
    }
    ASSERT_EQ(cs.size(), 6u);
    EXPECT_EQ(cs[1].seed, 8u);
    const auto seq = run_matrix(cs, 1);
    const auto par = run_matrix(cs, 3);
    ASSERT_EQ(seq.size(), par.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        EXPECT_EQ(seq[i].label, par[i].label);
        EXPECT_EQ(seq[i].bundles, par[i].bundles);
    }
}

TEST(NodePatterns, DependOnSeedOnly) {
    auto c = small(Policy::epidemic, 3);
    const auto a = node_patterns(c);
    c.policy = Policy::random;
    const auto b = node_patterns(c);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < a[i].size(); ++k) EXPECT_EQ(a[i][k], b[i][k]);
}
