#include <gtest/gtest.h>

#include <dtnspace/mobility.hpp>

#include <cmath>

using namespace dtnspace;

TEST(SampleNextLocation, Degenerate) {
    RandomStream rng(1);
    const auto p = MobilityPattern::from_probabilities({1.0, 0.0});
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_next_location(p, rng), LocationId(0));
}

TEST(SampleNextLocation, SkipsZeroEntries) {
    RandomStream rng(2);
    const auto p = MobilityPattern::from_probabilities({0.0, 0.5, 0.0, 0.5, 0.0});
    for (int i = 0; i < 1000; ++i) {
        const auto l = sample_next_location(p, rng);
        EXPECT_TRUE(l == LocationId(1) || l == LocationId(3));
    }
}

TEST(SampleNextLocation, UniformFrequencies) {
    RandomStream rng(3);
    const auto p = build_pattern(1.0, random_rank_assignment(25, rng));
    constexpr int draws = 100000;
    std::vector<int> count(25, 0);
    for (int i = 0; i < draws; ++i) ++count[sample_next_location(p, rng).value];
    const double mean = draws / 25.0;
    const double sigma = std::sqrt(draws * (1.0 / 25) * (24.0 / 25));
    for (int c : count) EXPECT_LT(std::abs(c - mean), 3.0 * sigma);
    double chi2 = 0.0;
    for (int c : count) chi2 += (c - mean) * (c - mean) / mean;
    EXPECT_LT(chi2, 51.2);  // 24 dof, p = 0.001
}

TEST(SampleNextLocation, TwoThirds) {
    RandomStream rng(4);
    const auto p = build_pattern(2.0, RankAssignment({0, 1}));
    int zero = 0;
    for (int i = 0; i < 30000; ++i) zero += sample_next_location(p, rng) == LocationId(0);
    EXPECT_NEAR(zero / 30000.0, 2.0 / 3.0, 0.01);
}

TEST(SampleRestTime, Support) {
    RandomStream rng(5);
    EXPECT_EQ(sample_rest_time(5, 5, rng), 5.0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double t = sample_rest_time(5, 15, rng);
        ASSERT_GE(t, 5.0);
        ASSERT_LE(t, 15.0);
        sum += t;
    }
    EXPECT_NEAR(sum / 100000, 10.0, 0.1);
    EXPECT_THROW(sample_rest_time(15, 5, rng), std::invalid_argument);
    EXPECT_THROW(sample_rest_time(0, 5, rng), std::invalid_argument);
}

TEST(TimeGrid, Conversions) {
    const TimeGrid g{0.01};
    EXPECT_EQ(g.to_ticks(5.0), 500);
    EXPECT_EQ(g.to_ticks(0.015), 2);
    EXPECT_EQ(g.floor_ticks(29.999), 2999);
    EXPECT_DOUBLE_EQ(g.to_seconds(1234), 12.34);
}

TEST(AdvanceNode, PinnedNodeStays) {
    RandomStream rng(6);
    const MovementModel m{5.0, 15.0, TimeGrid{0.01}};
    auto s = place_node(NodeId(0), MobilityPattern::from_probabilities({1.0, 0.0}), 0, m, rng);
    for (int i = 0; i < 100; ++i) {
        const Tick now = s.next_move_at;
        s = advance_node(s, now, m, rng);
        EXPECT_EQ(s.location, LocationId(0));
        EXPECT_GE(s.next_move_at, now + 500);
        EXPECT_LE(s.next_move_at, now + 1500);
    }
}

TEST(AdvanceNode, Replay) {
    const MovementModel m{5.0, 15.0, TimeGrid{0.01}};
    RandomStream seed_rng(7);
    const auto p = build_pattern(1.5, random_rank_assignment(10, seed_rng));
    RandomStream a(8), b(8);
    auto x = place_node(NodeId(1), p, 0, m, a);
    auto y = place_node(NodeId(1), p, 0, m, b);
    for (int i = 0; i < 50; ++i) {
        x = advance_node(x, x.next_move_at, m, a);
        y = advance_node(y, y.next_move_at, m, b);
        EXPECT_EQ(x.location, y.location);
        EXPECT_EQ(x.next_move_at, y.next_move_at);
    }
}

TEST(AdvanceNode, RejectsWrongTime) {
    RandomStream rng(9);
    const MovementModel m{5.0, 15.0, TimeGrid{0.01}};
    const auto s = place_node(NodeId(0), MobilityPattern::from_probabilities({1.0}), 0, m, rng);
    EXPECT_THROW(advance_node(s, s.next_move_at + 1, m, rng), std::logic_error);
}

TEST(AdvanceNode, LongRunOccupancy) {
    RandomStream rng(10);
    const MovementModel m{5.0, 15.0, TimeGrid{0.01}};
    const auto p = build_pattern(1.5, random_rank_assignment(6, rng));
    auto s = place_node(NodeId(0), p, 0, m, rng);
    std::vector<double> time(6, 0.0);
    const Tick end = m.grid.to_ticks(1e6);
    Tick now = 0;
    while (now < end) {
        time[s.location.value] += static_cast<double>(std::min(s.next_move_at, end) - now);
        now = s.next_move_at;
        s = advance_node(s, now, m, rng);
    }
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(time[i] / static_cast<double>(end), p[i], 0.05 * p[i]);
}

TEST(Colocation, Bookkeeping) {
    Colocation w(3, 4);
    EXPECT_TRUE(colocated_nodes(w, LocationId(2)).empty());
    for (std::uint32_t n = 0; n < 4; ++n) w.place(NodeId(3 - n), LocationId(0));
    const auto all = colocated_nodes(w, LocationId(0));
    ASSERT_EQ(all.size(), 4u);
    for (std::uint32_t n = 0; n < 4; ++n) EXPECT_EQ(all[n], NodeId(n));
    w.place(NodeId(2), LocationId(1));
    EXPECT_EQ(colocated_nodes(w, LocationId(0)).size(), 3u);
    ASSERT_EQ(colocated_nodes(w, LocationId(1)).size(), 1u);
    EXPECT_EQ(colocated_nodes(w, LocationId(1))[0], NodeId(2));
    EXPECT_EQ(w.location_of(NodeId(2)), LocationId(1));
    EXPECT_THROW(w.place(NodeId(0), LocationId(3)), std::out_of_range);
}
