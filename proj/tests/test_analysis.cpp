#include <gtest/gtest.h>

#include <dtnspace/analysis.hpp>

#include <cmath>

using namespace dtnspace;

namespace {

RunStats stats_with(std::vector<std::pair<Tick, std::optional<Tick>>> created_delivered, std::uint32_t hops = 1) {
    RunStats s;
    s.time_step = 0.01;
    BundleId id = 0;
    for (const auto& [c, d] : created_delivered) {
        BundleRecord b;
        b.id = id++;
        b.created_at = c;
        b.delivered_at = d;
        b.hops = d ? hops : 0;
        s.bundles.push_back(b);
    }
    return s;
}

}  // namespace

TEST(MeanDelay, Values) {
    EXPECT_DOUBLE_EQ(mean_delay(stats_with({{0, 1000}, {500, 2500}})), 15.0);
    EXPECT_DOUBLE_EQ(mean_delay(stats_with({{700, 700}})), 0.0);
    EXPECT_DOUBLE_EQ(mean_delay(stats_with({{0, 1000}, {0, std::nullopt}})), 10.0);
    EXPECT_THROW(mean_delay(stats_with({{0, std::nullopt}})), std::domain_error);
}

TEST(MeanRouteLength, Values) {
    EXPECT_DOUBLE_EQ(mean_route_length(stats_with({{0, 10}, {0, 20}}, 3)), 3.0);
    EXPECT_THROW(mean_route_length(stats_with({})), std::domain_error);
}

TEST(DeliveryRatio, Values) {
    EXPECT_DOUBLE_EQ(delivery_ratio(stats_with({{0, 10}, {0, std::nullopt}})), 0.5);
}

TEST(StudentT, Table) {
    EXPECT_DOUBLE_EQ(student_t_90(1), 6.314);
    EXPECT_DOUBLE_EQ(student_t_90(4), 2.132);
    EXPECT_DOUBLE_EQ(student_t_90(30), 1.697);
    EXPECT_DOUBLE_EQ(student_t_90(35), 1.697);
    EXPECT_DOUBLE_EQ(student_t_90(45), 1.684);
    EXPECT_DOUBLE_EQ(student_t_90(1000), 1.658);
    EXPECT_THROW(student_t_90(0), std::invalid_argument);
}

TEST(StudentT, Intervals) {
    const std::vector<double> five = {1, 2, 3, 4, 5};
    const auto ci = student_t_ci(five);
    EXPECT_DOUBLE_EQ(ci.mean, 3.0);
    EXPECT_NEAR(ci.half_width, 1.5075516574897194, 1e-12);
    EXPECT_EQ(ci.n, 5u);
    const std::vector<double> same = {7, 7, 7};
    EXPECT_EQ(student_t_ci(same).half_width, 0.0);
    const std::vector<double> one = {1};
    EXPECT_THROW(student_t_ci(one), std::invalid_argument);
}

TEST(StudentT, HalfWidthScalesAsTOverRootN) {
    const std::vector<double> a = {0, 1, 0, 1, 0, 1, 0, 1};
    std::vector<double> b;
    for (int i = 0; i < 4; ++i) b.insert(b.end(), a.begin(), a.end());
    const double sa = std::sqrt(8.0 / 28.0), sb = std::sqrt(32.0 / 124.0);
    const auto ca = student_t_ci(a), cb = student_t_ci(b);
    EXPECT_NEAR(ca.half_width / cb.half_width, (student_t_90(7) * sa / std::sqrt(8.0)) /
                                                   (student_t_90(31) * sb / std::sqrt(32.0)), 1e-12);
}

TEST(DelayVsEpidemic, SelfComparison) {
    const auto s = stats_with({{0, 150}, {10, 99999}, {20, std::nullopt}});
    const auto h = delay_vs_epidemic(s, s);
    ASSERT_EQ(h.bins.size(), 1u);
    EXPECT_EQ(h.bins.begin()->first, 0);
    EXPECT_EQ(h.bins.begin()->second, 2u);
    EXPECT_EQ(h.matched, 2u);
    EXPECT_FALSE(h.has_negative_bins());
}

TEST(DelayVsEpidemic, BinsAndUnmatched) {
    const auto epi = stats_with({{0, 100}, {0, 100}, {0, 100}, {0, std::nullopt}});
    const auto x = stats_with({{0, 199}, {0, 200}, {0, std::nullopt}, {0, 500}});
    const auto h = delay_vs_epidemic(x, epi);
    EXPECT_EQ(h.bins.at(0), 1u);
    EXPECT_EQ(h.bins.at(1), 1u);
    EXPECT_EQ(h.matched, 2u);
    EXPECT_EQ(h.only_in_x, 1u);
    EXPECT_EQ(h.only_in_epi, 1u);
    const auto neg = delay_vs_epidemic(epi, x);
    EXPECT_TRUE(neg.has_negative_bins());
    EXPECT_EQ(neg.bins.at(-1), 2u);
}

TEST(DelayVsEpidemic, RejectsDifferentBundleSets) {
    EXPECT_THROW(delay_vs_epidemic(stats_with({{0, 1}}), stats_with({{0, 1}, {0, 2}})), std::invalid_argument);
    EXPECT_THROW(delay_vs_epidemic(stats_with({{0, 1}}), stats_with({{5, 6}})), std::invalid_argument);
}

TEST(DelayEvolution, Buckets) {
    const auto s = stats_with({{0, 5000}, {0, 9999}, {20000, 30000}, {0, std::nullopt}});
    const auto e = delay_evolution(s, 400.0);
    ASSERT_EQ(e.mean_delay.size(), 4u);
    EXPECT_DOUBLE_EQ(*e.mean_delay[0], (50.0 + 99.99) / 2);
    EXPECT_FALSE(e.mean_delay[1]);
    EXPECT_FALSE(e.mean_delay[2]);
    EXPECT_DOUBLE_EQ(*e.mean_delay[3], 100.0);
    const auto empty = delay_evolution(stats_with({{0, std::nullopt}}), 4000.0);
    ASSERT_EQ(empty.mean_delay.size(), 40u);
    for (const auto& b : empty.mean_delay) EXPECT_FALSE(b);
}

TEST(AggregateTable, IdenticalRunsHaveZeroWidth) {
    std::vector<RunStats> runs(5, stats_with({{0, 1000}}, 2));
    for (std::size_t i = 0; i < runs.size(); ++i) runs[i].label.seed = i + 1;
    const auto rows = aggregate_table(runs);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_DOUBLE_EQ(rows[0].mean_delay, 10.0);
    EXPECT_EQ(rows[0].delay_half_width, 0.0);
    EXPECT_DOUBLE_EQ(rows[0].mean_hops, 2.0);
    EXPECT_EQ(rows[0].runs, 5u);
}

TEST(AggregateTable, MeansOfPerRunMeans) {
    // Pooling would give (10 + 20 + 20 + 20) / 4 = 17.5; per-run means give 15.
    std::vector<RunStats> runs = {stats_with({{0, 1000}}), stats_with({{0, 2000}, {0, 2000}, {0, 2000}})};
    runs[1].label.seed = 2;
    const auto rows = aggregate_table(runs);
    EXPECT_DOUBLE_EQ(rows[0].mean_delay, 15.0);
}

TEST(AggregateTable, OrdersCellsAndHandlesSingleRuns) {
    std::vector<RunStats> runs;
    for (double d : {2.0, 1.1, 1.5}) {
        auto s = stats_with({{0, 1000}});
        s.label.d = d;
        runs.push_back(s);
    }
    EXPECT_THROW(aggregate_table(runs), std::invalid_argument);
    const auto rows = aggregate_table(runs, 1);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].key.d, 1.1);
    EXPECT_EQ(rows[1].key.d, 1.5);
    EXPECT_EQ(rows[2].key.d, 2.0);
    EXPECT_FALSE(rows[0].delay_half_width);
    EXPECT_FALSE(rows[0].hops_half_width);
}
