#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "derived.hpp"
#include "whistle/errors.hpp"
#include "whistle/statistics.hpp"

namespace whistle {
namespace {

using testing::derived;

Task make_task(TaskId id, std::vector<Digest> input, double size = 1.0, double complexity = 1.0) {
  Task t;
  t.id = id;
  t.service = ServiceId{1};
  t.input.items = std::move(input);
  t.input_size = size;
  t.complexity = complexity;
  return t;
}

TEST(Granularity, ReferenceValue) {
  EXPECT_NEAR(compute_granularity(100, 10), derived("granularity_100_10"), 1e-6);
}

TEST(Granularity, AllDistinctIsSigmoidOfOne) {
  for (std::size_t n : {1u, 2u, 17u, 1000u}) {
    EXPECT_NEAR(compute_granularity(n, n), derived("granularity_min"), 1e-12);
  }
}

TEST(Granularity, RejectsDegenerateCounts) {
  EXPECT_THROW(compute_granularity(10, 0), DomainError);
  EXPECT_THROW(compute_granularity(3, 4), DomainError);
}

TEST(Granularity, StaysBelowOneForHugeRatios) {
  EXPECT_LT(compute_granularity(1'000'000, 1), 1.0);
  EXPECT_NO_THROW(compute_reusability(compute_granularity(1'000'000, 1)));
}

TEST(Reusability, ReferenceValues) {
  EXPECT_NEAR(compute_reusability(0.7310586), derived("reusability_0.7310586"), 1e-3);
  EXPECT_NEAR(compute_reusability(0.7310586), 0.7971, 1e-3);
  EXPECT_NEAR(compute_reusability(0.5), derived("reusability_0.5"), 1e-9);
  EXPECT_NEAR(compute_reusability(std::nextafter(1.0, 0.0)), derived("reusability_limit_one"), 1e-9);
}

TEST(Reusability, RejectsOutOfRange) {
  EXPECT_THROW(compute_reusability(0.0), DomainError);
  EXPECT_THROW(compute_reusability(1.0), DomainError);
  EXPECT_THROW(compute_reusability(-0.2), DomainError);
}

TEST(Punishment, Branches) {
  EXPECT_DOUBLE_EQ(compute_punishment(0.7971, false), 0.7971);
  EXPECT_NEAR(compute_punishment(0.7971, true), derived("punishment_0.7971_evicted"), 1e-12);
  EXPECT_DOUBLE_EQ(compute_punishment(0.5, true), 0.5);
}

TEST(OffloadingGain, ComponentwiseProduct) {
  auto g = compute_offloading_gain(0.8, 100, 50);
  EXPECT_NEAR(g.saved_input, derived("gain_0.8_100_50.input"), 1e-12);
  EXPECT_NEAR(g.saved_complexity, derived("gain_0.8_100_50.complexity"), 1e-12);
  g = compute_offloading_gain(0.7971, 40, 30);
  EXPECT_NEAR(g.saved_input, derived("gain_0.7971_40_30.input"), 1e-12);
  EXPECT_NEAR(g.saved_complexity, derived("gain_0.7971_40_30.complexity"), 1e-12);
  g = compute_offloading_gain(0.9, 0, 0);
  EXPECT_EQ(g.saved_input, 0.0);
  EXPECT_EQ(g.saved_complexity, 0.0);
}

TEST(WindowStats, CountsReceivedAndDistinct) {
  WindowStats stats;
  record_arrival(stats, make_task(0, {1, 2}));
  EXPECT_EQ(stats.find(ServiceId{1})->received_count, 1u);
  EXPECT_EQ(stats.find(ServiceId{1})->distinct_count, 1u);
  record_arrival(stats, make_task(1, {1, 2}));
  EXPECT_EQ(stats.find(ServiceId{1})->received_count, 2u);
  EXPECT_EQ(stats.find(ServiceId{1})->distinct_count, 1u);
  EXPECT_DOUBLE_EQ(stats.find(ServiceId{1})->repeat_fraction(), 0.5);
}

TEST(WindowStats, MeanCommunicationCost) {
  WindowStats stats;
  ObservedCosts a;
  a.communication = 2.0;
  ObservedCosts b;
  b.communication = 4.0;
  stats = update_window_stats(stats, make_task(0, {1}), a);
  stats = update_window_stats(stats, make_task(1, {2}), b);
  EXPECT_NEAR(stats.find(ServiceId{1})->mean_comm_cost, derived("mean_comm_2_4"), 1e-12);
  EXPECT_EQ(stats.find(ServiceId{1})->comm_samples, 2u);
}

TEST(WindowStats, ObservedHitRateNeedsEdgeExecutions) {
  WindowStats stats;
  ObservedCosts cloud;
  record_costs(stats, ServiceId{1}, cloud);
  EXPECT_FALSE(stats.find(ServiceId{1})->observed_hit_rate());
  ObservedCosts hit;
  hit.at_edge = true;
  hit.reuse_overlap = 1.0;
  ObservedCosts half;
  half.at_edge = true;
  half.reuse_overlap = 0.5;
  record_costs(stats, ServiceId{1}, hit);
  record_costs(stats, ServiceId{1}, half);
  EXPECT_DOUBLE_EQ(*stats.find(ServiceId{1})->observed_hit_rate(), 0.75);
}

TEST(MakeService, EvictionFlipsPunishmentOnly) {
  WindowStats stats;
  for (TaskId i = 0; i < 10; ++i) record_arrival(stats, make_task(i, {i % 3}, 4.0, 2.0));
  auto kept = make_service(ServiceId{1}, *stats.find(ServiceId{1}));
  ASSERT_TRUE(kept);
  auto evicted = with_eviction(*kept, true);
  EXPECT_EQ(kept->reusability, evicted.reusability);
  EXPECT_DOUBLE_EQ(evicted.punishment, 1.0 - kept->reusability);
  EXPECT_FALSE(make_service(ServiceId{2}, ServiceWindowStats{}));
}

TEST(StatisticsProperty, OutputsStayInRange) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> distinct_dist(1, 500);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t distinct = distinct_dist(rng);
    const std::size_t received = distinct + std::uniform_int_distribution<std::size_t>(0, 5000)(rng);
    const double g = compute_granularity(received, distinct);
    ASSERT_GE(g, derived("granularity_min") - 1e-12);
    ASSERT_LT(g, 1.0);
    const double s = compute_reusability(g);
    ASSERT_GT(s, 0.7310585);
    ASSERT_LT(s, 0.8808);
    for (bool evicted : {false, true}) {
      const double r = compute_punishment(s, evicted);
      ASSERT_GT(r, 0.0);
      ASSERT_LT(r, 1.0);
    }
    const double input = std::uniform_real_distribution<double>(0, 100)(rng);
    const auto gain = compute_offloading_gain(s, input, 2 * input);
    ASSERT_LE(gain.saved_input, input);
    ASSERT_LE(gain.saved_complexity, 2 * input);
  }
}

}  // namespace
}  // namespace whistle
