#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "whistle/baselines.hpp"
#include "whistle/errors.hpp"
#include "whistle/instances.hpp"

namespace whistle {
namespace {

std::vector<ServiceId> ids(std::uint32_t n) {
  std::vector<ServiceId> out;
  for (std::uint32_t i = 1; i <= n; ++i) out.push_back(ServiceId{i});
  return out;
}

EdgeServer edge(std::uint32_t id, int quota) { return EdgeServer{EdgeId{id}, 20.0, 50.0, quota, {}}; }

WindowStats counts(const std::vector<std::size_t>& received) {
  WindowStats stats;
  for (std::size_t i = 0; i < received.size(); ++i) {
    auto& s = stats.services[ServiceId{static_cast<std::uint32_t>(i + 1)}];
    s.received_count = received[i];
    s.distinct_count = std::max<std::size_t>(1, received[i] / 2);
    s.mean_input_size = 5.0;
    s.mean_complexity = 1.0;
  }
  return stats;
}

TEST(Scheme, ParseAndName) {
  EXPECT_EQ(Scheme::parse("whistle"), (Scheme{SchemeKind::Whistle, true}));
  EXPECT_EQ(Scheme::parse("greedy"), (Scheme{SchemeKind::Greedy, false}));
  EXPECT_EQ(Scheme::parse("greedy+reuse"), (Scheme{SchemeKind::Greedy, true}));
  EXPECT_EQ(Scheme::parse("greedy+reuse").name(), "greedy+reuse");
  EXPECT_THROW(Scheme::parse("whistle+reuse"), ConfigError);
  EXPECT_THROW(Scheme::parse("cloud+reuse"), ConfigError);
  EXPECT_THROW(Scheme::parse("optimal"), ConfigError);
  ASSERT_EQ(Scheme::all().size(), 8u);
  for (const auto& s : Scheme::all()) EXPECT_EQ(Scheme::parse(s.name()), s);
}

TEST(CloudOnly, EmptyAndObjectiveIsCloudBranch) {
  EXPECT_TRUE(cloud_only().empty());
  const auto scenario = random_placement_scenario(2);
  const auto inst = scenario.placement_instance();
  double expected = 0.0;
  for (const auto& d : inst.demands) {
    expected += d.total_arrivals() * (d.mean_input_size / inst.servers.cloud.bandwidth +
                                      d.mean_complexity / inst.servers.cloud.compute_capacity);
  }
  EXPECT_NEAR(placement_objective(inst, cloud_only()), expected, 1e-9 * expected);
}

TEST(RandomEdge, DeterministicAndQuotaSafe) {
  const std::vector<EdgeServer> edges{edge(0, 2), edge(1, 3), edge(2, 1)};
  const auto a = random_edge(ids(5), edges, 42, 1);
  EXPECT_EQ(a, random_edge(ids(5), edges, 42, 1));
  for (const auto& e : edges) EXPECT_LE(a.hosted_count(e.id), static_cast<std::size_t>(e.service_quota));
  for (auto s : ids(5)) EXPECT_LE(a.replica_count(s), 1u);
}

TEST(RandomEdge, UniformOverCells) {
  const std::vector<EdgeServer> edges{edge(0, 2), edge(1, 2)};
  std::map<Assignment::Key, int> hits;
  constexpr int kDraws = 10'000;
  for (int i = 0; i < kDraws; ++i) {
    for (const auto& key : random_edge(ids(5), edges, 1000 + i).keys()) ++hits[key];
  }
  const double p = 2.0 / 5.0;
  const double mean = kDraws * p;
  const double sigma = std::sqrt(kDraws * p * (1 - p));
  for (auto s : ids(5)) {
    for (const auto& e : edges) {
      const Assignment::Key cell{s, e.id};
      EXPECT_NEAR(hits[cell], mean, 3 * sigma);
    }
  }
}

TEST(Greedy, TopByFrequency) {
  const auto stats = counts({5, 30, 12});
  const auto a = greedy_offload(ids(3), {edge(0, 2)}, stats);
  EXPECT_EQ(a.services_at(EdgeId{0}), (std::vector<ServiceId>{ServiceId{2}, ServiceId{3}}));
}

TEST(Greedy, SkipsZeroQuotaAndFillsCapacity) {
  const auto stats = counts({1, 2, 3, 4, 5, 6});
  const std::vector<EdgeServer> edges{edge(0, 0), edge(1, 2), edge(2, 3)};
  const auto a = greedy_offload(ids(6), edges, stats, 1);
  EXPECT_EQ(a.hosted_count(EdgeId{0}), 0u);
  EXPECT_EQ(a.hosted_count(EdgeId{1}), 2u);
  EXPECT_EQ(a.hosted_count(EdgeId{2}), 3u);
}

TEST(Ga, SingleServicePlaced) {
  const auto stats = counts({4});
  const auto a = ga_offload(ids(1), {edge(0, 1)}, stats, GaParams{}, 3);
  EXPECT_TRUE(a.contains(ServiceId{1}, EdgeId{0}));
}

TEST(Ga, QuotaViolationRejected) {
  const auto stats = counts({4, 4});
  Assignment over;
  over.add(ServiceId{1}, EdgeId{0});
  over.add(ServiceId{2}, EdgeId{0});
  EXPECT_EQ(ga_fitness(over, {edge(0, 1)}, stats), -std::numeric_limits<double>::infinity());
  Assignment ok;
  ok.add(ServiceId{1}, EdgeId{0});
  EXPECT_DOUBLE_EQ(ga_fitness(ok, {edge(0, 1)}, stats), 4.0);
}

TEST(Ga, BestFitnessNeverDecreases) {
  const auto stats = counts({9, 3, 14, 1, 7, 5});
  GaTrace trace;
  const std::vector<EdgeServer> edges{edge(0, 2), edge(1, 2)};
  const auto a = ga_offload(ids(6), edges, stats, GaParams{}, 17, 0, &trace);
  ASSERT_EQ(trace.best_fitness.size(), GaParams{}.generations + 1);
  for (std::size_t g = 1; g < trace.best_fitness.size(); ++g) {
    EXPECT_GE(trace.best_fitness[g], trace.best_fitness[g - 1]);
  }
  EXPECT_DOUBLE_EQ(ga_fitness(a, edges, stats), trace.best_fitness.back());
  EXPECT_EQ(a, ga_offload(ids(6), edges, stats, GaParams{}, 17));
}

TEST(Sa, AcceptanceRule) {
  EXPECT_EQ(sa_acceptance(-1.0, 5.0), 1.0);
  EXPECT_EQ(sa_acceptance(0.0, 0.0), 1.0);
  EXPECT_LT(sa_acceptance(1.0, 1e-6), 1e-100);
  EXPECT_EQ(sa_acceptance(1.0, 0.0), 0.0);
  EXPECT_NEAR(sa_acceptance(1.0, 1.0), std::exp(-1.0), 1e-15);
}

TEST(Sa, BestObjectiveNeverIncreases) {
  const auto inst = random_placement_scenario(6).placement_instance();
  SaTrace trace;
  const auto a = sa_offload(inst, SaParams{}, 5, &trace);
  ASSERT_FALSE(trace.best_objective.empty());
  for (std::size_t i = 1; i < trace.best_objective.size(); ++i) {
    EXPECT_LE(trace.best_objective[i], trace.best_objective[i - 1]);
  }
  EXPECT_NEAR(placement_objective(inst, a), trace.best_objective.back(), 1e-9);
  EXPECT_LE(placement_objective(inst, a), placement_objective(inst, cloud_only()));
  EXPECT_TRUE(check_placement(inst, a).empty());
  SaParams bad;
  bad.cooling = 1.0;
  EXPECT_THROW(sa_offload(inst, bad, 5), ConfigError);
}

TEST(BaselineProperty, QuotaSafety) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto scenario = random_placement_scenario(seed);
    const auto inst = scenario.placement_instance();
    std::vector<ServiceId> services;
    for (const auto& s : scenario.services) services.push_back(s.id);
    const auto& edges = scenario.servers.edges;
    GaParams ga;
    ga.generations = 20;
    for (const auto& a : {random_edge(services, edges, seed), greedy_offload(services, edges, scenario.stats),
                          ga_offload(services, edges, scenario.stats, ga, seed),
                          sa_offload(inst, SaParams{}, seed)}) {
      for (const auto& e : edges) {
        ASSERT_LE(a.hosted_count(e.id), static_cast<std::size_t>(e.service_quota)) << "seed " << seed;
      }
    }
  }
}

}  // namespace
}  // namespace whistle
