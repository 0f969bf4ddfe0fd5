#pragma once

#include <cstdint>

#include "whistle/extended.hpp"
#include "whistle/matching.hpp"
#include "whistle/placement.hpp"

namespace whistle {

// Seeded random instances for property checks and benchmarks.

struct MatchingShape {
  std::size_t max_services{8};
  std::size_t max_edges{4};
  int max_quota{3};
};

/// Random services with one window of statistics, random edges and eviction
/// flags. Sizes are uniform in [1, max].
MatchingProblem random_matching_problem(std::uint64_t seed, const MatchingShape& shape = {});

struct RedirectShape {
  std::size_t max_tasks{12};
  std::size_t max_neighbors{4};
  std::size_t max_services{5};
  std::size_t max_slots{3};
};

/// Requests for random services against neighbours with random hosted sets
/// and free slots; utilities come from the neighbour utility functions.
struct RedirectInstance {
  std::vector<Service> services;
  WindowStats stats;
  std::vector<RedirectRequest> requests;  // point into `stats`
  std::vector<NeighborCandidate> neighbors;
  RedirectProblem problem;

  RedirectInstance() = default;
  RedirectInstance(const RedirectInstance&) = delete;
  RedirectInstance& operator=(const RedirectInstance&) = delete;
};

void random_redirect_instance(std::uint64_t seed, RedirectInstance& out,
                              const RedirectShape& shape = {});

struct PlacementShape {
  std::size_t min_services{4};
  std::size_t max_services{8};
  std::size_t min_edges{2};
  std::size_t max_edges{4};
  int max_quota{3};
  std::size_t tasks{300};
  double zipf_exponent{1.0};
};

/// One window of a Zipf-popular synthetic trace spread uniformly over random
/// edges: the statistics and the services/edges a placement scheme sees.
struct PlacementScenario {
  WindowStats stats;
  std::vector<Service> services;
  Infrastructure servers;
  LookupCost lookup{0.001};

  MatchingProblem matching_problem() const;
  PlacementInstance placement_instance() const;
};

PlacementScenario random_placement_scenario(std::uint64_t seed, const PlacementShape& shape = {});

}  // namespace whistle
