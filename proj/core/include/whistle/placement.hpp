#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "whistle/assignment.hpp"
#include "whistle/cost_model.hpp"
#include "whistle/statistics.hpp"

namespace whistle {

/// Window demand of one service: how many tasks arrived at each edge and
/// their average shape. `reuse_fraction` is the share of tasks expected to be
/// served by a full reuse hit when the service is hosted.
struct ServiceDemand {
  ServiceId service{};
  std::map<EdgeId, double> arrivals;
  double mean_input_size{0.0};
  double mean_complexity{0.0};
  double reuse_fraction{0.0};

  double total_arrivals() const;
};

/// Static placement problem for one window: tasks of a service are served at
/// their arrival edge when it hosts the service, at the cloud otherwise.
struct PlacementInstance {
  std::vector<ServiceDemand> demands;
  Infrastructure servers;
  LookupCost lookup;
  double window_length{1.0};
  int replica_quota{0};  // 0 means |E|

  int effective_replica_quota() const;
};

/// Builds the placement instance a window of statistics describes. Arrivals
/// without a recorded origin are spread evenly over the edges. The expected
/// reuse fraction is the window's repeat fraction.
PlacementInstance make_placement_instance(const WindowStats& stats, const Infrastructure& servers,
                                          LookupCost lookup, int replica_quota = 0);

/// Expected static completion cost per task of `demand` at `edge` (or the
/// cloud when `edge` is null), composed from completion_cost.
double expected_task_cost(const ServiceDemand& demand, const EdgeServer* edge,
                          const Infrastructure& servers, LookupCost lookup);

/// Sum over services and arrival edges of expected completion cost.
double placement_objective(const PlacementInstance& instance, const Assignment& assignment);

/// Quota and per-window capacity violations of a placement.
std::vector<Violation> check_placement(const PlacementInstance& instance,
                                       const Assignment& assignment);

inline constexpr std::size_t kBruteForceMaxServices = 12;
inline constexpr std::size_t kBruteForceMaxEdges = 4;

/// Exact minimiser of placement_objective over all quota- and
/// capacity-feasible placements. Among equal-cost optima the one with fewest
/// pairs, then the lexicographically smallest (service, edge) list, wins.
/// Throws SizeError above 12 services or 4 edges.
Assignment brute_force_offload(const PlacementInstance& instance);

}  // namespace whistle
