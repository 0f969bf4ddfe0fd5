#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "whistle/matching.hpp"
#include "whistle/statistics.hpp"
#include "whistle/types.hpp"

namespace whistle {

enum class RouteKind { LocalEdge, NeighborEdge, Cloud };

const char* to_string(RouteKind kind) noexcept;

/// Where one task is executed. `edge` is set for LocalEdge and NeighborEdge.
struct NeighborRoute {
  TaskId task{};
  RouteKind kind{RouteKind::Cloud};
  std::optional<EdgeId> edge;
};

/// A one-hop neighbour as seen from the local edge at decision time.
struct NeighborCandidate {
  EdgeServer edge;
  double path_bandwidth{0.0};  // local edge to this neighbour, megabits/s
  std::size_t free_slots{0};
  std::set<ServiceId> hosted;
};

/// A task that reached an edge not hosting its service.
struct RedirectRequest {
  TaskId task{};
  Service service;
  const ServiceWindowStats* stats{nullptr};
};

/// Routes one task. LocalEdge when the local edge hosts the service; else the
/// hosting neighbours are tried in descending neighbour-utility order (ties by
/// edge id) and the first with a free slot takes the task; Cloud when none
/// does.
NeighborRoute extended_match(const RedirectRequest& request, EdgeId local_edge,
                             bool local_hosts_service,
                             const std::vector<NeighborCandidate>& neighbors,
                             const UtilityOptions& options = {});

/// Dense one-to-many instance: tasks on one side, neighbours with slot
/// capacities on the other. nullopt marks a pair that cannot be matched
/// (service not hosted there, or no valid utility).
struct RedirectProblem {
  std::vector<TaskId> tasks;
  std::vector<ServiceId> services;  // per task
  std::vector<EdgeId> neighbors;
  std::vector<std::size_t> capacity;                           // per neighbour
  std::vector<std::vector<std::optional<double>>> task_utility;  // [task][neighbour]
  std::vector<std::vector<std::optional<double>>> edge_utility;  // [neighbour][task]
};

RedirectProblem make_redirect_problem(const std::vector<RedirectRequest>& requests,
                                      const std::vector<NeighborCandidate>& neighbors,
                                      const UtilityOptions& options = {});

/// Task-proposing deferred acceptance over a batch of concurrent requests.
/// Each neighbour holds its best tasks by edge utility (ties to the lower
/// task id) up to its capacity; tasks left unmatched go to the cloud.
std::vector<NeighborRoute> extended_match_batch(const RedirectProblem& problem);

struct BlockingPair {
  TaskId task{};
  ServiceId service{};
  EdgeId edge{};
};

/// A (task, neighbour) pair where the task strictly prefers the neighbour to
/// its current route (the cloud ranks below every acceptable neighbour) and
/// the neighbour has a free slot or holds a task it ranks strictly lower.
std::optional<BlockingPair> find_blocking_pair(const std::vector<NeighborRoute>& routes,
                                               const RedirectProblem& problem);

}  // namespace whistle
