#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "whistle/assignment.hpp"
#include "whistle/types.hpp"

namespace whistle {

/// Per-task offloading variables. `edge` empty means the task runs at the
/// cloud; reuse only exists at edges.
struct RoutingDecision {
  std::optional<EdgeId> edge;
  bool reuse_applied{false};
  bool full_reuse{false};
  double residual_complexity{0.0};

  bool at_edge() const noexcept { return edge.has_value(); }

  static RoutingDecision cloud(const Task& task);
  static RoutingDecision edge_scratch(EdgeId edge, const Task& task);
  static RoutingDecision edge_full_reuse(EdgeId edge);
  static RoutingDecision edge_partial_reuse(EdgeId edge, double residual_complexity);
};

/// Empty when the decision satisfies its invariants, otherwise the reason.
std::optional<std::string> decision_inconsistency(const Task& task, const RoutingDecision& d);

struct CostBreakdown {
  double communication{0.0};
  double computation{0.0};  // execution or reuse cost, whichever applied
  double queueing{0.0};
  double total{0.0};
};

struct LookupCost {
  double value{0.0};  // seconds
};

/// Servers a cost is evaluated against.
struct Infrastructure {
  CloudServer cloud;
  std::vector<EdgeServer> edges;

  /// Throws ContractError for an unknown id.
  const EdgeServer& edge(EdgeId id) const;
  const EdgeServer* find_edge(EdgeId id) const noexcept;
};

double communication_cost(const Task& task, const RoutingDecision& decision,
                          double edge_bandwidth, double cloud_bandwidth);

/// Scratch execution cost. Throws ContractError for reuse decisions.
double computation_cost(const Task& task, const RoutingDecision& decision, double edge_capacity,
                        double cloud_capacity);

/// Lookup plus residual execution. Throws ContractError unless reuse applied.
double reuse_execution_cost(const RoutingDecision& decision, LookupCost lookup,
                            double edge_capacity);

/// Communication + (scratch or reuse execution) + queueing, using the edge the
/// decision names (or the cloud).
CostBreakdown completion_cost(const Task& task, const RoutingDecision& decision,
                              const Infrastructure& servers, LookupCost lookup,
                              double queueing_delay = 0.0);

/// Same as above against a single explicit edge/cloud parameter set.
CostBreakdown completion_cost(const Task& task, const RoutingDecision& decision,
                              const EdgeServer& edge, const CloudServer& cloud,
                              LookupCost lookup, double queueing_delay = 0.0);

/// Sum of static completion costs (no queueing). Throws ContractError on a
/// length mismatch.
double objective_value(std::span<const Task> tasks, std::span<const RoutingDecision> decisions,
                       const Infrastructure& servers, LookupCost lookup);

enum class Constraint {
  ComputeCapacity,    // aggregate complexity per edge within f^e * window
  BandwidthCapacity,  // aggregate input per edge within b^e * window
  DecisionConsistency,
  ServiceQuota,
  ReplicaQuota,
  UnhostedService,
  UnknownEdge,
};

const char* to_string(Constraint c) noexcept;

struct Violation {
  Constraint constraint;
  std::optional<EdgeId> edge;
  std::optional<ServiceId> service;
  std::optional<TaskId> task;
  std::string detail;
};

/// Task-level feasibility of a routing against the placement. Capacities are
/// read per window: sum of offloaded F against f^e * window_length, sum of
/// offloaded I against b^e * window_length.
std::vector<Violation> check_feasibility(const Assignment& assignment,
                                         std::span<const Task> tasks,
                                         std::span<const RoutingDecision> decisions,
                                         const Infrastructure& servers, double window_length,
                                         int replica_quota = 0);

}  // namespace whistle
