#include "whistle/cost_model.hpp"

#include <map>
#include <string>

#include "whistle/errors.hpp"

namespace whistle {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0)) throw DomainError(std::string(what) + " must be positive");
}

}  // namespace

RoutingDecision RoutingDecision::cloud(const Task& task) {
  return {std::nullopt, false, false, task.complexity};
}

RoutingDecision RoutingDecision::edge_scratch(EdgeId edge, const Task& task) {
  return {edge, false, false, task.complexity};
}

RoutingDecision RoutingDecision::edge_full_reuse(EdgeId edge) { return {edge, true, true, 0.0}; }

RoutingDecision RoutingDecision::edge_partial_reuse(EdgeId edge, double residual_complexity) {
  return {edge, true, false, residual_complexity};
}

std::optional<std::string> decision_inconsistency(const Task& task, const RoutingDecision& d) {
  if (d.full_reuse && !d.reuse_applied) return "full reuse without reuse applied";
  if (d.reuse_applied && !d.at_edge()) return "reuse applied at the cloud";
  if (d.full_reuse && d.residual_complexity != 0.0) return "full reuse with residual work";
  if (!d.reuse_applied && d.residual_complexity != task.complexity) {
    return "scratch execution with residual different from task complexity";
  }
  if (d.residual_complexity < 0.0) return "negative residual complexity";
  return std::nullopt;
}

const EdgeServer* Infrastructure::find_edge(EdgeId id) const noexcept {
  for (const auto& e : edges) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

const EdgeServer& Infrastructure::edge(EdgeId id) const {
  if (const EdgeServer* e = find_edge(id)) return *e;
  throw ContractError("unknown edge id " + std::to_string(id.value));
}

double communication_cost(const Task& task, const RoutingDecision& decision,
                          double edge_bandwidth, double cloud_bandwidth) {
  require_positive(edge_bandwidth, "edge bandwidth");
  require_positive(cloud_bandwidth, "cloud bandwidth");
  return task.input_size / (decision.at_edge() ? edge_bandwidth : cloud_bandwidth);
}

double computation_cost(const Task& task, const RoutingDecision& decision, double edge_capacity,
                        double cloud_capacity) {
  if (decision.reuse_applied) {
    throw ContractError("computation_cost called for a reuse decision; use reuse_execution_cost");
  }
  require_positive(edge_capacity, "edge capacity");
  require_positive(cloud_capacity, "cloud capacity");
  return task.complexity / (decision.at_edge() ? edge_capacity : cloud_capacity);
}

double reuse_execution_cost(const RoutingDecision& decision, LookupCost lookup,
                            double edge_capacity) {
  if (!decision.reuse_applied) {
    throw ContractError("reuse_execution_cost called without reuse applied");
  }
  if (decision.full_reuse) return lookup.value;
  require_positive(edge_capacity, "edge capacity");
  return lookup.value + decision.residual_complexity / edge_capacity;
}

CostBreakdown completion_cost(const Task& task, const RoutingDecision& decision,
                              const EdgeServer& edge, const CloudServer& cloud,
                              LookupCost lookup, double queueing_delay) {
  if (auto why = decision_inconsistency(task, decision)) throw ContractError(*why);
  CostBreakdown c;
  c.communication = communication_cost(task, decision, edge.bandwidth, cloud.bandwidth);
  c.computation = decision.reuse_applied
                      ? reuse_execution_cost(decision, lookup, edge.compute_capacity)
                      : computation_cost(task, decision, edge.compute_capacity,
                                         cloud.compute_capacity);
  c.queueing = queueing_delay;
  c.total = c.communication + c.computation + c.queueing;
  return c;
}

CostBreakdown completion_cost(const Task& task, const RoutingDecision& decision,
                              const Infrastructure& servers, LookupCost lookup,
                              double queueing_delay) {
  if (decision.at_edge()) {
    return completion_cost(task, decision, servers.edge(*decision.edge), servers.cloud, lookup,
                           queueing_delay);
  }
  // Cloud route: edge parameters are never read, any positive values do.
  const EdgeServer unused{EdgeId{}, 1.0, 1.0, 1, {}};
  return completion_cost(task, decision, unused, servers.cloud, lookup, queueing_delay);
}

double objective_value(std::span<const Task> tasks, std::span<const RoutingDecision> decisions,
                       const Infrastructure& servers, LookupCost lookup) {
  if (tasks.size() != decisions.size()) {
    throw ContractError("objective_value: one decision per task required");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    total += completion_cost(tasks[i], decisions[i], servers, lookup).total;
  }
  return total;
}

const char* to_string(Constraint c) noexcept {
  switch (c) {
    case Constraint::ComputeCapacity: return "compute-capacity";
    case Constraint::BandwidthCapacity: return "bandwidth-capacity";
    case Constraint::DecisionConsistency: return "decision-consistency";
    case Constraint::ServiceQuota: return "service-quota";
    case Constraint::ReplicaQuota: return "replica-quota";
    case Constraint::UnhostedService: return "unhosted-service";
    case Constraint::UnknownEdge: return "unknown-edge";
  }
  return "?";
}

std::vector<Violation> check_feasibility(const Assignment& assignment,
                                         std::span<const Task> tasks,
                                         std::span<const RoutingDecision> decisions,
                                         const Infrastructure& servers, double window_length,
                                         int replica_quota) {
  std::vector<Violation> out;
  if (tasks.size() != decisions.size()) {
    throw ContractError("check_feasibility: one decision per task required");
  }

  for (const auto& [key, p] : assignment.placements()) {
    if (!servers.find_edge(key.second)) {
      out.push_back({Constraint::UnknownEdge, key.second, key.first, std::nullopt,
                     "placement on unknown edge"});
    }
  }
  for (const auto& e : servers.edges) {
    if (assignment.hosted_count(e.id) > static_cast<std::size_t>(e.service_quota)) {
      out.push_back({Constraint::ServiceQuota, e.id, std::nullopt, std::nullopt,
                     "hosts " + std::to_string(assignment.hosted_count(e.id)) + " > quota " +
                         std::to_string(e.service_quota)});
    }
  }
  if (replica_quota > 0) {
    std::map<ServiceId, bool> seen;
    for (const auto& [key, p] : assignment.placements()) {
      if (seen[key.first]) continue;
      seen[key.first] = true;
      if (assignment.replica_count(key.first) > static_cast<std::size_t>(replica_quota)) {
        out.push_back({Constraint::ReplicaQuota, std::nullopt, key.first, std::nullopt,
                       "replicas exceed quota"});
      }
    }
  }

  std::map<EdgeId, double> complexity;
  std::map<EdgeId, double> input;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    const RoutingDecision& d = decisions[i];
    if (auto why = decision_inconsistency(t, d)) {
      out.push_back({Constraint::DecisionConsistency, d.edge, t.service, t.id, *why});
    }
    if (!d.at_edge()) continue;
    if (!servers.find_edge(*d.edge)) {
      out.push_back({Constraint::UnknownEdge, d.edge, t.service, t.id, "task routed to unknown edge"});
      continue;
    }
    if (!assignment.contains(t.service, *d.edge)) {
      out.push_back({Constraint::UnhostedService, d.edge, t.service, t.id,
                     "task offloaded to an edge that does not host its service"});
    }
    complexity[*d.edge] += t.complexity;
    input[*d.edge] += t.input_size;
  }
  for (const auto& e : servers.edges) {
    if (complexity[e.id] > e.compute_capacity * window_length) {
      out.push_back({Constraint::ComputeCapacity, e.id, std::nullopt, std::nullopt,
                     "offloaded complexity exceeds f^e * window"});
    }
    if (input[e.id] > e.bandwidth * window_length) {
      out.push_back({Constraint::BandwidthCapacity, e.id, std::nullopt, std::nullopt,
                     "offloaded input exceeds b^e * window"});
    }
  }
  return out;
}

}  // namespace whistle
