#include "whistle/placement.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>

#include "whistle/errors.hpp"

namespace whistle {

double ServiceDemand::total_arrivals() const {
  double total = 0.0;
  for (const auto& [edge, n] : arrivals) total += n;
  return total;
}

int PlacementInstance::effective_replica_quota() const {
  return replica_quota > 0 ? replica_quota : static_cast<int>(servers.edges.size());
}

PlacementInstance make_placement_instance(const WindowStats& stats, const Infrastructure& servers,
                                          LookupCost lookup, int replica_quota) {
  PlacementInstance instance;
  instance.servers = servers;
  instance.lookup = lookup;
  instance.window_length = stats.window_length;
  instance.replica_quota = replica_quota;
  for (const auto& [id, s] : stats.services) {
    if (s.received_count == 0) continue;
    ServiceDemand d;
    d.service = id;
    d.mean_input_size = s.mean_input_size;
    d.mean_complexity = s.mean_complexity;
    d.reuse_fraction = s.repeat_fraction();
    std::size_t attributed = 0;
    for (const auto& [edge, n] : s.origin_counts) {
      if (servers.find_edge(edge)) {
        d.arrivals[edge] += static_cast<double>(n);
        attributed += n;
      }
    }
    const std::size_t rest = s.received_count - std::min(attributed, s.received_count);
    if (rest > 0 && !servers.edges.empty()) {
      const double share = static_cast<double>(rest) / static_cast<double>(servers.edges.size());
      for (const auto& e : servers.edges) d.arrivals[e.id] += share;
    }
    instance.demands.push_back(std::move(d));
  }
  return instance;
}

double expected_task_cost(const ServiceDemand& demand, const EdgeServer* edge,
                          const Infrastructure& servers, LookupCost lookup) {
  Task mean_task;
  mean_task.service = demand.service;
  mean_task.input_size = demand.mean_input_size;
  mean_task.complexity = demand.mean_complexity;
  if (edge == nullptr) {
    return completion_cost(mean_task, RoutingDecision::cloud(mean_task), servers, lookup).total;
  }
  const double scratch =
      completion_cost(mean_task, RoutingDecision::edge_scratch(edge->id, mean_task), *edge,
                      servers.cloud, lookup)
          .total;
  const double full =
      completion_cost(mean_task, RoutingDecision::edge_full_reuse(edge->id), *edge,
                      servers.cloud, lookup)
          .total;
  return demand.reuse_fraction * full + (1.0 - demand.reuse_fraction) * scratch;
}

double placement_objective(const PlacementInstance& instance, const Assignment& assignment) {
  double total = 0.0;
  for (const auto& d : instance.demands) {
    const double cloud = expected_task_cost(d, nullptr, instance.servers, instance.lookup);
    for (const auto& [edge_id, n] : d.arrivals) {
      const EdgeServer* edge = instance.servers.find_edge(edge_id);
      if (edge && assignment.contains(d.service, edge_id)) {
        total += n * expected_task_cost(d, edge, instance.servers, instance.lookup);
      } else {
        total += n * cloud;
      }
    }
  }
  return total;
}

std::vector<Violation> check_placement(const PlacementInstance& instance,
                                       const Assignment& assignment) {
  std::vector<Violation> out;
  const auto& servers = instance.servers;
  for (const auto& [key, p] : assignment.placements()) {
    if (!servers.find_edge(key.second)) {
      out.push_back({Constraint::UnknownEdge, key.second, key.first, std::nullopt,
                     "placement on unknown edge"});
    }
  }
  const auto replica_quota = static_cast<std::size_t>(instance.effective_replica_quota());
  for (const auto& d : instance.demands) {
    if (assignment.replica_count(d.service) > replica_quota) {
      out.push_back({Constraint::ReplicaQuota, std::nullopt, d.service, std::nullopt,
                     "replicas exceed quota"});
    }
  }
  for (const auto& e : servers.edges) {
    if (assignment.hosted_count(e.id) > static_cast<std::size_t>(e.service_quota)) {
      out.push_back({Constraint::ServiceQuota, e.id, std::nullopt, std::nullopt,
                     "hosted services exceed quota"});
    }
    double complexity = 0.0;
    double input = 0.0;
    for (const auto& d : instance.demands) {
      if (!assignment.contains(d.service, e.id)) continue;
      auto it = d.arrivals.find(e.id);
      const double n = it == d.arrivals.end() ? 0.0 : it->second;
      complexity += n * d.mean_complexity;
      input += n * d.mean_input_size;
    }
    if (complexity > e.compute_capacity * instance.window_length) {
      out.push_back({Constraint::ComputeCapacity, e.id, std::nullopt, std::nullopt,
                     "hosted demand exceeds f^e * window"});
    }
    if (input > e.bandwidth * instance.window_length) {
      out.push_back({Constraint::BandwidthCapacity, e.id, std::nullopt, std::nullopt,
                     "hosted demand exceeds b^e * window"});
    }
  }
  return out;
}

namespace {

struct EdgeOption {
  std::uint32_t mask{0};   // bit i selects demand i
  double delta{0.0};       // cost change against all-cloud
  std::vector<std::uint32_t> services;  // sorted service ids, for tie-breaks
};

struct Search {
  explicit Search(const PlacementInstance& inst) : instance(inst) {}

  const PlacementInstance& instance;
  std::vector<std::vector<EdgeOption>> options;  // per edge, ascending delta
  std::vector<double> best_suffix;               // sum of best deltas of edges >= i
  std::vector<int> replicas;
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> best_choice;
  double best_delta{std::numeric_limits<double>::infinity()};
  std::size_t best_pairs{0};
  int replica_quota{0};

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_of(
      const std::vector<std::size_t>& choice) const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::size_t e = 0; e < choice.size(); ++e) {
      for (auto s : options[e][choice[e]].services) {
        out.emplace_back(s, instance.servers.edges[e].id.value);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  void visit(std::size_t edge, double delta) {
    if (edge == options.size()) {
      std::size_t pairs = 0;
      for (std::size_t e = 0; e < chosen.size(); ++e) pairs += options[e][chosen[e]].services.size();
      bool better = delta < best_delta;
      if (!better && delta == best_delta) {
        better = pairs < best_pairs || (pairs == best_pairs && pairs_of(chosen) < pairs_of(best_choice));
      }
      if (better) {
        best_delta = delta;
        best_pairs = pairs;
        best_choice = chosen;
      }
      return;
    }
    for (std::size_t k = 0; k < options[edge].size(); ++k) {
      const EdgeOption& option = options[edge][k];
      if (delta + option.delta + best_suffix[edge + 1] > best_delta) break;
      bool fits = true;
      for (std::size_t i = 0; i < replicas.size(); ++i) {
        if ((option.mask >> i) & 1u) fits = fits && replicas[i] < replica_quota;
      }
      if (!fits) continue;
      for (std::size_t i = 0; i < replicas.size(); ++i) replicas[i] += (option.mask >> i) & 1u;
      chosen[edge] = k;
      visit(edge + 1, delta + option.delta);
      for (std::size_t i = 0; i < replicas.size(); ++i) replicas[i] -= (option.mask >> i) & 1u;
    }
  }
};

}  // namespace

Assignment brute_force_offload(const PlacementInstance& instance) {
  const auto& demands = instance.demands;
  const auto& edges = instance.servers.edges;
  if (demands.size() > kBruteForceMaxServices || edges.size() > kBruteForceMaxEdges) {
    throw SizeError("brute_force_offload: instance exceeds 12 services / 4 edges");
  }

  Search search(instance);
  search.replica_quota = instance.effective_replica_quota();
  search.replicas.assign(demands.size(), 0);
  search.options.resize(edges.size());

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const EdgeServer& edge = edges[e];
    // Per-service saving at this edge; hosting a service that saves nothing
    // never lowers the objective and only adds pairs.
    std::vector<double> saving(demands.size(), 0.0);
    std::vector<double> load(demands.size(), 0.0);
    std::vector<double> traffic(demands.size(), 0.0);
    std::uint32_t useful = 0;
    for (std::size_t i = 0; i < demands.size(); ++i) {
      const auto& d = demands[i];
      auto it = d.arrivals.find(edge.id);
      const double n = it == d.arrivals.end() ? 0.0 : it->second;
      const double cloud = expected_task_cost(d, nullptr, instance.servers, instance.lookup);
      const double at_edge = expected_task_cost(d, &edge, instance.servers, instance.lookup);
      saving[i] = n * (at_edge - cloud);
      load[i] = n * d.mean_complexity;
      traffic[i] = n * d.mean_input_size;
      if (saving[i] < 0.0) useful |= 1u << i;
    }
    const double compute_budget = edge.compute_capacity * instance.window_length;
    const double bandwidth_budget = edge.bandwidth * instance.window_length;
    const std::uint32_t limit = 1u << demands.size();
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
      if ((mask & ~useful) != 0) continue;
      if (std::popcount(mask) > edge.service_quota) continue;
      EdgeOption option;
      option.mask = mask;
      double compute = 0.0;
      double bytes = 0.0;
      for (std::size_t i = 0; i < demands.size(); ++i) {
        if (!((mask >> i) & 1u)) continue;
        option.delta += saving[i];
        compute += load[i];
        bytes += traffic[i];
        option.services.push_back(demands[i].service.value);
      }
      if (compute > compute_budget || bytes > bandwidth_budget) continue;
      std::sort(option.services.begin(), option.services.end());
      search.options[e].push_back(std::move(option));
    }
    std::stable_sort(search.options[e].begin(), search.options[e].end(),
                     [](const EdgeOption& a, const EdgeOption& b) {
                       if (a.delta != b.delta) return a.delta < b.delta;
                       if (a.services.size() != b.services.size()) {
                         return a.services.size() < b.services.size();
                       }
                       return a.services < b.services;
                     });
  }

  search.best_suffix.assign(edges.size() + 1, 0.0);
  for (std::size_t e = edges.size(); e-- > 0;) {
    search.best_suffix[e] = search.best_suffix[e + 1] + search.options[e].front().delta;
  }
  search.chosen.assign(edges.size(), 0);
  search.visit(0, 0.0);

  Assignment result;
  for (std::size_t e = 0; e < search.best_choice.size(); ++e) {
    for (auto s : search.options[e][search.best_choice[e]].services) {
      result.add(ServiceId{s}, edges[e].id);
    }
  }
  return result;
}

}  // namespace whistle
