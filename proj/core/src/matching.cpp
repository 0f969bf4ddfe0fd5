#include "whistle/matching.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace whistle {

namespace {

std::optional<double> reciprocal(double denominator) {
  if (!(denominator > 0.0) || !std::isfinite(denominator)) return std::nullopt;
  return 1.0 / denominator;
}

constexpr std::size_t kUnranked = std::numeric_limits<std::size_t>::max();

}  // namespace

std::optional<double> service_utility_from_terms(double comm_cost, double reusability,
                                                 double punishment) {
  return reciprocal(comm_cost + reusability - punishment);
}

std::optional<double> edge_utility_from_terms(double comp_cost, double reuse_cost,
                                              double gain, GainSign sign) {
  return reciprocal(comp_cost + reuse_cost + (sign == GainSign::Literal ? gain : -gain));
}

double gain_scalar(const OffloadingGain& gain, const EdgeServer& edge) {
  return gain.saved_input / edge.bandwidth + gain.saved_complexity / edge.compute_capacity;
}

double expected_reuse_cost(const Service& service, const EdgeServer& edge,
                           const ServiceWindowStats& stats, LookupCost lookup) {
  const double scratch = stats.mean_complexity / edge.compute_capacity;
  const double hit = stats.observed_hit_rate().value_or(service.reusability);
  return hit * lookup.value + (1.0 - hit) * (lookup.value + scratch);
}

std::optional<double> service_utility(const Service& service, const EdgeServer& edge,
                                      const ServiceWindowStats& stats,
                                      const UtilityOptions& options) {
  const double comm = stats.mean_input_size / edge.bandwidth;
  if (!options.reuse_aware) return reciprocal(comm);
  return service_utility_from_terms(comm, service.reusability, service.punishment);
}

std::optional<double> edge_utility(const EdgeServer& edge, const Service& service,
                                   const ServiceWindowStats& stats, double gain,
                                   const UtilityOptions& options) {
  const double comp = stats.mean_complexity / edge.compute_capacity;
  const double reuse =
      options.reuse_aware ? expected_reuse_cost(service, edge, stats, options.lookup) : 0.0;
  return edge_utility_from_terms(comp, reuse, gain, options.gain_sign);
}

std::optional<double> neighbor_service_utility(const Service& service, double path_bandwidth,
                                               const ServiceWindowStats& stats) {
  if (!(path_bandwidth > 0.0)) return std::nullopt;
  return reciprocal(stats.mean_input_size / path_bandwidth + service.reusability);
}

int MatchingProblem::effective_replica_quota() const {
  return replica_quota > 0 ? replica_quota : static_cast<int>(edges.size());
}

std::optional<double> UtilityTable::theta_of(ServiceId s, EdgeId e) const {
  auto si = std::find(services.begin(), services.end(), s);
  auto ei = std::find(edges.begin(), edges.end(), e);
  if (si == services.end() || ei == edges.end()) return std::nullopt;
  return theta[si - services.begin()][ei - edges.begin()];
}

std::optional<double> UtilityTable::phi_of(EdgeId e, ServiceId s) const {
  auto si = std::find(services.begin(), services.end(), s);
  auto ei = std::find(edges.begin(), edges.end(), e);
  if (si == services.end() || ei == edges.end()) return std::nullopt;
  return phi[ei - edges.begin()][si - services.begin()];
}

UtilityTable UtilityTable::scaled(double factor) const {
  UtilityTable out = *this;
  for (auto& row : out.theta) {
    for (auto& u : row) {
      if (u) *u *= factor;
    }
  }
  for (auto& row : out.phi) {
    for (auto& u : row) {
      if (u) *u *= factor;
    }
  }
  return out;
}

UtilityTable compute_utilities(const MatchingProblem& problem) {
  std::vector<Service> services = problem.services;
  std::sort(services.begin(), services.end(),
            [](const Service& a, const Service& b) { return a.id < b.id; });
  std::vector<EdgeServer> edges = problem.edges;
  std::sort(edges.begin(), edges.end(),
            [](const EdgeServer& a, const EdgeServer& b) { return a.id < b.id; });

  UtilityTable table;
  for (const auto& s : services) table.services.push_back(s.id);
  for (const auto& e : edges) {
    table.edges.push_back(e.id);
    table.quotas.push_back(e.service_quota);
  }
  table.theta.assign(services.size(), std::vector<std::optional<double>>(edges.size()));
  table.phi.assign(edges.size(), std::vector<std::optional<double>>(services.size()));

  for (std::size_t si = 0; si < services.size(); ++si) {
    const ServiceWindowStats* stats = problem.stats.find(services[si].id);
    if (stats == nullptr || stats->received_count == 0) continue;
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
      const bool evicted = problem.evicted.contains({services[si].id, edges[ei].id});
      const Service at_edge = with_eviction(services[si], evicted);
      table.theta[si][ei] = service_utility(at_edge, edges[ei], *stats, problem.options);
      table.phi[ei][si] = edge_utility(edges[ei], at_edge, *stats,
                                       gain_scalar(at_edge.gain, edges[ei]), problem.options);
    }
  }
  return table;
}

namespace {

PreferenceList sorted_list(std::uint32_t owner, std::vector<PreferenceEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const PreferenceEntry& a, const PreferenceEntry& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    return a.counterpart < b.counterpart;
  });
  return {owner, std::move(entries)};
}

}  // namespace

PreferenceLists build_preference_lists(const UtilityTable& table) {
  PreferenceLists lists;
  for (std::size_t s = 0; s < table.services.size(); ++s) {
    std::vector<PreferenceEntry> entries;
    for (std::size_t e = 0; e < table.edges.size(); ++e) {
      if (table.acceptable(s, e)) {
        entries.push_back({table.edges[e].value, *table.theta[s][e]});
      } else {
        lists.excluded.emplace_back(table.services[s], table.edges[e]);
      }
    }
    lists.services[table.services[s]] = sorted_list(table.services[s].value, std::move(entries));
  }
  for (std::size_t e = 0; e < table.edges.size(); ++e) {
    std::vector<PreferenceEntry> entries;
    for (std::size_t s = 0; s < table.services.size(); ++s) {
      if (table.acceptable(s, e)) entries.push_back({table.services[s].value, *table.phi[e][s]});
    }
    lists.edges[table.edges[e]] = sorted_list(table.edges[e].value, std::move(entries));
  }
  return lists;
}

PreferenceLists build_preference_lists(const MatchingProblem& problem) {
  return build_preference_lists(compute_utilities(problem));
}

namespace {

class Acceptance {
 public:
  Acceptance(const UtilityTable& table, int replica_quota, MatchingTrace* trace)
      : table_(table), replica_quota_(replica_quota), trace_(trace) {
    const PreferenceLists lists = build_preference_lists(table);
    const std::size_t n_services = table.services.size();
    const std::size_t n_edges = table.edges.size();

    service_prefs_.resize(n_services);
    for (std::size_t s = 0; s < n_services; ++s) {
      for (const auto& entry : lists.services.at(table.services[s]).ranked) {
        service_prefs_[s].push_back(edge_index(EdgeId{entry.counterpart}));
      }
    }
    edge_rank_.assign(n_edges, std::vector<std::size_t>(n_services, kUnranked));
    for (std::size_t e = 0; e < n_edges; ++e) {
      const auto& ranked = lists.edges.at(table.edges[e]).ranked;
      for (std::size_t r = 0; r < ranked.size(); ++r) {
        edge_rank_[e][service_index(ServiceId{ranked[r].counterpart})] = r;
      }
    }
    held_.resize(n_edges);
    hosts_.assign(n_services, 0);
  }

  Assignment run() {
    stage_one();
    stage_two();
    Assignment out;
    for (std::size_t e = 0; e < held_.size(); ++e) {
      for (const auto& [rank, s] : held_[e]) {
        out.add(Placement{table_.services[s], table_.edges[e], *table_.theta[s][e],
                          *table_.phi[e][s], accepted_stage_.at({s, e})});
      }
    }
    return out;
  }

 private:
  std::size_t edge_index(EdgeId id) const {
    return static_cast<std::size_t>(
        std::find(table_.edges.begin(), table_.edges.end(), id) - table_.edges.begin());
  }
  std::size_t service_index(ServiceId id) const {
    return static_cast<std::size_t>(
        std::find(table_.services.begin(), table_.services.end(), id) - table_.services.begin());
  }

  bool holds(std::size_t e, std::size_t s) const {
    return held_[e].contains({edge_rank_[e][s], s});
  }

  void snapshot(std::size_t e, std::vector<HeldSnapshot>* into) {
    if (trace_ == nullptr) return;
    HeldSnapshot snap{e, {}};
    for (const auto& [rank, s] : held_[e]) snap.ranks.push_back(rank);
    into->push_back(std::move(snap));
  }

  void accept(std::size_t e, std::size_t s, int stage) {
    held_[e].insert({edge_rank_[e][s], s});
    ++hosts_[s];
    accepted_stage_[{s, e}] = stage;
    if (trace_) snapshot(e, &trace_->snapshots);
  }

  /// Returns the displaced service, if any.
  std::optional<std::size_t> displace_worst(std::size_t e) {
    auto worst = std::prev(held_[e].end());
    const std::size_t w = worst->second;
    held_[e].erase(worst);
    --hosts_[w];
    accepted_stage_.erase({w, e});
    return w;
  }

  /// One proposal of s to e. Returns the service rejected by the edge (the
  /// proposer itself, a displaced holder, or nothing).
  std::optional<std::size_t> propose(std::size_t s, std::size_t e, int stage) {
    const auto quota = static_cast<std::size_t>(std::max(table_.quotas[e], 0));
    if (held_[e].size() < quota) {
      accept(e, s, stage);
      return std::nullopt;
    }
    if (trace_) snapshot(e, &trace_->rejections);
    if (quota == 0 || edge_rank_[e][s] > std::prev(held_[e].end())->first) return s;
    auto displaced = displace_worst(e);
    accept(e, s, stage);
    return displaced;
  }

  void stage_one() {
    std::deque<std::size_t> pool;
    std::vector<bool> queued(hosts_.size(), true);
    std::vector<std::size_t> next(hosts_.size(), 0);
    for (std::size_t s = 0; s < hosts_.size(); ++s) pool.push_back(s);

    while (!pool.empty()) {
      const std::size_t s = pool.front();
      pool.pop_front();
      queued[s] = false;
      while (hosts_[s] < replica_quota_ && next[s] < service_prefs_[s].size()) {
        const std::size_t e = service_prefs_[s][next[s]++];
        if (holds(e, s)) continue;
        if (trace_) ++trace_->stage1_proposals;
        auto rejected = propose(s, e, 1);
        if (rejected && *rejected != s && !queued[*rejected]) {
          pool.push_back(*rejected);
          queued[*rejected] = true;
        }
      }
    }
  }

  void stage_two() {
    std::vector<std::size_t> next(hosts_.size(), 0);
    while (true) {
      if (trace_) ++trace_->stage2_rounds;
      // Proposals of this round, grouped by edge.
      std::vector<std::vector<std::size_t>> candidates(held_.size());
      bool proposed = false;
      for (std::size_t s = 0; s < hosts_.size(); ++s) {
        if (hosts_[s] >= replica_quota_) continue;
        while (next[s] < service_prefs_[s].size() && holds(service_prefs_[s][next[s]], s)) ++next[s];
        if (next[s] == service_prefs_[s].size()) continue;
        candidates[service_prefs_[s][next[s]++]].push_back(s);
        proposed = true;
        if (trace_) ++trace_->stage2_proposals;
      }
      if (!proposed) break;

      bool changed = false;
      for (std::size_t e = 0; e < candidates.size(); ++e) {
        auto& group = candidates[e];
        std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
          return edge_rank_[e][a] < edge_rank_[e][b];
        });
        for (std::size_t s : group) {
          if (hosts_[s] >= replica_quota_ || holds(e, s)) continue;
          auto rejected = propose(s, e, 2);
          if (!rejected || *rejected != s) changed = true;
        }
      }
      if (!changed) break;
    }
  }

  const UtilityTable& table_;
  std::size_t replica_quota_;
  MatchingTrace* trace_;
  std::vector<std::vector<std::size_t>> service_prefs_;
  std::vector<std::vector<std::size_t>> edge_rank_;
  std::vector<std::set<std::pair<std::size_t, std::size_t>>> held_;  // (edge rank, service)
  std::vector<std::size_t> hosts_;
  std::map<std::pair<std::size_t, std::size_t>, int> accepted_stage_;
};

}  // namespace

Assignment deferred_acceptance(const UtilityTable& table, int replica_quota, MatchingTrace* trace) {
  const int quota = replica_quota > 0 ? replica_quota : static_cast<int>(table.edges.size());
  return Acceptance(table, quota, trace).run();
}

Assignment whistle_match(const MatchingProblem& problem, MatchingTrace* trace) {
  return deferred_acceptance(compute_utilities(problem), problem.effective_replica_quota(), trace);
}

StabilityReport is_exchange_stable(const Assignment& assignment, const UtilityTable& table) {
  StabilityReport report;
  const auto keys = assignment.keys();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (std::size_t j = i + 1; j < keys.size(); ++j) {
      const auto [s1, e1] = keys[i];
      const auto [s2, e2] = keys[j];
      if (s1 == s2 || e1 == e2) continue;
      // Swapping must yield two new pairs.
      if (assignment.contains(s1, e2) || assignment.contains(s2, e1)) continue;

      const auto t11 = table.theta_of(s1, e1), t12 = table.theta_of(s1, e2);
      const auto t22 = table.theta_of(s2, e2), t21 = table.theta_of(s2, e1);
      const auto p11 = table.phi_of(e1, s1), p12 = table.phi_of(e1, s2);
      const auto p22 = table.phi_of(e2, s2), p21 = table.phi_of(e2, s1);
      if (!(t11 && t12 && t22 && t21 && p11 && p12 && p22 && p21)) continue;

      const bool weak = *t12 >= *t11 && *t21 >= *t22 && *p12 >= *p11 && *p21 >= *p22;
      const bool strict = *t12 > *t11 || *t21 > *t22 || *p12 > *p11 || *p21 > *p22;
      if (weak && strict) {
        report.stable = false;
        report.violations.push_back({s1, e1, s2, e2});
      }
    }
  }
  return report;
}

}  // namespace whistle
