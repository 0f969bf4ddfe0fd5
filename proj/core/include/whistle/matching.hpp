#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "whistle/assignment.hpp"
#include "whistle/cost_model.hpp"
#include "whistle/statistics.hpp"
#include "whistle/types.hpp"

namespace whistle {

/// Whether the offloading gain enters the edge utility denominator as
/// written (+) or subtracted, for sensitivity runs.
enum class GainSign { Literal, Subtractive };

struct UtilityOptions {
  LookupCost lookup{0.001};
  GainSign gain_sign{GainSign::Literal};
  /// False drops reusability, punishment and reuse cost from both sides
  /// (the plain matching baseline).
  bool reuse_aware{true};
};

// Utility terms. Each returns nullopt when the denominator is not positive
// (the pair is then left out of the preference lists).

std::optional<double> service_utility_from_terms(double comm_cost, double reusability,
                                                 double punishment);
std::optional<double> edge_utility_from_terms(double comp_cost, double reuse_cost,
                                              double gain_scalar,
                                              GainSign sign = GainSign::Literal);

/// Offloading gain in seconds at this edge: saved input over b^e plus saved
/// complexity over f^e.
double gain_scalar(const OffloadingGain& gain, const EdgeServer& edge);

/// Expected reuse cost of a service at an edge: lookup plus the miss share of
/// the scratch cost. The miss share comes from observed edge executions when
/// there were any, from the potential reusability otherwise.
double expected_reuse_cost(const Service& service, const EdgeServer& edge,
                           const ServiceWindowStats& stats, LookupCost lookup);

/// Service-side utility of `edge`. `service.punishment` must already reflect
/// whether the service was evicted from this edge.
std::optional<double> service_utility(const Service& service, const EdgeServer& edge,
                                      const ServiceWindowStats& stats,
                                      const UtilityOptions& options = {});

std::optional<double> edge_utility(const EdgeServer& edge, const Service& service,
                                   const ServiceWindowStats& stats, double gain,
                                   const UtilityOptions& options = {});

/// Utility of redirecting a service's task to a one-hop neighbour reached
/// over `path_bandwidth`.
std::optional<double> neighbor_service_utility(const Service& service, double path_bandwidth,
                                               const ServiceWindowStats& stats);

using EvictionSet = std::set<std::pair<ServiceId, EdgeId>>;

/// Inputs of one matching round.
struct MatchingProblem {
  std::vector<Service> services;
  std::vector<EdgeServer> edges;
  WindowStats stats;
  EvictionSet evicted;
  UtilityOptions options;
  int replica_quota{0};  // 0 means |E|

  int effective_replica_quota() const;
};

/// Dense utilities; nullopt marks an excluded pair.
struct UtilityTable {
  std::vector<ServiceId> services;
  std::vector<EdgeId> edges;
  std::vector<int> quotas;                               // per edge
  std::vector<std::vector<std::optional<double>>> theta;  // [service][edge]
  std::vector<std::vector<std::optional<double>>> phi;    // [edge][service]

  std::optional<double> theta_of(ServiceId s, EdgeId e) const;
  std::optional<double> phi_of(EdgeId e, ServiceId s) const;
  bool acceptable(std::size_t s, std::size_t e) const { return theta[s][e] && phi[e][s]; }

  /// Same table with every utility multiplied by `factor`.
  UtilityTable scaled(double factor) const;
};

UtilityTable compute_utilities(const MatchingProblem& problem);

struct PreferenceEntry {
  std::uint32_t counterpart{};
  double utility{};
};

/// Counterparts in strictly descending utility, ties by ascending id.
struct PreferenceList {
  std::uint32_t owner{};
  std::vector<PreferenceEntry> ranked;
};

struct PreferenceLists {
  std::map<ServiceId, PreferenceList> services;
  std::map<EdgeId, PreferenceList> edges;
  std::vector<std::pair<ServiceId, EdgeId>> excluded;  // pairs with no valid utility
};

PreferenceLists build_preference_lists(const UtilityTable& table);
PreferenceLists build_preference_lists(const MatchingProblem& problem);

/// Snapshot of an edge's held services (edge-side ranks, best first) after a
/// change.
struct HeldSnapshot {
  std::size_t edge{};
  std::vector<std::size_t> ranks;
};

struct MatchingTrace {
  std::size_t stage1_proposals{0};
  std::size_t stage2_proposals{0};
  std::size_t stage2_rounds{0};
  std::vector<HeldSnapshot> snapshots;
  /// Edge-side rank vectors at each rejection by a full edge.
  std::vector<HeldSnapshot> rejections;
};

/// Two-stage service-proposing deferred acceptance with edge quotas and a
/// per-service replica quota. Stage 1 walks each service's list once; an
/// edge at quota swaps out its least preferred holder for a better proposer.
/// Stage 2 lets services with spare replica slots re-propose from the top of
/// their lists in rounds until a round changes nothing.
Assignment deferred_acceptance(const UtilityTable& table, int replica_quota,
                               MatchingTrace* trace = nullptr);

Assignment whistle_match(const MatchingProblem& problem, MatchingTrace* trace = nullptr);

struct BlockingSwap {
  ServiceId first;
  EdgeId first_edge;
  ServiceId second;
  EdgeId second_edge;
};

struct StabilityReport {
  bool stable{true};
  std::vector<BlockingSwap> violations;
};

/// Enumerates pairs of placements (s1,e1), (s2,e2) with distinct services and
/// edges whose host swap is weakly better for all four parties and strictly
/// better for at least one.
StabilityReport is_exchange_stable(const Assignment& assignment, const UtilityTable& table);

}  // namespace whistle
