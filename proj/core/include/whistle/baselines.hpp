#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "whistle/assignment.hpp"
#include "whistle/matching.hpp"
#include "whistle/placement.hpp"
#include "whistle/statistics.hpp"

namespace whistle {

enum class SchemeKind {
  CloudOnly,
  RandomEdge,
  Greedy,
  GeneticAlgorithm,
  SimulatedAnnealing,
  MatchingNoReuse,
  Whistle,
  ExtendedWhistle,
};

/// A placement scheme plus whether edges consult their reuse tables.
/// CloudOnly never has reuse.
struct Scheme {
  SchemeKind kind{SchemeKind::Whistle};
  bool reuse_enabled{true};

  /// cloud, random, greedy, ga, sa, matching, whistle, extended; baselines
  /// take an optional "+reuse" suffix.
  static Scheme parse(const std::string& name);
  std::string name() const;

  /// The eight schemes in report order, each with its default reuse setting.
  static std::vector<Scheme> all();

  bool operator==(const Scheme&) const = default;
};

struct GaParams {
  std::size_t population{30};
  std::size_t generations{100};
  double mutation_rate{0.05};
  std::size_t tournament{3};
};

struct SaParams {
  std::optional<double> initial_temperature;  // default: objective of the start state
  double cooling{0.95};
  std::size_t iterations{2000};
};

Assignment cloud_only();

/// Each edge draws min(quota, eligible) services uniformly without
/// replacement; services already at the replica quota are not eligible.
Assignment random_edge(const std::vector<ServiceId>& services,
                       const std::vector<EdgeServer>& edges, std::uint64_t seed,
                       int replica_quota = 0);

/// Services by invocation count (descending, ties by id) are placed one at a
/// time on the least-loaded edge with a free slot that does not already host
/// them, in repeated passes until no placement is possible.
Assignment greedy_offload(const std::vector<ServiceId>& services,
                          const std::vector<EdgeServer>& edges, const WindowStats& stats,
                          int replica_quota = 0);

/// Invocation count of a service at an edge: its recorded origin count, or an
/// even share of its received count when no origins were recorded.
double invocation_weight(const ServiceWindowStats& stats, EdgeId edge, std::size_t edge_count);

struct GaTrace {
  std::vector<double> best_fitness;  // per generation, index 0 = initial population
};

/// Genetic search over binary service-by-edge matrices. Fitness is the sum of
/// invocation weights of placed pairs; quota-violating chromosomes are
/// rejected. Tournament selection, single-point crossover, bit-flip mutation
/// and one elite.
Assignment ga_offload(const std::vector<ServiceId>& services,
                      const std::vector<EdgeServer>& edges, const WindowStats& stats,
                      const GaParams& params, std::uint64_t seed, int replica_quota = 0,
                      GaTrace* trace = nullptr);

double ga_fitness(const Assignment& assignment, const std::vector<EdgeServer>& edges,
                  const WindowStats& stats, int replica_quota = 0);

struct SaTrace {
  std::vector<double> best_objective;  // per iteration, index 0 = start state
  std::size_t accepted_worse{0};
};

/// Simulated annealing on placement_objective from the empty placement. A
/// move toggles a random (service, edge) pair, swapping out a random hosted
/// service when the edge is full; infeasible moves are skipped.
Assignment sa_offload(const PlacementInstance& instance, const SaParams& params,
                      std::uint64_t seed, SaTrace* trace = nullptr);

/// Probability of accepting a move that changes the objective by `delta`.
double sa_acceptance(double delta, double temperature);

/// WHISTLE matching with reusability, punishment and reuse cost removed.
Assignment matching_no_reuse(MatchingProblem problem, MatchingTrace* trace = nullptr);

}  // namespace whistle
