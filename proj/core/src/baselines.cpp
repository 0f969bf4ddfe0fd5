#include "whistle/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "whistle/errors.hpp"

namespace whistle {

namespace {

struct SchemeName {
  SchemeKind kind;
  const char* name;
  bool default_reuse;
};

constexpr SchemeName kSchemes[] = {
    {SchemeKind::CloudOnly, "cloud", false},
    {SchemeKind::RandomEdge, "random", false},
    {SchemeKind::Greedy, "greedy", false},
    {SchemeKind::GeneticAlgorithm, "ga", false},
    {SchemeKind::SimulatedAnnealing, "sa", false},
    {SchemeKind::MatchingNoReuse, "matching", false},
    {SchemeKind::Whistle, "whistle", true},
    {SchemeKind::ExtendedWhistle, "extended", true},
};

constexpr const char* kReuseSuffix = "+reuse";

int replica_limit(int replica_quota, std::size_t edge_count) {
  return replica_quota > 0 ? replica_quota : static_cast<int>(edge_count);
}

}  // namespace

Scheme Scheme::parse(const std::string& name) {
  std::string base = name;
  bool suffixed = false;
  const std::string suffix = kReuseSuffix;
  if (base.size() > suffix.size() && base.ends_with(suffix)) {
    base.resize(base.size() - suffix.size());
    suffixed = true;
  }
  for (const auto& s : kSchemes) {
    if (base != s.name) continue;
    if (suffixed && (s.default_reuse || s.kind == SchemeKind::CloudOnly)) {
      throw ConfigError("schemes", "scheme '" + name + "' does not take a +reuse suffix");
    }
    return Scheme{s.kind, s.default_reuse || suffixed};
  }
  throw ConfigError("schemes", "unknown scheme '" + name + "'");
}

std::string Scheme::name() const {
  for (const auto& s : kSchemes) {
    if (s.kind != kind) continue;
    std::string out = s.name;
    if (reuse_enabled && !s.default_reuse) out += kReuseSuffix;
    return out;
  }
  return "?";
}

std::vector<Scheme> Scheme::all() {
  std::vector<Scheme> out;
  for (const auto& s : kSchemes) out.push_back({s.kind, s.default_reuse});
  return out;
}

Assignment cloud_only() { return {}; }

Assignment random_edge(const std::vector<ServiceId>& services,
                       const std::vector<EdgeServer>& edges, std::uint64_t seed,
                       int replica_quota) {
  std::mt19937_64 rng(seed);
  std::vector<ServiceId> sorted = services;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const auto limit = static_cast<std::size_t>(replica_limit(replica_quota, edges.size()));

  Assignment out;
  for (const auto& edge : edges) {
    std::vector<ServiceId> eligible;
    for (auto s : sorted) {
      if (out.replica_count(s) < limit) eligible.push_back(s);
    }
    const auto take = std::min(eligible.size(), static_cast<std::size_t>(std::max(edge.service_quota, 0)));
    // Partial Fisher-Yates: the first `take` slots are a uniform sample.
    for (std::size_t i = 0; i < take; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, eligible.size() - 1);
      std::swap(eligible[i], eligible[pick(rng)]);
      out.add(Placement{eligible[i], edge.id});
    }
  }
  return out;
}

double invocation_weight(const ServiceWindowStats& stats, EdgeId edge, std::size_t edge_count) {
  if (stats.origin_counts.empty()) {
    return edge_count == 0 ? 0.0
                           : static_cast<double>(stats.received_count) /
                                 static_cast<double>(edge_count);
  }
  auto it = stats.origin_counts.find(edge);
  return it == stats.origin_counts.end() ? 0.0 : static_cast<double>(it->second);
}

namespace {

std::size_t received(const WindowStats& stats, ServiceId s) {
  const auto* st = stats.find(s);
  return st ? st->received_count : 0;
}

}  // namespace

Assignment greedy_offload(const std::vector<ServiceId>& services,
                          const std::vector<EdgeServer>& edges, const WindowStats& stats,
                          int replica_quota) {
  std::vector<ServiceId> order = services;
  std::sort(order.begin(), order.end(), [&](ServiceId a, ServiceId b) {
    const auto ca = received(stats, a);
    const auto cb = received(stats, b);
    if (ca != cb) return ca > cb;
    return a < b;
  });
  order.erase(std::unique(order.begin(), order.end()), order.end());
  const auto limit = static_cast<std::size_t>(replica_limit(replica_quota, edges.size()));

  Assignment out;
  std::map<EdgeId, double> load;
  bool placed = true;
  while (placed) {
    placed = false;
    for (auto s : order) {
      if (out.replica_count(s) >= limit) continue;
      const EdgeServer* best = nullptr;
      for (const auto& e : edges) {
        if (out.hosted_count(e.id) >= static_cast<std::size_t>(std::max(e.service_quota, 0))) continue;
        if (out.contains(s, e.id)) continue;
        if (best == nullptr || load[e.id] < load[best->id] ||
            (load[e.id] == load[best->id] && out.hosted_count(e.id) < out.hosted_count(best->id))) {
          best = &e;
        }
      }
      if (best == nullptr) continue;
      out.add(Placement{s, best->id});
      load[best->id] += static_cast<double>(received(stats, s));
      placed = true;
    }
  }
  return out;
}

namespace {

using Genome = std::vector<char>;  // [service * E + edge]

struct GaSpace {
  const std::vector<ServiceId>& services;
  const std::vector<EdgeServer>& edges;
  std::vector<double> weight;  // per gene
  std::size_t replica_limit;

  std::size_t genes() const { return services.size() * edges.size(); }

  bool feasible(const Genome& g) const {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      std::size_t hosted = 0;
      for (std::size_t s = 0; s < services.size(); ++s) hosted += g[s * edges.size() + e];
      if (hosted > static_cast<std::size_t>(std::max(edges[e].service_quota, 0))) return false;
    }
    for (std::size_t s = 0; s < services.size(); ++s) {
      std::size_t replicas = 0;
      for (std::size_t e = 0; e < edges.size(); ++e) replicas += g[s * edges.size() + e];
      if (replicas > replica_limit) return false;
    }
    return true;
  }

  double fitness(const Genome& g) const {
    if (!feasible(g)) return -std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i]) total += weight[i];
    }
    return total;
  }

  Assignment decode(const Genome& g) const {
    Assignment out;
    for (std::size_t s = 0; s < services.size(); ++s) {
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (g[s * edges.size() + e]) out.add(Placement{services[s], edges[e].id});
      }
    }
    return out;
  }

  Genome encode(const Assignment& a) const {
    Genome g(genes(), 0);
    for (std::size_t s = 0; s < services.size(); ++s) {
      for (std::size_t e = 0; e < edges.size(); ++e) g[s * edges.size() + e] = a.contains(services[s], edges[e].id);
    }
    return g;
  }
};

}  // namespace

double ga_fitness(const Assignment& assignment, const std::vector<EdgeServer>& edges,
                  const WindowStats& stats, int replica_quota) {
  std::vector<ServiceId> services;
  for (const auto& [id, st] : stats.services) services.push_back(id);
  GaSpace space{services, edges, {}, static_cast<std::size_t>(replica_limit(replica_quota, edges.size()))};
  for (auto s : services) {
    for (const auto& e : edges) space.weight.push_back(invocation_weight(*stats.find(s), e.id, edges.size()));
  }
  for (const auto& [key, p] : assignment.placements()) {
    if (!stats.find(key.first)) return -std::numeric_limits<double>::infinity();
  }
  return space.fitness(space.encode(assignment));
}

Assignment ga_offload(const std::vector<ServiceId>& services_in,
                      const std::vector<EdgeServer>& edges, const WindowStats& stats,
                      const GaParams& params, std::uint64_t seed, int replica_quota,
                      GaTrace* trace) {
  std::vector<ServiceId> services = services_in;
  std::sort(services.begin(), services.end());
  services.erase(std::unique(services.begin(), services.end()), services.end());
  if (services.empty() || edges.empty()) return {};
  if (params.population < 2 || params.tournament == 0) {
    throw ConfigError("baselines.ga", "population must be >= 2 and tournament >= 1");
  }

  GaSpace space{services, edges, {}, static_cast<std::size_t>(replica_limit(replica_quota, edges.size()))};
  for (auto s : services) {
    const auto* st = stats.find(s);
    for (const auto& e : edges) space.weight.push_back(st ? invocation_weight(*st, e.id, edges.size()) : 0.0);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Seed chromosome: the highest-frequency services, greedily filled.
  std::vector<Genome> population;
  population.push_back(space.encode(greedy_offload(services, edges, stats, replica_quota)));
  while (population.size() < params.population) {
    Assignment random = random_edge(services, edges, rng(), replica_quota);
    // Random fill levels keep the initial population diverse.
    Genome g = space.encode(random);
    for (auto& bit : g) {
      if (bit && unit(rng) < 0.5) bit = 0;
    }
    population.push_back(std::move(g));
  }

  std::vector<double> fitness(population.size());
  auto evaluate = [&] {
    for (std::size_t i = 0; i < population.size(); ++i) fitness[i] = space.fitness(population[i]);
  };
  auto best_index = [&] {
    return static_cast<std::size_t>(std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
  };
  evaluate();
  if (trace) trace->best_fitness.push_back(fitness[best_index()]);

  std::uniform_int_distribution<std::size_t> member(0, population.size() - 1);
  auto tournament = [&]() -> const Genome& {
    std::size_t winner = member(rng);
    for (std::size_t k = 1; k < params.tournament; ++k) {
      const std::size_t c = member(rng);
      if (fitness[c] > fitness[winner]) winner = c;
    }
    return population[winner];
  };

  const std::size_t genes = space.genes();
  std::uniform_int_distribution<std::size_t> cut(1, std::max<std::size_t>(genes, 2) - 1);
  for (std::size_t gen = 0; gen < params.generations; ++gen) {
    std::vector<Genome> next;
    next.push_back(population[best_index()]);
    while (next.size() < population.size()) {
      Genome a = tournament();
      Genome b = tournament();
      if (genes > 1) {
        const std::size_t point = cut(rng);
        std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(point), a.end(),
                         b.begin() + static_cast<std::ptrdiff_t>(point));
      }
      for (Genome* child : {&a, &b}) {
        for (auto& bit : *child) {
          if (unit(rng) < params.mutation_rate) bit = !bit;
        }
        if (next.size() < population.size()) next.push_back(std::move(*child));
      }
    }
    population = std::move(next);
    evaluate();
    if (trace) trace->best_fitness.push_back(fitness[best_index()]);
  }
  return space.decode(population[best_index()]);
}

double sa_acceptance(double delta, double temperature) {
  if (delta <= 0.0) return 1.0;
  if (!(temperature > 0.0)) return 0.0;
  return std::exp(-delta / temperature);
}

Assignment sa_offload(const PlacementInstance& instance, const SaParams& params,
                      std::uint64_t seed, SaTrace* trace) {
  if (!(params.cooling > 0.0 && params.cooling < 1.0)) {
    throw ConfigError("baselines.sa.cooling", "cooling must lie in (0,1)");
  }
  const auto& edges = instance.servers.edges;
  std::vector<ServiceId> services;
  for (const auto& d : instance.demands) services.push_back(d.service);
  std::sort(services.begin(), services.end());

  Assignment current;
  double current_cost = placement_objective(instance, current);
  Assignment best = current;
  double best_cost = current_cost;
  if (trace) trace->best_objective.push_back(best_cost);
  if (services.empty() || edges.empty()) return best;

  double temperature = params.initial_temperature.value_or(current_cost);
  if (!(temperature > 0.0)) temperature = 1.0;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_service(0, services.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_edge(0, edges.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t it = 0; it < params.iterations; ++it) {
    const ServiceId s = services[pick_service(rng)];
    const EdgeServer& e = edges[pick_edge(rng)];
    Assignment candidate = current;
    if (candidate.contains(s, e.id)) {
      candidate.remove(s, e.id);
    } else {
      if (candidate.hosted_count(e.id) >= static_cast<std::size_t>(std::max(e.service_quota, 0))) {
        const auto hosted = candidate.services_at(e.id);
        if (hosted.empty()) {
          temperature *= params.cooling;
          if (trace) trace->best_objective.push_back(best_cost);
          continue;
        }
        std::uniform_int_distribution<std::size_t> pick_hosted(0, hosted.size() - 1);
        candidate.remove(hosted[pick_hosted(rng)], e.id);
      }
      candidate.add(Placement{s, e.id});
    }

    if (check_placement(instance, candidate).empty()) {
      const double cost = placement_objective(instance, candidate);
      const double delta = cost - current_cost;
      if (delta <= 0.0 || unit(rng) < sa_acceptance(delta, temperature)) {
        if (delta > 0.0 && trace) ++trace->accepted_worse;
        current = std::move(candidate);
        current_cost = cost;
        if (current_cost < best_cost) {
          best = current;
          best_cost = current_cost;
        }
      }
    }
    temperature *= params.cooling;
    if (trace) trace->best_objective.push_back(best_cost);
  }
  return best;
}

Assignment matching_no_reuse(MatchingProblem problem, MatchingTrace* trace) {
  problem.options.reuse_aware = false;
  return whistle_match(problem, trace);
}

}  // namespace whistle
