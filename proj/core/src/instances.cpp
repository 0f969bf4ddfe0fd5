#include "whistle/instances.hpp"

#include <algorithm>
#include <random>

#include "whistle/simulator.hpp"
#include "whistle/trace.hpp"

namespace whistle {

namespace {

std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double draw_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

ServiceWindowStats random_stats(std::mt19937_64& rng) {
  ServiceWindowStats s;
  s.received_count = draw(rng, 1, 50);
  s.distinct_count = draw(rng, 1, s.received_count);
  s.mean_input_size = draw_real(rng, 1.0, 10.0);
  s.mean_complexity = draw_real(rng, 0.5, 2.0);
  if (draw(rng, 0, 1) == 1) {
    s.edge_executions = draw(rng, 1, s.received_count);
    s.reuse_hit_weight = draw_real(rng, 0.0, static_cast<double>(s.edge_executions));
  }
  return s;
}

EdgeServer random_edge_server(std::mt19937_64& rng, std::uint32_t id, int max_quota) {
  EdgeServer e;
  e.id = EdgeId{id};
  e.bandwidth = draw_real(rng, 20.0, 100.0);
  e.compute_capacity = draw_real(rng, 10.0, 50.0);
  e.service_quota = static_cast<int>(draw(rng, 1, static_cast<std::size_t>(std::max(max_quota, 1))));
  return e;
}

}  // namespace

MatchingProblem random_matching_problem(std::uint64_t seed, const MatchingShape& shape) {
  std::mt19937_64 rng(seed);
  MatchingProblem p;
  const std::size_t ns = draw(rng, 1, shape.max_services);
  const std::size_t ne = draw(rng, 1, shape.max_edges);
  for (std::size_t e = 0; e < ne; ++e) {
    p.edges.push_back(random_edge_server(rng, static_cast<std::uint32_t>(e), shape.max_quota));
  }
  for (std::size_t s = 0; s < ns; ++s) {
    const ServiceId id{static_cast<std::uint32_t>(s + 1)};
    p.stats.services[id] = random_stats(rng);
    p.services.push_back(*make_service(id, p.stats.services[id]));
    for (const auto& e : p.edges) {
      if (draw(rng, 0, 3) == 0) p.evicted.insert({id, e.id});
    }
  }
  p.replica_quota = static_cast<int>(draw(rng, 0, ne));
  return p;
}

void random_redirect_instance(std::uint64_t seed, RedirectInstance& out, const RedirectShape& shape) {
  std::mt19937_64 rng(seed);
  out.services.clear();
  out.stats = WindowStats{};
  out.requests.clear();
  out.neighbors.clear();

  const std::size_t ns = draw(rng, 1, shape.max_services);
  for (std::size_t s = 0; s < ns; ++s) {
    const ServiceId id{static_cast<std::uint32_t>(s + 1)};
    out.stats.services[id] = random_stats(rng);
    out.services.push_back(*make_service(id, out.stats.services[id]));
  }
  const std::size_t nn = draw(rng, 1, shape.max_neighbors);
  for (std::size_t n = 0; n < nn; ++n) {
    NeighborCandidate c;
    c.edge = random_edge_server(rng, static_cast<std::uint32_t>(n + 1), 3);
    c.path_bandwidth = draw_real(rng, 10.0, 100.0);
    c.free_slots = draw(rng, 0, shape.max_slots);
    for (const auto& s : out.services) {
      if (draw(rng, 0, 1) == 1) c.hosted.insert(s.id);
    }
    out.neighbors.push_back(std::move(c));
  }
  const std::size_t nt = draw(rng, 1, shape.max_tasks);
  for (std::size_t t = 0; t < nt; ++t) {
    const Service& s = out.services[draw(rng, 0, ns - 1)];
    out.requests.push_back({static_cast<TaskId>(t), s, out.stats.find(s.id)});
  }
  out.problem = make_redirect_problem(out.requests, out.neighbors);
}

MatchingProblem PlacementScenario::matching_problem() const {
  MatchingProblem p;
  p.services = services;
  p.edges = servers.edges;
  p.stats = stats;
  p.options.lookup = lookup;
  return p;
}

PlacementInstance PlacementScenario::placement_instance() const {
  return make_placement_instance(stats, servers, lookup);
}

PlacementScenario random_placement_scenario(std::uint64_t seed, const PlacementShape& shape) {
  std::mt19937_64 rng(seed);
  PlacementScenario out;
  const std::size_t ns = draw(rng, shape.min_services, shape.max_services);
  const std::size_t ne = draw(rng, shape.min_edges, shape.max_edges);

  TrialConfig config;
  config.range_policy = RangePolicy::Relaxed;
  for (std::size_t e = 0; e < ne; ++e) {
    EdgeSpec spec;
    spec.id = EdgeId{static_cast<std::uint32_t>(e)};
    spec.compute_capacity = draw_real(rng, 15.0, 40.0);
    spec.service_quota = static_cast<int>(draw(rng, 1, static_cast<std::size_t>(shape.max_quota)));
    config.edges.push_back(spec);
  }
  out.servers = make_infrastructure(config);

  SynthParams params;
  params.n_tasks = shape.tasks;
  params.n_services = ns;
  params.popularity.kind = PopularityKind::Zipf;
  params.popularity.zipf_exponent = shape.zipf_exponent;
  params.input_redundancy = draw_real(rng, 0.1, 0.8);
  params.seed = rng();
  out.stats.window_length = 0.0;
  for (Task t : synth_trace(params)) {
    t.origin_edge = assign_origin(t.id ^ params.seed, config.edges);
    record_arrival(out.stats, t);
    out.stats.window_length = t.arrival_time;
  }
  if (!(out.stats.window_length > 0.0)) out.stats.window_length = 1.0;
  for (const auto& [id, s] : out.stats.services) {
    if (auto service = make_service(id, s)) out.services.push_back(*service);
  }
  return out;
}

}  // namespace whistle
