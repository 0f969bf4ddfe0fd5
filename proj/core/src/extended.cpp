#include "whistle/extended.hpp"

#include <algorithm>
#include <numeric>

#include "whistle/errors.hpp"

namespace whistle {

const char* to_string(RouteKind kind) noexcept {
  switch (kind) {
    case RouteKind::LocalEdge: return "local";
    case RouteKind::NeighborEdge: return "neighbor";
    case RouteKind::Cloud: return "cloud";
  }
  return "?";
}

namespace {

std::optional<double> theta_prime(const RedirectRequest& request, const NeighborCandidate& n) {
  if (request.stats == nullptr || !n.hosted.contains(request.service.id)) return std::nullopt;
  return neighbor_service_utility(request.service, n.path_bandwidth, *request.stats);
}

std::optional<double> phi_prime(const RedirectRequest& request, const NeighborCandidate& n,
                                const UtilityOptions& options) {
  if (request.stats == nullptr || !n.hosted.contains(request.service.id)) return std::nullopt;
  return edge_utility(n.edge, request.service, *request.stats,
                      gain_scalar(request.service.gain, n.edge), options);
}

}  // namespace

NeighborRoute extended_match(const RedirectRequest& request, EdgeId local_edge,
                             bool local_hosts_service,
                             const std::vector<NeighborCandidate>& neighbors,
                             const UtilityOptions& options) {
  if (local_hosts_service) return {request.task, RouteKind::LocalEdge, local_edge};

  struct Ranked {
    double utility;
    std::size_t index;
  };
  std::vector<Ranked> ranked;
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    if (neighbors[i].edge.id == local_edge) continue;
    auto theta = theta_prime(request, neighbors[i]);
    if (theta && phi_prime(request, neighbors[i], options)) ranked.push_back({*theta, i});
  }
  std::sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    return neighbors[a.index].edge.id < neighbors[b.index].edge.id;
  });
  for (const auto& r : ranked) {
    if (neighbors[r.index].free_slots > 0) {
      return {request.task, RouteKind::NeighborEdge, neighbors[r.index].edge.id};
    }
  }
  return {request.task, RouteKind::Cloud, std::nullopt};
}

RedirectProblem make_redirect_problem(const std::vector<RedirectRequest>& requests,
                                      const std::vector<NeighborCandidate>& neighbors,
                                      const UtilityOptions& options) {
  RedirectProblem p;
  for (const auto& r : requests) {
    p.tasks.push_back(r.task);
    p.services.push_back(r.service.id);
  }
  for (const auto& n : neighbors) {
    p.neighbors.push_back(n.edge.id);
    p.capacity.push_back(n.free_slots);
  }
  p.task_utility.assign(requests.size(), std::vector<std::optional<double>>(neighbors.size()));
  p.edge_utility.assign(neighbors.size(), std::vector<std::optional<double>>(requests.size()));
  for (std::size_t t = 0; t < requests.size(); ++t) {
    for (std::size_t n = 0; n < neighbors.size(); ++n) {
      auto theta = theta_prime(requests[t], neighbors[n]);
      auto phi = phi_prime(requests[t], neighbors[n], options);
      if (theta && phi) {
        p.task_utility[t][n] = theta;
        p.edge_utility[n][t] = phi;
      }
    }
  }
  return p;
}

namespace {

void check_shape(const RedirectProblem& p) {
  const std::size_t nt = p.tasks.size();
  const std::size_t nn = p.neighbors.size();
  bool ok = p.services.size() == nt && p.capacity.size() == nn && p.task_utility.size() == nt &&
            p.edge_utility.size() == nn;
  for (const auto& row : p.task_utility) ok = ok && row.size() == nn;
  for (const auto& row : p.edge_utility) ok = ok && row.size() == nt;
  if (!ok) throw ContractError("RedirectProblem: inconsistent dimensions");
}

bool acceptable(const RedirectProblem& p, std::size_t t, std::size_t n) {
  return p.task_utility[t][n] && p.edge_utility[n][t];
}

/// True when neighbour n ranks task a above task b.
bool edge_prefers(const RedirectProblem& p, std::size_t n, std::size_t a, std::size_t b) {
  const double ua = *p.edge_utility[n][a];
  const double ub = *p.edge_utility[n][b];
  if (ua != ub) return ua > ub;
  return p.tasks[a] < p.tasks[b];
}

/// True when task t ranks neighbour a above neighbour b.
bool task_prefers(const RedirectProblem& p, std::size_t t, std::size_t a, std::size_t b) {
  const double ua = *p.task_utility[t][a];
  const double ub = *p.task_utility[t][b];
  if (ua != ub) return ua > ub;
  return p.neighbors[a] < p.neighbors[b];
}

}  // namespace

std::vector<NeighborRoute> extended_match_batch(const RedirectProblem& p) {
  check_shape(p);
  const std::size_t nt = p.tasks.size();
  const std::size_t nn = p.neighbors.size();

  std::vector<std::vector<std::size_t>> prefs(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t n = 0; n < nn; ++n) {
      if (acceptable(p, t, n)) prefs[t].push_back(n);
    }
    std::sort(prefs[t].begin(), prefs[t].end(),
              [&](std::size_t a, std::size_t b) { return task_prefers(p, t, a, b); });
  }

  std::vector<std::vector<std::size_t>> held(nn);
  std::vector<std::size_t> next(nt, 0);
  std::vector<std::size_t> free(nt);
  std::iota(free.begin(), free.end(), std::size_t{0});

  while (!free.empty()) {
    const std::size_t t = free.back();
    free.pop_back();
    while (next[t] < prefs[t].size()) {
      const std::size_t n = prefs[t][next[t]++];
      if (p.capacity[n] == 0) continue;
      auto& h = held[n];
      if (h.size() < p.capacity[n]) {
        h.push_back(t);
        break;
      }
      auto worst = std::min_element(h.begin(), h.end(), [&](std::size_t a, std::size_t b) {
        return edge_prefers(p, n, b, a);
      });
      if (edge_prefers(p, n, t, *worst)) {
        free.push_back(*worst);
        *worst = t;
        break;
      }
    }
  }

  std::vector<NeighborRoute> routes(nt);
  for (std::size_t t = 0; t < nt; ++t) routes[t] = {p.tasks[t], RouteKind::Cloud, std::nullopt};
  for (std::size_t n = 0; n < nn; ++n) {
    for (std::size_t t : held[n]) routes[t] = {p.tasks[t], RouteKind::NeighborEdge, p.neighbors[n]};
  }
  return routes;
}

std::optional<BlockingPair> find_blocking_pair(const std::vector<NeighborRoute>& routes,
                                               const RedirectProblem& p) {
  check_shape(p);
  const std::size_t nt = p.tasks.size();
  const std::size_t nn = p.neighbors.size();

  std::vector<std::optional<std::size_t>> match(nt);
  std::vector<std::vector<std::size_t>> held(nn);
  for (const auto& route : routes) {
    auto ti = std::find(p.tasks.begin(), p.tasks.end(), route.task);
    if (ti == p.tasks.end()) throw ContractError("find_blocking_pair: unknown task in routes");
    const auto t = static_cast<std::size_t>(ti - p.tasks.begin());
    if (route.kind != RouteKind::NeighborEdge) continue;
    auto ni = std::find(p.neighbors.begin(), p.neighbors.end(), *route.edge);
    if (ni == p.neighbors.end()) throw ContractError("find_blocking_pair: unknown neighbour");
    const auto n = static_cast<std::size_t>(ni - p.neighbors.begin());
    match[t] = n;
    held[n].push_back(t);
  }

  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t n = 0; n < nn; ++n) {
      if (!acceptable(p, t, n) || match[t] == n) continue;
      if (match[t] && !task_prefers(p, t, n, *match[t])) continue;
      bool edge_wants = held[n].size() < p.capacity[n];
      for (std::size_t other : held[n]) edge_wants = edge_wants || edge_prefers(p, n, t, other);
      if (edge_wants) return BlockingPair{p.tasks[t], p.services[t], p.neighbors[n]};
    }
  }
  return std::nullopt;
}

}  // namespace whistle
