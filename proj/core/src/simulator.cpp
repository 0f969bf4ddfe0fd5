#include "whistle/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "whistle/errors.hpp"
#include "whistle/event_queue.hpp"
#include "whistle/extended.hpp"
#include "whistle/placement.hpp"
#include "whistle/statistics.hpp"

namespace whistle {

namespace {

std::string edge_field(std::size_t i, const char* name) {
  return "edges[" + std::to_string(i) + "]." + name;
}

void require_range(double value, double lo, double hi, const std::string& field) {
  if (value < lo || value > hi) {
    std::ostringstream msg;
    msg << "value " << value << " outside [" << lo << ", " << hi << "]";
    throw ConfigError(field, msg.str());
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void validate(const TrialConfig& c) {
  const auto& n = c.network;
  if (!(n.link_bandwidth > 0.0)) throw ConfigError("network.link_bandwidth_mbps", "must be positive");
  if (n.hops_to_edge < 1) throw ConfigError("network.hops_to_edge", "must be at least 1");
  if (n.hops_to_cloud < 1) throw ConfigError("network.hops_to_cloud", "must be at least 1");
  if (!(n.cloud_compute > 0.0)) throw ConfigError("network.cloud_compute", "must be positive");
  if (c.edges.empty() && c.scheme.kind != SchemeKind::CloudOnly) {
    throw ConfigError("edges", "scheme '" + c.scheme.name() + "' needs at least one edge");
  }
  if (c.scheme.kind == SchemeKind::CloudOnly && c.scheme.reuse_enabled) {
    throw ConfigError("schemes", "cloud scheme cannot enable reuse");
  }

  std::set<EdgeId> ids;
  double weight = 0.0;
  for (std::size_t i = 0; i < c.edges.size(); ++i) {
    const auto& e = c.edges[i];
    if (!ids.insert(e.id).second) throw ConfigError(edge_field(i, "id"), "duplicate edge id");
    if (!(e.compute_capacity > 0.0)) throw ConfigError(edge_field(i, "compute_capacity"), "must be positive");
    if (e.compute_capacity > n.cloud_compute) {
      throw ConfigError(edge_field(i, "compute_capacity"), "exceeds the cloud compute capacity");
    }
    if (e.service_quota < 1) throw ConfigError(edge_field(i, "quota"), "must be at least 1");
    if (!(e.origin_weight >= 0.0) || !std::isfinite(e.origin_weight)) {
      throw ConfigError(edge_field(i, "origin_weight"), "must be finite and >= 0");
    }
    weight += e.origin_weight;
  }
  for (std::size_t i = 0; i < c.edges.size(); ++i) {
    for (auto nb : c.edges[i].neighbors) {
      if (nb == c.edges[i].id) throw ConfigError(edge_field(i, "neighbors"), "edge lists itself");
      if (!ids.contains(nb)) throw ConfigError(edge_field(i, "neighbors"), "unknown neighbour id");
    }
  }
  if (!c.edges.empty() && !(weight > 0.0)) throw ConfigError("edges", "origin weights sum to zero");
  if (c.window_length && !(*c.window_length > 0.0)) throw ConfigError("simulation.window_s", "must be positive");
  if (!(c.lookup_cost >= 0.0)) throw ConfigError("simulation.lookup_cost_s", "must be >= 0");
  if (c.reuse_capacity == 0) throw ConfigError("simulation.reuse_capacity", "must be at least 1");
  if (c.replica_quota < 0) throw ConfigError("simulation.replica_quota", "must be >= 0");
  if (c.neighbor_queue_limit == 0) throw ConfigError("simulation.neighbor_queue_limit", "must be at least 1");
  validate(c.workload);

  if (c.range_policy == RangePolicy::Strict) {
    require_range(n.hops_to_edge, 1, 1, "network.hops_to_edge");
    require_range(n.hops_to_cloud, 5, 10, "network.hops_to_cloud");
    for (std::size_t i = 0; i < c.edges.size(); ++i) {
      require_range(c.edges[i].service_quota, 6, 10, edge_field(i, "quota"));
    }
    require_range(static_cast<double>(c.workload.n_tasks), 1000, 10000, "workload.n_tasks");
    require_range(c.workload.arrival_rate, 10, 50, "workload.arrival_rate");
    require_range(c.workload.input_redundancy, 0.10, 0.80, "workload.redundancy");
  }
}

Infrastructure make_infrastructure(const TrialConfig& c) {
  Infrastructure infra;
  infra.cloud.compute_capacity = c.network.cloud_compute;
  infra.cloud.bandwidth = c.network.link_bandwidth / c.network.hops_to_cloud;
  for (const auto& e : c.edges) {
    EdgeServer server;
    server.id = e.id;
    server.compute_capacity = e.compute_capacity;
    server.bandwidth = c.network.link_bandwidth / c.network.hops_to_edge;
    server.service_quota = e.service_quota;
    server.neighbors = e.neighbors;
    infra.edges.push_back(std::move(server));
  }
  return infra;
}

double neighbor_path_bandwidth(const NetworkConfig& network) {
  return network.link_bandwidth / (network.hops_to_edge + 1);
}

const char* to_string(Location location) noexcept {
  switch (location) {
    case Location::Cloud: return "cloud";
    case Location::EdgeScratch: return "edge-scratch";
    case Location::EdgeFullReuse: return "edge-full-reuse";
    case Location::EdgePartialReuse: return "edge-partial-reuse";
  }
  return "?";
}

EdgeId assign_origin(TaskId task, const std::vector<EdgeSpec>& edges) {
  if (edges.empty()) throw ContractError("assign_origin: no edges");
  const double total = std::accumulate(edges.begin(), edges.end(), 0.0,
                                       [](double acc, const EdgeSpec& e) { return acc + e.origin_weight; });
  const double u = static_cast<double>(splitmix64(task) >> 11) * 0x1.0p-53 * total;
  double acc = 0.0;
  for (const auto& e : edges) {
    acc += e.origin_weight;
    if (u < acc) return e.id;
  }
  for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
    if (it->origin_weight > 0.0) return it->id;
  }
  return edges.back().id;
}

namespace {

struct Pending {
  RoutingDecision decision;
  std::size_t server{0};
  bool redirected{false};
  double path_bandwidth{0.0};
  double server_arrival{0.0};
};

class Simulation {
 public:
  Simulation(const TrialConfig& config, const std::vector<Task>& trace)
      : config_(config), trace_(trace), infra_(make_infrastructure(config)) {
    const std::size_t ne = config.edges.size();
    for (std::size_t i = 0; i < ne; ++i) edge_index_[config.edges[i].id] = i;
    queues_.resize(ne + 1);
    tables_.reserve(ne);
    for (std::size_t i = 0; i < ne; ++i) tables_.emplace_back(config.reuse_capacity);
    pending_.resize(trace.size());
    result_.tasks.resize(trace.size());

    const double last = trace.empty() ? 0.0 : trace.back().arrival_time;
    tau_ = config.window_length.value_or(last / 10.0);
    if (!(tau_ > 0.0)) tau_ = 1.0;
    result_.scheme = config.scheme.name();
    result_.seed = config.seed;
    result_.edge_count = ne;
    result_.window_length = tau_;
    stats_.window_start = 0.0;
    stats_.window_length = tau_;
  }

  SimResult run() {
    result_.windows.push_back({0, 0.0, {}, {}});
    for (std::size_t i = 0; i < trace_.size(); ++i) {
      events_.push({trace_[i].arrival_time, EventKind::TaskArrival, i, 0});
    }
    if (!trace_.empty()) {
      for (std::size_t k = 1; static_cast<double>(k) * tau_ <= trace_.back().arrival_time; ++k) {
        events_.push({static_cast<double>(k) * tau_, EventKind::WindowBoundary, k, 0});
      }
    }
    while (!events_.empty()) {
      const Event e = events_.pop();
      now_ = e.time;
      switch (e.kind) {
        case EventKind::WindowBoundary: on_window(e.id); break;
        case EventKind::TaskArrival: on_arrival(e.id); break;
        case EventKind::ServerArrival: on_server_arrival(e.id, e.server); break;
        case EventKind::ServiceStart: on_start(e.id, e.server); break;
        case EventKind::ServiceEnd: on_end(e.id, e.server); break;
      }
    }
    finish();
    return std::move(result_);
  }

 private:
  std::size_t cloud_index() const { return config_.edges.size(); }
  bool reuse_on() const { return config_.scheme.reuse_enabled; }

  UtilityOptions utility_options(bool reuse_aware) const {
    UtilityOptions o;
    o.lookup = LookupCost{config_.lookup_cost};
    o.gain_sign = config_.gain_sign;
    o.reuse_aware = reuse_aware;
    return o;
  }

  std::vector<Service> observed_services(const WindowStats& stats) const {
    std::vector<Service> out;
    for (const auto& [id, s] : stats.services) {
      if (auto service = make_service(id, s, false)) out.push_back(*service);
    }
    return out;
  }

  Assignment place(const WindowStats& stats, std::size_t window) {
    const std::uint64_t seed = splitmix64(config_.seed ^ splitmix64(window));
    std::vector<ServiceId> ids;
    for (const auto& [id, s] : stats.services) {
      if (s.received_count > 0) ids.push_back(id);
    }
    MatchingProblem problem;
    switch (config_.scheme.kind) {
      case SchemeKind::CloudOnly:
        return cloud_only();
      case SchemeKind::RandomEdge:
        return random_edge(ids, infra_.edges, seed, config_.replica_quota);
      case SchemeKind::Greedy:
        return greedy_offload(ids, infra_.edges, stats, config_.replica_quota);
      case SchemeKind::GeneticAlgorithm:
        return ga_offload(ids, infra_.edges, stats, config_.ga, seed, config_.replica_quota);
      case SchemeKind::SimulatedAnnealing:
        return sa_offload(make_placement_instance(stats, infra_, LookupCost{config_.lookup_cost},
                                                  config_.replica_quota),
                          config_.sa, seed);
      case SchemeKind::MatchingNoReuse:
      case SchemeKind::Whistle:
      case SchemeKind::ExtendedWhistle:
        problem.services = observed_services(stats);
        problem.edges = infra_.edges;
        problem.stats = stats;
        problem.evicted = evicted_;
        problem.options = utility_options(config_.scheme.kind != SchemeKind::MatchingNoReuse);
        problem.replica_quota = config_.replica_quota;
        return whistle_match(problem);
    }
    return {};
  }

  void on_window(std::size_t k) {
    previous_stats_ = std::move(stats_);
    stats_ = WindowStats{};
    stats_.window_start = static_cast<double>(k) * tau_;
    stats_.window_length = tau_;

    Assignment next = place(previous_stats_, k);
    // A pair hosted through the whole previous window has served its
    // punishment; pairs dropped now are flagged.
    for (const auto& key : current_.keys()) evicted_.erase(key);
    auto evictions = evict_services(current_, next);
    for (const auto& key : evictions) evicted_.insert(key);
    current_ = std::move(next);
    window_ = k;
    result_.windows.push_back({k, stats_.window_start, current_.keys(), std::move(evictions)});
    for (auto& table : tables_) table.reset_window_counters();
  }

  void route_to(std::size_t task, std::size_t server, RoutingDecision decision, bool redirected,
                double bandwidth) {
    Pending& p = pending_[task];
    p.decision = decision;
    p.server = server;
    p.redirected = redirected;
    p.path_bandwidth = bandwidth;
    ++queues_[server].outstanding;
    const double comm =
        communication_cost(trace_[task], decision, bandwidth, infra_.cloud.bandwidth);
    p.server_arrival = now_ + comm;
    result_.tasks[task].communication = comm;
    events_.push({p.server_arrival, EventKind::ServerArrival, task, server});
  }

  void on_arrival(std::size_t i) {
    Task task = trace_[i];
    const bool has_edges = !config_.edges.empty();
    if (has_edges && (!task.origin_edge || !edge_index_.contains(*task.origin_edge))) {
      task.origin_edge = assign_origin(task.id, config_.edges);
    }
    record_arrival(stats_, task);
    TaskRecord& rec = result_.tasks[i];
    rec.task = task.id;
    rec.service = task.service;
    rec.arrival = task.arrival_time;
    rec.window = window_;
    rec.input_size = task.input_size;
    rec.complexity = task.complexity;

    const bool placing = window_ > 0 && config_.scheme.kind != SchemeKind::CloudOnly && has_edges;
    if (placing && current_.contains(task.service, *task.origin_edge)) {
      const std::size_t e = edge_index_.at(*task.origin_edge);
      route_to(i, e, RoutingDecision::edge_scratch(*task.origin_edge, task), false,
               infra_.edges[e].bandwidth);
      return;
    }
    if (placing && config_.scheme.kind == SchemeKind::ExtendedWhistle) {
      if (auto route = redirect(task)) {
        const std::size_t e = edge_index_.at(*route->edge);
        route_to(i, e, RoutingDecision::edge_scratch(*route->edge, task), true,
                 neighbor_path_bandwidth(config_.network));
        return;
      }
    }
    route_to(i, cloud_index(), RoutingDecision::cloud(task), false, infra_.cloud.bandwidth);
  }

  std::optional<NeighborRoute> redirect(const Task& task) {
    const ServiceWindowStats* stats = previous_stats_.find(task.service);
    if (stats == nullptr) return std::nullopt;
    auto service = make_service(task.service, *stats, false);
    if (!service) return std::nullopt;

    const EdgeServer& local = infra_.edges[edge_index_.at(*task.origin_edge)];
    std::vector<NeighborCandidate> candidates;
    for (auto nb : local.neighbors) {
      const std::size_t j = edge_index_.at(nb);
      NeighborCandidate c;
      c.edge = infra_.edges[j];
      c.path_bandwidth = neighbor_path_bandwidth(config_.network);
      const std::size_t load = queues_[j].outstanding;
      c.free_slots = load < config_.neighbor_queue_limit ? config_.neighbor_queue_limit - load : 0;
      for (auto s : current_.services_at(nb)) c.hosted.insert(s);
      candidates.push_back(std::move(c));
    }
    RedirectRequest request{task.id, *service, stats};
    auto route = extended_match(request, local.id, false, candidates, utility_options(true));
    if (route.kind != RouteKind::NeighborEdge) return std::nullopt;
    return route;
  }

  void on_server_arrival(std::size_t task, std::size_t server) {
    ServerQueue& q = queues_[server];
    q.backlog.push_back(task);
    if (!q.busy) {
      q.busy = true;
      events_.push({now_, EventKind::ServiceStart, q.backlog.front(), server});
    }
  }

  void on_start(std::size_t i, std::size_t server) {
    ServerQueue& q = queues_[server];
    q.backlog.pop_front();
    const Task& task = trace_[i];
    Pending& p = pending_[i];
    TaskRecord& rec = result_.tasks[i];
    rec.start = now_;
    rec.queueing = now_ - p.server_arrival;

    if (server == cloud_index()) {
      rec.location = Location::Cloud;
      rec.computation = computation_cost(task, p.decision, infra_.cloud.compute_capacity,
                                         infra_.cloud.compute_capacity);
      rec.executed_units = task.complexity;
      rec.core_megabits = task.input_size;
    } else {
      const EdgeServer& edge = infra_.edges[server];
      rec.edge = edge.id;
      rec.redirected = p.redirected;
      LookupOutcome outcome;
      if (reuse_on()) outcome = tables_[server].lookup(task.service, task.input, task.complexity);
      const LookupCost lookup{config_.lookup_cost};
      switch (outcome.kind) {
        case LookupKind::Full:
          p.decision = RoutingDecision::edge_full_reuse(edge.id);
          rec.location = Location::EdgeFullReuse;
          rec.computation = reuse_execution_cost(p.decision, lookup, edge.compute_capacity);
          rec.executed_units = lookup.value * edge.compute_capacity;
          break;
        case LookupKind::Partial:
          p.decision = RoutingDecision::edge_partial_reuse(edge.id, outcome.residual_complexity);
          rec.location = Location::EdgePartialReuse;
          rec.computation = reuse_execution_cost(p.decision, lookup, edge.compute_capacity);
          rec.executed_units = lookup.value * edge.compute_capacity + outcome.residual_complexity;
          break;
        case LookupKind::Miss:
          rec.location = Location::EdgeScratch;
          rec.computation = computation_cost(task, p.decision, edge.compute_capacity,
                                             infra_.cloud.compute_capacity);
          rec.executed_units = task.complexity;
          break;
      }
      if (reuse_on()) rec.reuse_kind = outcome.kind;
      reuse_overlap_[i] = outcome.kind == LookupKind::Miss ? 0.0 : outcome.overlap;
    }
    events_.push({now_ + rec.computation, EventKind::ServiceEnd, i, server});
  }

  void on_end(std::size_t i, std::size_t server) {
    ServerQueue& q = queues_[server];
    const Task& task = trace_[i];
    TaskRecord& rec = result_.tasks[i];
    rec.end = now_;
    rec.total = rec.communication + rec.queueing + rec.computation;
    add_busy(server, rec.start, rec.end);
    --q.outstanding;

    ObservedCosts observed;
    observed.communication = rec.communication;
    if (server != cloud_index()) {
      observed.at_edge = true;
      observed.reuse_overlap = reuse_overlap_[i];
      if (rec.location == Location::EdgeScratch) {
        observed.computation = rec.computation;
      } else {
        observed.reuse = rec.computation;
      }
      // Full hits are already stored; misses and partial hits add their own
      // input unless an earlier copy finished first.
      if (reuse_on() && rec.location != Location::EdgeFullReuse &&
          !tables_[server].contains(task.service, task.input)) {
        tables_[server].insert(ReuseEntry{task.input, task.service, task.output_size,
                                          task.complexity, 1, now_});
      }
    } else {
      observed.computation = rec.computation;
    }
    record_costs(stats_, task.service, observed);

    if (q.backlog.empty()) {
      q.busy = false;
    } else {
      events_.push({now_, EventKind::ServiceStart, q.backlog.front(), server});
    }
  }

  void add_busy(std::size_t server, double start, double end) {
    queues_[server].busy_time += end - start;
    auto& series = busy_[server];
    double t = start;
    while (end > t) {
      const auto w = static_cast<std::size_t>(std::floor(t / tau_));
      const double boundary = static_cast<double>(w + 1) * tau_;
      const double stop = std::min(end, boundary);
      if (series.size() <= w) series.resize(w + 1, 0.0);
      series[w] += stop - t;
      if (stop <= t) break;
      t = stop;
    }
  }

  void finish() {
    double makespan = 0.0;
    for (const auto& r : result_.tasks) makespan = std::max(makespan, r.end);
    result_.makespan = makespan;
    std::size_t windows = result_.windows.size();
    for (const auto& [server, series] : busy_) windows = std::max(windows, series.size());
    for (std::size_t s = 0; s < queues_.size(); ++s) {
      ServerSeries series;
      series.server = s == cloud_index() ? "cloud" : "edge:" + std::to_string(config_.edges[s].id.value);
      series.busy_seconds = busy_[s];
      series.busy_seconds.resize(windows, 0.0);
      result_.utilization.push_back(std::move(series));
    }
    for (std::size_t e = 0; e < tables_.size(); ++e) {
      result_.reuse_tables.push_back({config_.edges[e].id, tables_[e].snapshot()});
    }
    result_.final_assignment = current_;
  }

  const TrialConfig& config_;
  const std::vector<Task>& trace_;
  Infrastructure infra_;
  std::map<EdgeId, std::size_t> edge_index_;
  std::vector<ServerQueue> queues_;
  std::vector<ReuseTable> tables_;
  std::vector<Pending> pending_;
  std::map<std::size_t, double> reuse_overlap_;
  std::map<std::size_t, std::vector<double>> busy_;
  EventQueue events_;
  double now_{0.0};
  double tau_{1.0};
  std::size_t window_{0};
  WindowStats stats_;
  WindowStats previous_stats_;
  Assignment current_;
  EvictionSet evicted_;
  SimResult result_;
};

}  // namespace

SimResult run_trial(const TrialConfig& config, const std::vector<Task>& trace) {
  validate(config);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].arrival_time < trace[i - 1].arrival_time) {
      throw ContractError("run_trial: trace not sorted by arrival time at index " + std::to_string(i));
    }
  }
  return Simulation(config, trace).run();
}

double mm1_expected_sojourn(double lambda, double mu) {
  if (!(lambda > 0.0) || !(mu > lambda)) {
    throw DomainError("mm1_expected_sojourn: requires mu > lambda > 0");
  }
  return 1.0 / (mu - lambda);
}

CalibrationResult run_mm1_calibration(double lambda, double mu, std::size_t n_tasks,
                                      std::uint64_t seed) {
  CalibrationResult out;
  out.expected_sojourn = mm1_expected_sojourn(lambda, mu);
  out.tasks = n_tasks;
  if (n_tasks == 0) return out;

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(lambda);
  std::exponential_distribution<double> work(mu);
  std::vector<double> arrival(n_tasks);
  std::vector<double> service(n_tasks);
  double clock = 0.0;
  for (std::size_t i = 0; i < n_tasks; ++i) {
    clock += gap(rng);
    arrival[i] = clock;
    service[i] = work(rng);
  }

  EventQueue events;
  ServerQueue server;
  for (std::size_t i = 0; i < n_tasks; ++i) events.push({arrival[i], EventKind::ServerArrival, i, 0});
  double sojourn_total = 0.0;
  while (!events.empty()) {
    const Event e = events.pop();
    switch (e.kind) {
      case EventKind::ServerArrival:
        server.backlog.push_back(e.id);
        if (!server.busy) {
          server.busy = true;
          events.push({e.time, EventKind::ServiceStart, server.backlog.front(), 0});
        }
        break;
      case EventKind::ServiceStart:
        server.backlog.pop_front();
        events.push({e.time + service[e.id], EventKind::ServiceEnd, e.id, 0});
        break;
      case EventKind::ServiceEnd:
        sojourn_total += e.time - arrival[e.id];
        server.busy_time += service[e.id];
        if (server.backlog.empty()) {
          server.busy = false;
        } else {
          events.push({e.time, EventKind::ServiceStart, server.backlog.front(), 0});
        }
        break;
      default:
        break;
    }
  }
  out.measured_sojourn = sojourn_total / static_cast<double>(n_tasks);
  out.relative_error = std::abs(out.measured_sojourn - out.expected_sojourn) / out.expected_sojourn;
  return out;
}

namespace {

std::string fixed6(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << v;
  return s.str();
}

}  // namespace

void write_task_csv(std::ostream& out, const SimResult& result) {
  out << "task_id,service,location,comm_s,comp_s,queue_s,total_s,reuse_kind\n";
  for (const auto& r : result.tasks) {
    out << r.task << ',' << r.service.value << ',' << to_string(r.location) << ','
        << fixed6(r.communication) << ',' << fixed6(r.computation) << ',' << fixed6(r.queueing)
        << ',' << fixed6(r.total) << ',' << (r.reuse_kind ? to_string(*r.reuse_kind) : "none")
        << '\n';
  }
}

void write_window_csv(std::ostream& out, const SimResult& result) {
  out << "window,scheme,placements,evictions\n";
  for (const auto& w : result.windows) {
    out << w.index << ',' << result.scheme << ',' << format_pairs(w.placements) << ','
        << format_pairs(w.evictions) << '\n';
  }
}

}  // namespace whistle
