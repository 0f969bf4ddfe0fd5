#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "whistle/assignment.hpp"
#include "whistle/baselines.hpp"
#include "whistle/cost_model.hpp"
#include "whistle/matching.hpp"
#include "whistle/reuse_table.hpp"
#include "whistle/trace.hpp"
#include "whistle/types.hpp"

namespace whistle {

struct NetworkConfig {
  double link_bandwidth{100.0};  // megabits/s per hop
  int hops_to_edge{1};
  int hops_to_cloud{7};
  double cloud_compute{10000.0};  // compute units/s
};

struct EdgeSpec {
  EdgeId id{};
  double compute_capacity{25.0};  // compute units/s
  int service_quota{8};
  std::vector<EdgeId> neighbors;
  double origin_weight{1.0};  // share of users attached to this edge
};

/// Strict checks the experimental ranges (hops, quotas, task counts, arrival
/// rates, redundancy); Relaxed only checks that values are well formed.
enum class RangePolicy { Strict, Relaxed };

struct TrialConfig {
  NetworkConfig network;
  std::vector<EdgeSpec> edges;
  SynthParams workload;
  std::optional<double> window_length;  // default: last arrival / 10
  double lookup_cost{0.001};            // seconds
  std::size_t reuse_capacity{2048};
  int replica_quota{0};  // 0 means |E|
  GainSign gain_sign{GainSign::Literal};
  std::size_t neighbor_queue_limit{4};
  Scheme scheme;
  GaParams ga;
  SaParams sa;
  std::uint64_t seed{1};
  RangePolicy range_policy{RangePolicy::Strict};
};

/// Throws ConfigError naming the first invalid field.
void validate(const TrialConfig& config);

/// Edge and cloud parameters as the cost model sees them: path bandwidth is
/// the link bandwidth divided by the hop count.
Infrastructure make_infrastructure(const TrialConfig& config);

/// Bandwidth of the local-edge-to-neighbour path (one extra hop).
double neighbor_path_bandwidth(const NetworkConfig& network);

enum class Location { Cloud, EdgeScratch, EdgeFullReuse, EdgePartialReuse };

const char* to_string(Location location) noexcept;

struct TaskRecord {
  TaskId task{};
  ServiceId service{};
  Location location{Location::Cloud};
  std::optional<EdgeId> edge;
  bool redirected{false};  // served by a neighbour of its origin edge
  std::optional<LookupKind> reuse_kind;  // empty at the cloud
  std::size_t window{0};
  double arrival{0.0};
  double start{0.0};
  double end{0.0};
  double communication{0.0};
  double computation{0.0};
  double queueing{0.0};
  double total{0.0};
  double input_size{0.0};
  double complexity{0.0};
  double executed_units{0.0};  // compute units spent, lookups at L * f^e
  double core_megabits{0.0};   // input carried over the core network
};

struct WindowRecord {
  std::size_t index{0};
  double start{0.0};
  std::vector<Assignment::Key> placements;
  std::vector<Assignment::Key> evictions;
};

struct ServerSeries {
  std::string server;                // "edge:<id>" or "cloud"
  std::vector<double> busy_seconds;  // per window
};

struct EdgeReuseSnapshot {
  EdgeId edge{};
  std::vector<ReuseEntry> entries;
};

struct SimResult {
  std::string scheme;
  std::uint64_t seed{0};
  std::size_t edge_count{0};
  double window_length{0.0};
  double makespan{0.0};
  std::vector<TaskRecord> tasks;  // in trace order
  std::vector<WindowRecord> windows;
  std::vector<ServerSeries> utilization;
  std::vector<EdgeReuseSnapshot> reuse_tables;
  Assignment final_assignment;
};

/// Runs one trace through the configured scheme. Window 0 sends everything to
/// the cloud; each later window boundary re-places services from the
/// previous window's statistics. Throws ConfigError for an invalid config and
/// ContractError for an unsorted trace.
SimResult run_trial(const TrialConfig& config, const std::vector<Task>& trace);

/// Origin edge for a task without one: a hash of the task id picks an edge
/// with probability proportional to its origin weight.
EdgeId assign_origin(TaskId task, const std::vector<EdgeSpec>& edges);

/// 1/(mu - lambda). Throws DomainError unless mu > lambda > 0.
double mm1_expected_sojourn(double lambda, double mu);

struct CalibrationResult {
  double measured_sojourn{0.0};
  double expected_sojourn{0.0};
  std::size_t tasks{0};
  double relative_error{0.0};
};

/// Single-server run with exponential inter-arrival and service times.
CalibrationResult run_mm1_calibration(double lambda, double mu, std::size_t n_tasks,
                                      std::uint64_t seed);

/// task_id,service,location,comm_s,comp_s,queue_s,total_s,reuse_kind
void write_task_csv(std::ostream& out, const SimResult& result);
/// window,scheme,placements,evictions
void write_window_csv(std::ostream& out, const SimResult& result);

}  // namespace whistle
