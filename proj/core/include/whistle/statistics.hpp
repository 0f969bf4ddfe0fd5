#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>

#include "whistle/types.hpp"

namespace whistle {

/// Sigmoid of the received-to-distinct input ratio of a service.
/// Throws DomainError unless received >= distinct >= 1.
double compute_granularity(std::size_t received_count, std::size_t distinct_count);

/// Sigmoid of the inverse granularity. Throws DomainError unless 0 < g < 1.
double compute_reusability(double granularity);

/// Reusability for a service never evicted from the edge in question,
/// its complement otherwise.
double compute_punishment(double reusability, bool evicted);

OffloadingGain compute_offloading_gain(double reusability, double mean_input_size,
                                       double mean_complexity);

/// Per-service aggregates for one tumbling window.
struct ServiceWindowStats {
  std::size_t received_count{0};
  std::size_t distinct_count{0};
  double mean_input_size{0.0};
  double mean_complexity{0.0};

  // Observed per-task costs (seconds). Each mean has its own sample count
  // because costs are only known once a task has been executed.
  double mean_comm_cost{0.0};
  double mean_comp_cost{0.0};
  double mean_reuse_cost{0.0};
  std::size_t comm_samples{0};
  std::size_t comp_samples{0};
  std::size_t reuse_samples{0};

  // Edge executions of this service and their overlap-weighted reuse hits.
  std::size_t edge_executions{0};
  double reuse_hit_weight{0.0};

  std::map<EdgeId, std::size_t> origin_counts;
  std::set<InputDescriptor> seen_inputs;

  /// Fraction of this window's tasks whose input had already been seen in
  /// the same window.
  double repeat_fraction() const noexcept;

  /// Overlap-weighted reuse hit rate over edge executions, if any happened.
  std::optional<double> observed_hit_rate() const noexcept;
};

/// Costs observed for one executed task. Computation is set for scratch
/// executions, reuse for lookups that hit (full or partial).
struct ObservedCosts {
  std::optional<double> communication;
  std::optional<double> computation;
  std::optional<double> reuse;
  bool at_edge{false};
  double reuse_overlap{0.0};  // 1 for a full hit, 0 for a miss
};

struct WindowStats {
  double window_start{0.0};
  double window_length{1.0};
  std::map<ServiceId, ServiceWindowStats> services;

  std::size_t total_received() const noexcept;
  const ServiceWindowStats* find(ServiceId id) const noexcept;
};

/// Counts a task arrival: received/distinct counts, input means, origin.
void record_arrival(WindowStats& stats, const Task& task);

/// Folds observed execution costs into the task's service running means.
void record_costs(WindowStats& stats, ServiceId service, const ObservedCosts& costs);

/// record_arrival followed by record_costs.
WindowStats update_window_stats(WindowStats stats, const Task& task,
                                const ObservedCosts& observed);

/// Builds the service tuple (granularity, reusability, punishment, gain) from
/// one window of observations. Returns nullopt when no task was observed.
std::optional<Service> make_service(ServiceId id, const ServiceWindowStats& stats,
                                    bool evicted = false);

/// Same service with punishment recomputed for a different eviction flag.
Service with_eviction(Service service, bool evicted);

}  // namespace whistle
