#include "whistle/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "whistle/errors.hpp"

namespace whistle {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void fold_mean(double& mean, std::size_t& samples, double value) {
  ++samples;
  mean += (value - mean) / static_cast<double>(samples);
}

}  // namespace

std::uint64_t fingerprint(const InputDescriptor& input) noexcept {
  std::uint64_t hash = 14695981039346656037ull;
  for (Digest item : input.items) {
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (item >> (8 * byte)) & 0xffu;
      hash *= 1099511628211ull;
    }
  }
  return hash;
}

double compute_granularity(std::size_t received_count, std::size_t distinct_count) {
  if (distinct_count == 0) {
    throw DomainError("granularity: distinct_count must be at least 1");
  }
  if (received_count < distinct_count) {
    throw DomainError("granularity: received_count (" + std::to_string(received_count) +
                      ") < distinct_count (" + std::to_string(distinct_count) + ")");
  }
  const double g =
      sigmoid(static_cast<double>(received_count) / static_cast<double>(distinct_count));
  // Ratios above ~37 round to exactly 1.0; keep the result inside (0, 1).
  return std::min(g, std::nextafter(1.0, 0.0));
}

double compute_reusability(double granularity) {
  if (!(granularity > 0.0 && granularity < 1.0)) {
    throw DomainError("reusability: granularity must lie in (0, 1)");
  }
  return sigmoid(1.0 / granularity);
}

double compute_punishment(double reusability, bool evicted) {
  if (!(reusability > 0.0 && reusability < 1.0)) {
    throw DomainError("punishment: reusability must lie in (0, 1)");
  }
  return evicted ? 1.0 - reusability : reusability;
}

OffloadingGain compute_offloading_gain(double reusability, double mean_input_size,
                                       double mean_complexity) {
  return {reusability * mean_input_size, reusability * mean_complexity};
}

double ServiceWindowStats::repeat_fraction() const noexcept {
  if (received_count == 0) return 0.0;
  return 1.0 - static_cast<double>(distinct_count) / static_cast<double>(received_count);
}

std::optional<double> ServiceWindowStats::observed_hit_rate() const noexcept {
  if (edge_executions == 0) return std::nullopt;
  return reuse_hit_weight / static_cast<double>(edge_executions);
}

std::size_t WindowStats::total_received() const noexcept {
  std::size_t total = 0;
  for (const auto& [id, s] : services) total += s.received_count;
  return total;
}

const ServiceWindowStats* WindowStats::find(ServiceId id) const noexcept {
  auto it = services.find(id);
  return it == services.end() ? nullptr : &it->second;
}

void record_arrival(WindowStats& stats, const Task& task) {
  ServiceWindowStats& s = stats.services[task.service];
  ++s.received_count;
  if (s.seen_inputs.insert(task.input).second) ++s.distinct_count;
  const double n = static_cast<double>(s.received_count);
  s.mean_input_size += (task.input_size - s.mean_input_size) / n;
  s.mean_complexity += (task.complexity - s.mean_complexity) / n;
  if (task.origin_edge) ++s.origin_counts[*task.origin_edge];
}

void record_costs(WindowStats& stats, ServiceId service, const ObservedCosts& costs) {
  ServiceWindowStats& s = stats.services[service];
  if (costs.communication) fold_mean(s.mean_comm_cost, s.comm_samples, *costs.communication);
  if (costs.computation) fold_mean(s.mean_comp_cost, s.comp_samples, *costs.computation);
  if (costs.reuse) fold_mean(s.mean_reuse_cost, s.reuse_samples, *costs.reuse);
  if (costs.at_edge) {
    ++s.edge_executions;
    s.reuse_hit_weight += costs.reuse_overlap;
  }
}

WindowStats update_window_stats(WindowStats stats, const Task& task,
                                const ObservedCosts& observed) {
  record_arrival(stats, task);
  record_costs(stats, task.service, observed);
  return stats;
}

std::optional<Service> make_service(ServiceId id, const ServiceWindowStats& stats,
                                    bool evicted) {
  if (stats.received_count == 0 || stats.distinct_count == 0) return std::nullopt;
  Service service;
  service.id = id;
  service.granularity = compute_granularity(stats.received_count, stats.distinct_count);
  service.reusability = compute_reusability(service.granularity);
  service.evicted = evicted;
  service.punishment = compute_punishment(service.reusability, evicted);
  service.gain = compute_offloading_gain(service.reusability, stats.mean_input_size,
                                         stats.mean_complexity);
  return service;
}

Service with_eviction(Service service, bool evicted) {
  service.evicted = evicted;
  service.punishment = compute_punishment(service.reusability, evicted);
  return service;
}

}  // namespace whistle
