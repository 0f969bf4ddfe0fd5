#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "whistle/simulator.hpp"

namespace whistle {

/// Pooled metrics of one scheme over its trials. Reductions compare against
/// sending every task of the same traces to the cloud: all input crosses the
/// core network and every task runs its full complexity.
struct MetricsReport {
  std::string scheme;
  std::size_t trials{0};
  std::size_t tasks{0};
  double completion_mean{0.0};
  double completion_p90{0.0};
  double computation_mean{0.0};  // queueing plus execution
  double resource_utilization{0.0};
  double load_cloud{0.0};
  double load_edge_scratch{0.0};
  double load_edge_reuse{0.0};
  double comm_reduction{0.0};
  double comp_reduction{0.0};

  bool operator==(const MetricsReport&) const = default;
};

/// Nearest-rank percentile: element ceil(q * n) - 1 of the sorted samples
/// (clamped to the first element). Throws ContractError on empty input or q
/// outside (0,1].
double nearest_rank_percentile(std::vector<double> samples, double q);

/// Pools the trials of one scheme. Throws ContractError on an empty list or
/// results from different schemes. Independent of result order.
MetricsReport aggregate(const std::vector<SimResult>& results);

enum class ReportFormat { Csv, Json };

/// Fixed column order, reals rounded to 6 decimals.
void write_report(std::ostream& out, const std::vector<MetricsReport>& reports, ReportFormat format);
/// Throws std::runtime_error naming the path on I/O failure.
void write_report(const std::filesystem::path& path, const std::vector<MetricsReport>& reports,
                  ReportFormat format);

std::vector<MetricsReport> read_report(std::istream& in, ReportFormat format);

/// Header of the CSV report.
inline constexpr const char* kReportHeader =
    "scheme,trials,tasks,completion_mean_s,completion_p90_s,computation_mean_s,"
    "resource_utilization,load_cloud,load_edge_scratch,load_edge_reuse,comm_reduction,"
    "comp_reduction";

}  // namespace whistle
