#include "whistle/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "whistle/errors.hpp"

namespace whistle {

double nearest_rank_percentile(std::vector<double> samples, double q) {
  if (samples.empty()) throw ContractError("percentile of an empty sample");
  if (!(q > 0.0 && q <= 1.0)) throw ContractError("percentile rank must lie in (0,1]");
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
  return samples[std::max<std::size_t>(rank, 1) - 1];
}

namespace {

/// Sum in sorted order, so the result depends only on the multiset.
double stable_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0);
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

MetricsReport aggregate(const std::vector<SimResult>& results) {
  if (results.empty()) throw ContractError("aggregate: no results");
  for (const auto& r : results) {
    if (r.scheme != results.front().scheme) {
      throw ContractError("aggregate: results mix schemes '" + results.front().scheme + "' and '" +
                          r.scheme + "'");
    }
  }

  MetricsReport m;
  m.scheme = results.front().scheme;
  m.trials = results.size();

  std::vector<double> total, computation, input, complexity, core, executed, busy, capacity;
  std::size_t cloud = 0, scratch = 0, reuse = 0;
  for (const auto& r : results) {
    for (const auto& t : r.tasks) {
      total.push_back(t.total);
      computation.push_back(t.computation + t.queueing);
      input.push_back(t.input_size);
      complexity.push_back(t.complexity);
      core.push_back(t.core_megabits);
      executed.push_back(t.executed_units);
      switch (t.location) {
        case Location::Cloud: ++cloud; break;
        case Location::EdgeScratch: ++scratch; break;
        case Location::EdgeFullReuse:
        case Location::EdgePartialReuse: ++reuse; break;
      }
    }
    for (const auto& series : r.utilization) {
      if (series.server == "cloud") continue;
      busy.push_back(stable_sum(series.busy_seconds));
    }
    capacity.push_back(static_cast<double>(r.edge_count) * r.makespan);
  }

  m.tasks = total.size();
  if (m.tasks == 0) return m;
  const double n = static_cast<double>(m.tasks);
  m.completion_mean = stable_sum(total) / n;
  m.completion_p90 = nearest_rank_percentile(total, 0.9);
  m.computation_mean = stable_sum(computation) / n;
  m.resource_utilization = ratio(stable_sum(busy), stable_sum(capacity));
  m.load_cloud = static_cast<double>(cloud) / n;
  m.load_edge_scratch = static_cast<double>(scratch) / n;
  m.load_edge_reuse = static_cast<double>(reuse) / n;
  m.comm_reduction = 1.0 - ratio(stable_sum(core), stable_sum(input));
  m.comp_reduction = 1.0 - ratio(stable_sum(executed), stable_sum(complexity));
  return m;
}

namespace {

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::string fixed6(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << round6(v);
  return s.str();
}

}  // namespace

void write_report(std::ostream& out, const std::vector<MetricsReport>& reports, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    out << kReportHeader << '\n';
    for (const auto& m : reports) {
      out << m.scheme << ',' << m.trials << ',' << m.tasks << ',' << fixed6(m.completion_mean) << ','
          << fixed6(m.completion_p90) << ',' << fixed6(m.computation_mean) << ','
          << fixed6(m.resource_utilization) << ',' << fixed6(m.load_cloud) << ','
          << fixed6(m.load_edge_scratch) << ',' << fixed6(m.load_edge_reuse) << ','
          << fixed6(m.comm_reduction) << ',' << fixed6(m.comp_reduction) << '\n';
    }
    return;
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& m : reports) {
    doc.push_back({{"scheme", m.scheme},
                   {"trials", m.trials},
                   {"tasks", m.tasks},
                   {"completion_mean_s", round6(m.completion_mean)},
                   {"completion_p90_s", round6(m.completion_p90)},
                   {"computation_mean_s", round6(m.computation_mean)},
                   {"resource_utilization", round6(m.resource_utilization)},
                   {"load_cloud", round6(m.load_cloud)},
                   {"load_edge_scratch", round6(m.load_edge_scratch)},
                   {"load_edge_reuse", round6(m.load_edge_reuse)},
                   {"comm_reduction", round6(m.comm_reduction)},
                   {"comp_reduction", round6(m.comp_reduction)}});
  }
  out << doc.dump(2) << '\n';
}

void write_report(const std::filesystem::path& path, const std::vector<MetricsReport>& reports,
                  ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report " + path.string());
  write_report(out, reports, format);
  if (!out) throw std::runtime_error("write error in report " + path.string());
}

std::vector<MetricsReport> read_report(std::istream& in, ReportFormat format) {
  std::vector<MetricsReport> out;
  if (format == ReportFormat::Json) {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& row : doc) {
      MetricsReport m;
      m.scheme = row.at("scheme").get<std::string>();
      m.trials = row.at("trials").get<std::size_t>();
      m.tasks = row.at("tasks").get<std::size_t>();
      m.completion_mean = row.at("completion_mean_s").get<double>();
      m.completion_p90 = row.at("completion_p90_s").get<double>();
      m.computation_mean = row.at("computation_mean_s").get<double>();
      m.resource_utilization = row.at("resource_utilization").get<double>();
      m.load_cloud = row.at("load_cloud").get<double>();
      m.load_edge_scratch = row.at("load_edge_scratch").get<double>();
      m.load_edge_reuse = row.at("load_edge_reuse").get<double>();
      m.comm_reduction = row.at("comm_reduction").get<double>();
      m.comp_reduction = row.at("comp_reduction").get<double>();
      out.push_back(std::move(m));
    }
    return out;
  }
  std::string line;
  std::size_t number = 1;
  if (!std::getline(in, line) || line != kReportHeader) throw ParseError(1, "unexpected report header");
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<std::string> f;
    for (std::string cell; std::getline(row, cell, ',');) f.push_back(cell);
    if (f.size() != 12) throw ParseError(number, "expected 12 columns");
    try {
      MetricsReport m;
      m.scheme = f[0];
      m.trials = std::stoul(f[1]);
      m.tasks = std::stoul(f[2]);
      double* fields[] = {&m.completion_mean, &m.completion_p90, &m.computation_mean,
                          &m.resource_utilization, &m.load_cloud, &m.load_edge_scratch,
                          &m.load_edge_reuse, &m.comm_reduction, &m.comp_reduction};
      for (std::size_t i = 0; i < 9; ++i) *fields[i] = std::stod(f[3 + i]);
      out.push_back(std::move(m));
    } catch (const std::logic_error&) {
      throw ParseError(number, "malformed number");
    }
  }
  return out;
}

}  // namespace whistle
