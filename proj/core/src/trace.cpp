#include "whistle/trace.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "whistle/errors.hpp"

namespace whistle {

namespace {

constexpr std::uint64_t kTable3Frequencies[] = {
    12, 488, 5519, 6543, 8889, 28777, 35061, 53933, 322929, 399489, 1226388, 12207702,
};

bool is_gzip(const std::filesystem::path& path) { return path.extension() == ".gz"; }

std::string read_gzip(const std::filesystem::path& path) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw std::runtime_error("cannot open " + path.string());
  std::string out;
  char buffer[1 << 16];
  int n = 0;
  while ((n = gzread(file, buffer, sizeof buffer)) > 0) out.append(buffer, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(file);
  if (failed) throw std::runtime_error("gzip read error in " + path.string());
  return out;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, const char* column, int base = 10) {
  T value{};
  std::from_chars_result r{};
  if constexpr (std::is_floating_point_v<T>) {
    r = std::from_chars(text.data(), text.data() + text.size(), value);
  } else {
    r = std::from_chars(text.data(), text.data() + text.size(), value, base);
  }
  if (text.empty() || r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
    throw ParseError(line, std::string("column ") + column + ": cannot parse '" +
                               std::string(text) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ParseError(line, std::string("column ") + column + ": not finite");
    if (value < 0.0) throw ParseError(line, std::string("column ") + column + ": negative value");
  }
  return value;
}

std::string format_real(double v) {
  char buffer[64];
  auto r = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, r.ptr);
}

std::string format_hex(Digest d) {
  char buffer[32];
  auto r = std::to_chars(buffer, buffer + sizeof buffer, d, 16);
  return std::string(buffer, r.ptr);
}

}  // namespace

std::vector<Task> parse_trace(std::istream& in) {
  std::vector<Task> tasks;
  std::string line;
  std::size_t number = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header row");
  ++number;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw ParseError(1, "unexpected header '" + line + "'");

  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 7) {
      throw ParseError(number, "expected 7 columns, found " + std::to_string(fields.size()));
    }
    Task t;
    t.id = parse_number<std::uint64_t>(fields[0], number, "task_id");
    t.service = ServiceId{parse_number<std::uint32_t>(fields[1], number, "service_id")};
    t.arrival_time = parse_number<double>(fields[2], number, "arrival_time_s");
    for (auto item : split(fields[3], ';')) {
      t.input.items.push_back(parse_number<Digest>(item, number, "input_digest_items", 16));
    }
    t.input_size = parse_number<double>(fields[4], number, "input_size_mb");
    t.complexity = parse_number<double>(fields[5], number, "complexity_units");
    t.output_size = parse_number<double>(fields[6], number, "output_size_mb");
    if (t.input_size <= 0.0) throw ParseError(number, "column input_size_mb: must be positive");
    if (t.complexity <= 0.0) throw ParseError(number, "column complexity_units: must be positive");
    if (!tasks.empty() && t.arrival_time < tasks.back().arrival_time) {
      throw ParseError(number, "column arrival_time_s: arrivals not sorted");
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::vector<Task> load_trace(const std::filesystem::path& path) {
  if (is_gzip(path)) {
    std::istringstream in(read_gzip(path));
    return parse_trace(in);
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_trace(in);
}

void write_trace(std::ostream& out, const std::vector<Task>& tasks) {
  out << kTraceHeader << '\n';
  for (const auto& t : tasks) {
    out << t.id << ',' << t.service.value << ',' << format_real(t.arrival_time) << ',';
    for (std::size_t i = 0; i < t.input.items.size(); ++i) {
      if (i) out << ';';
      out << format_hex(t.input.items[i]);
    }
    out << ',' << format_real(t.input_size) << ',' << format_real(t.complexity) << ','
        << format_real(t.output_size) << '\n';
  }
}

void write_trace(const std::filesystem::path& path, const std::vector<Task>& tasks) {
  std::ostringstream buffer;
  write_trace(buffer, tasks);
  const std::string data = buffer.str();
  if (is_gzip(path)) {
    // zlib writes a fixed gzip header (no name, zero mtime), so output is
    // byte-stable.
    gzFile file = gzopen(path.c_str(), "wb9");
    if (file == nullptr) throw std::runtime_error("cannot write " + path.string());
    const int written = gzwrite(file, data.data(), static_cast<unsigned>(data.size()));
    gzclose(file);
    if (written != static_cast<int>(data.size())) throw std::runtime_error("gzip write error in " + path.string());
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << data;
  if (!out) throw std::runtime_error("write error in " + path.string());
}

std::vector<double> table3_profile() {
  const double total = static_cast<double>(
      std::accumulate(std::begin(kTable3Frequencies), std::end(kTable3Frequencies), std::uint64_t{0}));
  std::vector<double> out;
  for (auto f : kTable3Frequencies) out.push_back(static_cast<double>(f) / total);
  return out;
}

std::vector<double> popularity_weights(const Popularity& popularity, std::size_t n_services) {
  std::vector<double> w;
  switch (popularity.kind) {
    case PopularityKind::Table3:
      if (n_services != 12) throw ConfigError("workload.n_services", "table3 popularity needs 12 services");
      return table3_profile();
    case PopularityKind::Uniform:
      w.assign(n_services, 1.0);
      break;
    case PopularityKind::Zipf:
      // Rank 1 is the last service, so the highest id is the most popular as
      // in the reference profile.
      for (std::size_t i = 0; i < n_services; ++i) {
        w.push_back(1.0 / std::pow(static_cast<double>(n_services - i), popularity.zipf_exponent));
      }
      break;
    case PopularityKind::Explicit:
      if (popularity.weights.size() != n_services) {
        throw ConfigError("workload.popularity", "explicit weights must list one value per service");
      }
      for (double x : popularity.weights) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("workload.popularity", "weights must be finite and >= 0");
      }
      w = popularity.weights;
      break;
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw ConfigError("workload.popularity", "weights sum to zero");
  for (double& x : w) x /= total;
  return w;
}

void validate(const SynthParams& p) {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!(p.arrival_rate > 0.0)) throw ConfigError("workload.arrival_rate", "must be positive");
  if (p.n_services == 0) throw ConfigError("workload.n_services", "must be at least 1");
  if (!unit(p.input_redundancy)) throw ConfigError("workload.redundancy", "must lie in [0,1]");
  if (!unit(p.partial_overlap)) throw ConfigError("workload.partial_overlap", "must lie in [0,1]");
  if (p.descriptor_length == 0) throw ConfigError("workload.descriptor_length", "must be at least 1");
  if (!(p.mean_input_size > 0.0)) throw ConfigError("workload.mean_input_size_mb", "must be positive");
  if (!(p.mean_complexity > 0.0)) throw ConfigError("workload.mean_complexity", "must be positive");
  if (!(p.mean_output_size >= 0.0)) throw ConfigError("workload.mean_output_size_mb", "must be >= 0");
  if (!(p.input_size_sigma >= 0.0)) throw ConfigError("workload.input_size_sigma", "must be >= 0");
  if (!(p.complexity_sigma >= 0.0)) throw ConfigError("workload.complexity_sigma", "must be >= 0");
  if (p.popularity.kind == PopularityKind::Zipf && !(p.popularity.zipf_exponent >= 0.0)) {
    throw ConfigError("workload.popularity", "zipf exponent must be >= 0");
  }
  popularity_weights(p.popularity, p.n_services);
}

namespace {

/// Log-normal draw with the given mean.
double lognormal(std::mt19937_64& rng, double mean, double sigma) {
  if (sigma == 0.0) return mean;
  std::lognormal_distribution<double> d(std::log(mean) - 0.5 * sigma * sigma, sigma);
  return d(rng);
}

}  // namespace

std::vector<Task> synth_trace(const SynthParams& p) {
  validate(p);
  const auto weights = popularity_weights(p.popularity, p.n_services);
  std::mt19937_64 rng(p.seed);
  std::exponential_distribution<double> gap(p.arrival_rate);
  std::discrete_distribution<std::size_t> pick_service(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::vector<std::size_t>> history(p.n_services);  // task indices per service
  std::vector<Task> tasks;
  tasks.reserve(p.n_tasks);
  double clock = 0.0;
  for (std::size_t i = 0; i < p.n_tasks; ++i) {
    clock += gap(rng);
    const std::size_t s = pick_service(rng);
    Task t;
    t.id = i;
    t.service = ServiceId{static_cast<std::uint32_t>(s + 1)};
    t.arrival_time = clock;

    auto& previous = history[s];
    if (!previous.empty() && unit(rng) < p.input_redundancy) {
      std::uniform_int_distribution<std::size_t> pick(0, previous.size() - 1);
      const Task& source = tasks[previous[pick(rng)]];
      t.input = source.input;
      t.input_size = source.input_size;
      t.complexity = source.complexity;
      t.output_size = source.output_size;
    } else {
      std::size_t shared = 0;
      if (!previous.empty() && unit(rng) < p.partial_overlap) {
        std::uniform_int_distribution<std::size_t> pick(0, previous.size() - 1);
        const Task& source = tasks[previous[pick(rng)]];
        shared = source.input.items.size() / 2;
        t.input.items.assign(source.input.items.begin(),
                             source.input.items.begin() + static_cast<std::ptrdiff_t>(shared));
      }
      for (std::size_t k = shared; k < p.descriptor_length; ++k) t.input.items.push_back(rng());
      t.input_size = lognormal(rng, p.mean_input_size, p.input_size_sigma);
      t.complexity = lognormal(rng, p.mean_complexity, p.complexity_sigma);
      t.output_size = p.mean_output_size;
    }
    previous.push_back(i);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

}  // namespace whistle
