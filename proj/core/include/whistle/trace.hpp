#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "whistle/types.hpp"

namespace whistle {

/// Column order of the trace CSV.
inline constexpr const char* kTraceHeader =
    "task_id,service_id,arrival_time_s,input_digest_items,input_size_mb,complexity_units,"
    "output_size_mb";

/// Parses a trace. Paths ending in ".gz" are read through zlib. Throws
/// ParseError with the 1-based line number on a malformed row or an arrival
/// time earlier than the previous row's; std::runtime_error when the file
/// cannot be opened.
std::vector<Task> load_trace(const std::filesystem::path& path);
std::vector<Task> parse_trace(std::istream& in);

/// Writes tasks in the CSV schema. Reals use the shortest round-trip form.
void write_trace(std::ostream& out, const std::vector<Task>& tasks);
void write_trace(const std::filesystem::path& path, const std::vector<Task>& tasks);

enum class PopularityKind { Table3, Zipf, Uniform, Explicit };

struct Popularity {
  PopularityKind kind{PopularityKind::Table3};
  double zipf_exponent{1.0};
  std::vector<double> weights;  // Explicit only; normalised on use
};

struct SynthParams {
  std::size_t n_tasks{1000};
  double arrival_rate{20.0};  // tasks/s, Poisson
  std::size_t n_services{12};
  Popularity popularity;
  double input_redundancy{0.5};
  // Share of fresh descriptors that copy the leading half of an earlier
  // descriptor of the same service (partial reuse candidates).
  double partial_overlap{0.0};
  std::size_t descriptor_length{4};
  double mean_input_size{5.0};  // megabits
  double input_size_sigma{0.5};
  double mean_complexity{1.0};  // compute units
  double complexity_sigma{0.5};
  double mean_output_size{0.1};  // megabits
  std::uint64_t seed{1};
};

/// Throws ConfigError naming the offending field.
void validate(const SynthParams& params);

/// Normalised popularity weights for `n_services` services.
std::vector<double> popularity_weights(const Popularity& popularity, std::size_t n_services);

/// Poisson arrivals, services drawn by popularity; with probability
/// `input_redundancy` a task repeats the input (and sizes) of a uniformly
/// chosen earlier task of its service, otherwise it gets a fresh descriptor
/// with log-normal sizes. Service ids run 1..n_services, task ids from 0.
std::vector<Task> synth_trace(const SynthParams& params);

/// Normalised invocation frequencies of the twelve reference services.
std::vector<double> table3_profile();

}  // namespace whistle
