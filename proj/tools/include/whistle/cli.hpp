#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "whistle/config.hpp"
#include "whistle/report.hpp"

namespace whistle {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// Runs the tool. `args` excludes the program name. Subcommands: simulate,
/// compare, gen-trace, validate, inspect.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Every configured scheme over every trial; reports in scheme order. Trials
/// run on up to `jobs` threads; results do not depend on `jobs`.
std::vector<MetricsReport> run_comparison(const ScenarioConfig& config, unsigned jobs = 1,
                                          std::vector<SimResult>* first_trials = nullptr);

}  // namespace whistle
