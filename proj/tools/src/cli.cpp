#include "whistle/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "whistle/errors.hpp"
#include "whistle/extended.hpp"
#include "whistle/instances.hpp"
#include "whistle/placement.hpp"
#include "whistle/reuse_table.hpp"
#include "whistle/simulator.hpp"
#include "whistle/trace.hpp"

namespace whistle {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << data;
  if (!out) throw std::runtime_error("write error in " + path.string());
}

template <typename Writer>
void write_with(const fs::path& path, Writer&& writer) {
  std::ostringstream buffer;
  writer(buffer);
  write_file(path, buffer.str());
}

void print_table(std::ostream& out, const std::vector<MetricsReport>& reports) {
  out << std::left << std::setw(16) << "scheme" << std::right << std::setw(12) << "mean_s"
      << std::setw(12) << "p90_s" << std::setw(12) << "comp_s" << std::setw(8) << "util"
      << std::setw(8) << "cloud" << std::setw(8) << "edge" << std::setw(8) << "reuse"
      << std::setw(10) << "comm_red" << std::setw(10) << "comp_red" << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& m : reports) {
    out << std::left << std::setw(16) << m.scheme << std::right << std::setw(12) << m.completion_mean
        << std::setw(12) << m.completion_p90 << std::setw(12) << m.computation_mean
        << std::setw(8) << std::setprecision(3) << m.resource_utilization << std::setw(8)
        << m.load_cloud << std::setw(8) << m.load_edge_scratch << std::setw(8) << m.load_edge_reuse
        << std::setw(10) << m.comm_reduction << std::setw(10) << m.comp_reduction
        << std::setprecision(4) << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

void write_outputs(const fs::path& dir, const std::string& stem,
                   const std::vector<MetricsReport>& reports, const std::vector<SimResult>& first) {
  fs::create_directories(dir);
  write_report(dir / (stem + ".csv"), reports, ReportFormat::Csv);
  write_report(dir / (stem + ".json"), reports, ReportFormat::Json);
  for (const auto& r : first) {
    std::string name = r.scheme;
    std::replace(name.begin(), name.end(), '+', '_');
    write_with(dir / (name + "_tasks.csv"), [&](std::ostream& o) { write_task_csv(o, r); });
    write_with(dir / (name + "_windows.csv"), [&](std::ostream& o) { write_window_csv(o, r); });
  }
}

ScenarioConfig load_with_overrides(const std::string& path, const std::optional<std::uint64_t>& seed,
                                   const std::optional<std::size_t>& trials,
                                   const std::optional<std::string>& trace) {
  ScenarioConfig c = load_scenario(path);
  if (seed) c.seed = *seed;
  if (trials) {
    if (*trials == 0) throw ConfigError("--trials", "must be at least 1");
    c.trials = *trials;
  }
  if (trace) c.trace_path = fs::path(*trace);
  return c;
}

std::vector<Scheme> parse_scheme_list(const std::string& text) {
  if (text == "all") return Scheme::all();
  std::vector<Scheme> out;
  std::stringstream in(text);
  for (std::string name; std::getline(in, name, ',');) {
    if (!name.empty()) out.push_back(Scheme::parse(name));
  }
  if (out.empty()) throw ConfigError("--schemes", "no scheme given");
  return out;
}

// ---- validate -----------------------------------------------------------

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Check> run_validation(std::size_t instances, std::uint64_t seed, std::size_t mm1_tasks) {
  std::vector<Check> checks;

  std::size_t stable = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const MatchingProblem p = random_matching_problem(seed + i);
    const UtilityTable table = compute_utilities(p);
    if (is_exchange_stable(deferred_acceptance(table, p.effective_replica_quota()), table).stable) ++stable;
  }
  checks.push_back({"exchange-stability", stable == instances,
                    std::to_string(stable) + "/" + std::to_string(instances) + " stable"});

  std::size_t unblocked = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    RedirectInstance inst;
    random_redirect_instance(seed + i, inst);
    if (!find_blocking_pair(extended_match_batch(inst.problem), inst.problem)) ++unblocked;
  }
  checks.push_back({"blocking-pairs", unblocked == instances,
                    std::to_string(unblocked) + "/" + std::to_string(instances) + " without blocking pair"});

  std::size_t feasible = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const PlacementScenario sc = random_placement_scenario(seed + i);
    const PlacementInstance inst = sc.placement_instance();
    std::vector<ServiceId> ids;
    for (const auto& s : sc.services) ids.push_back(s.id);
    const Assignment placements[] = {
        whistle_match(sc.matching_problem()),
        matching_no_reuse(sc.matching_problem()),
        random_edge(ids, sc.servers.edges, seed + i),
        greedy_offload(ids, sc.servers.edges, sc.stats),
        ga_offload(ids, sc.servers.edges, sc.stats, GaParams{}, seed + i),
        sa_offload(inst, SaParams{}, seed + i),
    };
    for (const auto& a : placements) {
      ++total;
      bool quota_ok = true;
      for (const auto& v : check_placement(inst, a)) {
        if (v.constraint == Constraint::ServiceQuota || v.constraint == Constraint::ReplicaQuota ||
            v.constraint == Constraint::UnknownEdge) {
          quota_ok = false;
        }
      }
      feasible += quota_ok;
    }
  }
  checks.push_back({"quota-feasibility", feasible == total,
                    std::to_string(feasible) + "/" + std::to_string(total) + " placements within quotas"});

  const auto mm1 = run_mm1_calibration(5.0, 10.0, mm1_tasks, seed);
  std::ostringstream detail;
  detail << "measured " << std::setprecision(6) << mm1.measured_sojourn << " s vs "
         << mm1.expected_sojourn << " s";
  checks.push_back({"mm1-sojourn", mm1.relative_error <= 0.10, detail.str()});
  return checks;
}

}  // namespace

std::vector<MetricsReport> run_comparison(const ScenarioConfig& config, unsigned jobs,
                                          std::vector<SimResult>* first_trials) {
  std::vector<std::vector<Task>> traces(config.trials);
  for (std::size_t k = 0; k < config.trials; ++k) traces[k] = trial_trace(config, k);

  struct Job {
    std::size_t scheme;
    std::size_t trial;
  };
  std::vector<Job> work;
  for (std::size_t s = 0; s < config.schemes.size(); ++s) {
    for (std::size_t k = 0; k < config.trials; ++k) work.push_back({s, k});
  }
  std::vector<SimResult> results(work.size());
  auto run = [&](std::size_t i) {
    const Job& j = work[i];
    results[i] = run_trial(trial_config(config, config.schemes[j.scheme], j.trial), traces[j.trial]);
  };
  jobs = std::max(1u, jobs);
  for (std::size_t start = 0; start < work.size(); start += jobs) {
    std::vector<std::future<void>> batch;
    for (std::size_t i = start; i < std::min(work.size(), start + jobs); ++i) {
      batch.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async, run, i));
    }
    for (auto& f : batch) f.get();
  }

  std::vector<MetricsReport> reports;
  for (std::size_t s = 0; s < config.schemes.size(); ++s) {
    std::vector<SimResult> mine;
    for (std::size_t i = 0; i < work.size(); ++i) {
      if (work[i].scheme == s) mine.push_back(std::move(results[i]));
    }
    reports.push_back(aggregate(mine));
    if (first_trials) first_trials->push_back(std::move(mine.front()));
  }
  return reports;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cloud-edge service offloading simulator with computation reuse", "whistle"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> trace;

  auto* simulate = app.add_subcommand("simulate", "Run one scheme over the configured trials");
  std::string scheme_name = "whistle";
  simulate->add_option("--config", config_path, "Scenario JSON file")->required();
  simulate->add_option("--scheme", scheme_name, "Scheme name");
  simulate->add_option("--seed", seed, "Base seed (overrides the config)");
  simulate->add_option("--trials", trials, "Number of trials (overrides the config)");
  simulate->add_option("--trace", trace, "Trace CSV (overrides the config)");

  auto* compare = app.add_subcommand("compare", "Run several schemes on identical traces");
  std::string schemes_text;
  unsigned jobs = 1;
  compare->add_option("--config", config_path, "Scenario JSON file")->required();
  compare->add_option("--schemes", schemes_text, "\"all\" or a comma-separated list");
  compare->add_option("--seed", seed, "Base seed (overrides the config)");
  compare->add_option("--trials", trials, "Number of trials (overrides the config)");
  compare->add_option("--trace", trace, "Trace CSV (overrides the config)");
  compare->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 256u));

  auto* gen = app.add_subcommand("gen-trace", "Write a synthetic trace");
  std::optional<std::string> gen_config;
  std::optional<std::size_t> n_tasks;
  std::optional<double> rate, redundancy, overlap;
  std::optional<std::size_t> services;
  std::optional<std::string> popularity;
  std::optional<std::string> out_path;
  std::uint64_t gen_seed = 1;
  gen->add_option("--config", gen_config, "Take workload defaults from a scenario");
  gen->add_option("--n", n_tasks, "Number of tasks");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--rate", rate, "Arrival rate (tasks/s)");
  gen->add_option("--redundancy", redundancy, "Input redundancy in [0,1]");
  gen->add_option("--partial-overlap", overlap, "Share of fresh inputs sharing a prefix");
  gen->add_option("--services", services, "Number of services");
  gen->add_option("--popularity", popularity, "table3, uniform or zipf:<exponent>");
  gen->add_option("--out", out_path, "Output path (.csv or .csv.gz); stdout when omitted");

  auto* validate_cmd = app.add_subcommand("validate", "Run stability, feasibility and queueing checks");
  std::size_t instances = 100;
  std::size_t mm1_tasks = 100000;
  std::uint64_t validate_seed = 1;
  validate_cmd->add_option("--instances", instances, "Random instances per check");
  validate_cmd->add_option("--mm1-tasks", mm1_tasks, "Tasks in the M/M/1 calibration run");
  validate_cmd->add_option("--seed", validate_seed, "Base seed");

  auto* inspect = app.add_subcommand("inspect", "Dump reuse tables after one trial");
  std::optional<std::uint32_t> edge_filter;
  inspect->add_option("--config", config_path, "Scenario JSON file")->required();
  inspect->add_option("--scheme", scheme_name, "Scheme name");
  inspect->add_option("--seed", seed, "Seed (overrides the config)");
  inspect->add_option("--trace", trace, "Trace CSV (overrides the config)");
  inspect->add_option("--edge", edge_filter, "Only this edge id");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) {
      const Scheme scheme = Scheme::parse(scheme_name);
      ScenarioConfig c = load_with_overrides(config_path, seed, trials, trace);
      c.schemes = {scheme};
      std::vector<SimResult> first;
      const auto reports = run_comparison(c, 1, &first);
      write_outputs(c.output_dir, "simulate", reports, first);
      print_table(out, reports);
      return kExitOk;
    }
    if (compare->parsed()) {
      ScenarioConfig c = load_with_overrides(config_path, seed, trials, trace);
      if (!schemes_text.empty()) c.schemes = parse_scheme_list(schemes_text);
      std::vector<SimResult> first;
      const auto reports = run_comparison(c, jobs, &first);
      write_outputs(c.output_dir, "comparison", reports, first);
      print_table(out, reports);
      return kExitOk;
    }
    if (gen->parsed()) {
      SynthParams p;
      if (gen_config) p = load_scenario(*gen_config).trial.workload;
      if (n_tasks) p.n_tasks = *n_tasks;
      if (rate) p.arrival_rate = *rate;
      if (redundancy) p.input_redundancy = *redundancy;
      if (overlap) p.partial_overlap = *overlap;
      if (services) p.n_services = *services;
      if (popularity) {
        if (*popularity == "table3") {
          p.popularity = {PopularityKind::Table3, 1.0, {}};
        } else if (*popularity == "uniform") {
          p.popularity = {PopularityKind::Uniform, 1.0, {}};
        } else if (popularity->starts_with("zipf:")) {
          try {
            p.popularity = {PopularityKind::Zipf, std::stod(popularity->substr(5)), {}};
          } catch (const std::exception&) {
            throw ConfigError("--popularity", "bad zipf exponent");
          }
        } else {
          throw ConfigError("--popularity", "expected table3, uniform or zipf:<exponent>");
        }
        if (p.popularity.kind != PopularityKind::Table3 && !services && !gen_config) p.n_services = 12;
      }
      p.seed = gen_seed;
      const auto tasks = synth_trace(p);
      if (out_path) {
        write_trace(fs::path(*out_path), tasks);
      } else {
        write_trace(out, tasks);
      }
      return kExitOk;
    }
    if (validate_cmd->parsed()) {
      bool all = true;
      for (const auto& c : run_validation(instances, validate_seed, mm1_tasks)) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        all = all && c.pass;
      }
      return all ? kExitOk : kExitRuntime;
    }
    if (inspect->parsed()) {
      const Scheme scheme = Scheme::parse(scheme_name);
      ScenarioConfig c = load_with_overrides(config_path, seed, std::nullopt, trace);
      const auto result = run_trial(trial_config(c, scheme, 0), trial_trace(c, 0));
      for (const auto& snap : result.reuse_tables) {
        if (edge_filter && snap.edge.value != *edge_filter) continue;
        ReuseTable table(std::max<std::size_t>(snap.entries.size(), 1));
        for (const auto& e : snap.entries) table.insert(e);
        out << "# edge " << snap.edge.value << " entries " << snap.entries.size() << '\n';
        write_reuse_table_csv(out, table);
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "trace error (line " << e.line() << "): " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace whistle
