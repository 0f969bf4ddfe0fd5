// One PASS/FAIL line per acceptance criterion. `--only CN` runs a single one.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "derived.hpp"
#include "naive_lfu.hpp"
#include "whistle/baselines.hpp"
#include "whistle/cli.hpp"
#include "whistle/config.hpp"
#include "whistle/cost_model.hpp"
#include "whistle/extended.hpp"
#include "whistle/instances.hpp"
#include "whistle/matching.hpp"
#include "whistle/placement.hpp"
#include "whistle/report.hpp"
#include "whistle/reuse_table.hpp"
#include "whistle/simulator.hpp"
#include "whistle/statistics.hpp"

namespace fs = std::filesystem;
using namespace whistle;
using whistle::testing::derived;

namespace {

struct Outcome {
  bool pass{false};
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// C1: exchange stability of WHISTLE on 100 random instances, under 5 s.
Outcome stability_whistle() {
  const auto start = Clock::now();
  int stable = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto problem = random_matching_problem(seed, MatchingShape{8, 4, 3});
    const auto table = compute_utilities(problem);
    const auto a = deferred_acceptance(table, problem.effective_replica_quota());
    stable += is_exchange_stable(a, table).stable ? 1 : 0;
  }
  const double elapsed = seconds_since(start);
  return {stable == 100 && elapsed < 5.0,
          std::to_string(stable) + "/100 stable in " + fmt(elapsed, 3) + " s (limit 5 s)"};
}

// C2: no blocking pair in extended-scheme routings on 100 random instances.
Outcome stability_extended() {
  int clean = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    RedirectInstance inst;
    random_redirect_instance(seed, inst);
    bool ok = !find_blocking_pair(extended_match_batch(inst.problem), inst.problem);
    // Each request on its own through the single-task path as well.
    for (const auto& request : inst.requests) {
      const auto route = extended_match(request, EdgeId{0}, false, inst.neighbors);
      ok = ok && !find_blocking_pair({route}, make_redirect_problem({request}, inst.neighbors));
    }
    clean += ok ? 1 : 0;
  }
  return {clean == 100, std::to_string(clean) + "/100 without a blocking pair"};
}

// C3: WHISTLE objective against random and greedy placements, plus the ratio
// to the exhaustive optimum.
Outcome oracle_proximity() {
  int beats_random = 0;
  int beats_greedy = 0;
  double ratio_sum = 0.0;
  double ratio_max = 0.0;
  constexpr int kInstances = 50;
  for (std::uint64_t seed = 1; seed <= kInstances; ++seed) {
    const auto scenario = random_placement_scenario(seed);
    const auto inst = scenario.placement_instance();
    std::vector<ServiceId> services;
    for (const auto& s : scenario.services) services.push_back(s.id);
    const auto& edges = scenario.servers.edges;

    const double whistle = placement_objective(inst, whistle_match(scenario.matching_problem()));
    const double random = placement_objective(inst, random_edge(services, edges, seed));
    const double greedy = placement_objective(inst, greedy_offload(services, edges, scenario.stats));
    const double optimum = placement_objective(inst, brute_force_offload(inst));
    beats_random += whistle <= random * (1 + 1e-12) ? 1 : 0;
    beats_greedy += whistle <= greedy * (1 + 1e-12) ? 1 : 0;
    const double ratio = whistle / optimum;
    ratio_sum += ratio;
    ratio_max = std::max(ratio_max, ratio);
  }
  const bool pass = beats_random >= 45 && beats_greedy >= 45;
  return {pass, "whistle <= random on " + std::to_string(beats_random) + "/50, <= greedy on " +
                    std::to_string(beats_greedy) + "/50 (need 45 each); whistle/optimal mean " +
                    fmt(ratio_sum / kInstances) + " max " + fmt(ratio_max)};
}

// Shared single-edge reduction scenario for C4 and C5.
struct ReductionRun {
  std::map<std::string, MetricsReport> reports;
  double whistle_seconds{0.0};
};

const ReductionRun& reduction_run() {
  static const ReductionRun run = [] {
    ReductionRun r;
    const auto config = load_scenario(fs::path(WHISTLE_CONFIG_DIR) / "reduction.json");
    const auto trace = trial_trace(config, 0);
    for (const auto& name : {"cloud", "matching", "whistle"}) {
      const auto start = Clock::now();
      const auto result = run_trial(trial_config(config, Scheme::parse(name), 0), trace);
      if (std::string(name) == "whistle") r.whistle_seconds = seconds_since(start);
      r.reports[name] = aggregate({result});
    }
    return r;
  }();
  return run;
}

// C4: reductions against sending everything to the cloud.
Outcome reduction_rates() {
  const auto& run = reduction_run();
  const auto& w = run.reports.at("whistle");
  const bool pass = w.comp_reduction >= 0.70 && w.comm_reduction >= 0.60 && run.whistle_seconds < 30.0;
  return {pass, "comp_reduction " + fmt(w.comp_reduction) + " (>= 0.70), comm_reduction " +
                    fmt(w.comm_reduction) + " (>= 0.60), runtime " + fmt(run.whistle_seconds, 2) +
                    " s (< 30 s)"};
}

// C5: mean completion ordering on the same trace.
Outcome completion_ordering() {
  const auto& run = reduction_run();
  const double w = run.reports.at("whistle").completion_mean;
  const double m = run.reports.at("matching").completion_mean;
  const double c = run.reports.at("cloud").completion_mean;
  const double gain = 1.0 - w / m;
  const bool pass = w < m && m < c && gain >= 0.15;
  return {pass, "whistle " + fmt(w) + " s < matching " + fmt(m) + " s < cloud " + fmt(c) +
                    " s; whistle faster than matching by " + fmt(100 * gain, 1) + "% (>= 15%)"};
}

// C6: neighbour redirection against the cloud bounce.
Outcome extended_gain() {
  const auto config = load_scenario(fs::path(WHISTLE_CONFIG_DIR) / "neighbor.json");
  const auto trace = trial_trace(config, 0);
  const double w =
      aggregate({run_trial(trial_config(config, Scheme::parse("whistle"), 0), trace)}).completion_mean;
  const double e =
      aggregate({run_trial(trial_config(config, Scheme::parse("extended"), 0), trace)}).completion_mean;
  const double gain = 1.0 - e / w;
  return {gain >= 0.10, "extended " + fmt(e) + " s vs whistle " + fmt(w) + " s: " +
                            fmt(100 * gain, 1) + "% lower (>= 10%)"};
}

// C7: M/M/1 sojourn time.
Outcome mm1() {
  const auto r = run_mm1_calibration(5.0, 10.0, 100'000, 1);
  return {r.relative_error <= 0.10, "measured " + fmt(r.measured_sojourn) + " s vs " +
                                        fmt(r.expected_sojourn) + " s, error " +
                                        fmt(100 * r.relative_error, 2) + "% (<= 10%)"};
}

// C8: LFU table against the scan-based reference.
Outcome lfu() {
  std::mt19937_64 rng(2024);
  constexpr std::size_t kCapacity = 16;
  ReuseTable table(kCapacity);
  whistle::testing::NaiveLfu naive(kCapacity);
  std::uniform_int_distribution<int> service(1, 3), len(1, 4), digit(0, 4), op(0, 2);
  std::size_t agree = 0;
  std::size_t evictions = 0;
  constexpr std::size_t kOps = 10'000;
  for (std::size_t step = 0; step < kOps; ++step) {
    const ServiceId s{static_cast<std::uint32_t>(service(rng))};
    InputDescriptor q;
    for (int i = len(rng); i > 0; --i) q.items.push_back(static_cast<Digest>(digit(rng)));
    bool ok = true;
    if (op(rng) == 0 || table.contains(s, q)) {
      const auto a = table.lookup(s, q, 1.0);
      const auto b = naive.lookup(s, q, 1.0);
      ok = a.kind == b.kind && a.overlap == b.overlap;
    } else {
      const std::uint64_t min_before = naive.min_frequency();
      ReuseEntry e;
      e.key = q;
      e.service = s;
      e.inserted_at = static_cast<double>(step / 5);
      const auto evicted = table.insert(e);
      const auto victim = naive.insert(s, q, e.inserted_at);
      ok = evicted.has_value() == victim.has_value() && (!evicted || evicted->frequency == min_before);
      evictions += evicted ? 1 : 0;
    }
    ok = ok && table.size() == naive.size();
    agree += ok ? 1 : 0;
  }
  for (const auto& e : table.snapshot()) {
    if (!naive.contains(e.service, e.key)) agree = 0;
  }
  return {agree == kOps, std::to_string(agree) + "/" + std::to_string(kOps) + " operations agree (" +
                             std::to_string(evictions) + " evictions)"};
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[entry.path().filename().string()] = s.str();
  }
  return files;
}

// C9: `compare` twice with the same config and seed.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "whistle_acceptance_c9";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = root / "scenario.json";
  std::ofstream(config) << R"({
    "edges": [{"id": 0, "quota": 6, "neighbors": [1]}, {"id": 1, "quota": 8, "neighbors": [0]}],
    "workload": {"n_tasks": 2000, "redundancy": 0.6},
    "baselines": {"ga": {"generations": 20}, "sa": {"iterations": 300}},
    "trials": 2, "seed": 3
  })";
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* name : {"a", "b"}) {
    const fs::path out = root / name;
    fs::create_directories(out);
    ::setenv(kOutputDirEnv, out.c_str(), 1);
    std::ostringstream sink;
    const int code = cli_main({"compare", "--config", config.string(), "--jobs", "2"}, sink, sink);
    if (code != kExitOk) return {false, "compare exited with " + std::to_string(code) + ": " + sink.str()};
    runs.push_back(read_dir(out));
  }
  ::unsetenv(kOutputDirEnv);
  fs::remove_all(root);
  std::size_t identical = 0;
  for (const auto& [name, bytes] : runs[0]) {
    auto it = runs[1].find(name);
    identical += it != runs[1].end() && it->second == bytes ? 1 : 0;
  }
  const bool pass = !runs[0].empty() && identical == runs[0].size() && runs[0].size() == runs[1].size();
  return {pass, std::to_string(identical) + "/" + std::to_string(runs[0].size()) +
                    " output files byte-identical"};
}

// C10: formula values against the pinned constants and the oracle table.
Outcome unit_formulas() {
  std::vector<std::string> failures;
  auto check = [&](const std::string& what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) {
      failures.push_back(what + " = " + fmt(got, 10) + " want " + fmt(want, 10));
    }
  };
  check("granularity(100,10)", compute_granularity(100, 10), 0.9999546, 1e-6);
  check("granularity(100,10) oracle", compute_granularity(100, 10), derived("granularity_100_10"), 1e-12);
  check("reusability(0.7310586)", compute_reusability(0.7310586), 0.7971, 1e-3);
  check("reusability(0.7310586) oracle", compute_reusability(0.7310586), derived("reusability_0.7310586"),
        1e-12);

  Infrastructure servers;
  servers.cloud = CloudServer{1000.0, 10.0};
  servers.edges.push_back(EdgeServer{EdgeId{0}, 50.0, 50.0, 1, {}});
  Task t;
  t.input_size = 100;
  t.complexity = 100;
  const LookupCost lookup{0.01};
  const std::vector<std::pair<RoutingDecision, std::string>> cases{
      {RoutingDecision::cloud(t), "completion_cloud"},
      {RoutingDecision::edge_scratch(EdgeId{0}, t), "completion_edge_scratch"},
      {RoutingDecision::edge_full_reuse(EdgeId{0}), "completion_edge_full"},
  };
  std::vector<Task> batch;
  std::vector<RoutingDecision> decisions;
  for (const auto& [decision, key] : cases) {
    check(key, completion_cost(t, decision, servers, lookup).total, derived(key), 1e-9);
    batch.push_back(t);
    decisions.push_back(decision);
  }
  check("objective_three", objective_value(batch, decisions, servers, lookup), derived("objective_three"),
        1e-9);
  check("reuse_partial_40",
        reuse_execution_cost(RoutingDecision::edge_partial_reuse(EdgeId{0}, 40), lookup, 50.0),
        derived("reuse_partial_40"), 1e-9);

  if (failures.empty()) return {true, "9 values within tolerance"};
  std::string detail;
  for (const auto& f : failures) detail += (detail.empty() ? "" : "; ") + f;
  return {false, detail};
}

struct Criterion {
  std::string id;
  std::string name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"C1", "exchange stability", stability_whistle},
      {"C2", "no blocking pair", stability_extended},
      {"C3", "oracle proximity", oracle_proximity},
      {"C4", "reduction rates", reduction_rates},
      {"C5", "completion ordering", completion_ordering},
      {"C6", "neighbour redirection", extended_gain},
      {"C7", "M/M/1 calibration", mm1},
      {"C8", "LFU reference agreement", lfu},
      {"C9", "compare determinism", determinism},
      {"C10", "unit formulas", unit_formulas},
  };

  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::cerr << "usage: whistle_acceptance [--only C<n>]\n";
      return 2;
    }
  }

  bool all = true;
  bool matched = false;
  for (const auto& c : criteria) {
    if (!only.empty() && c.id != only) continue;
    matched = true;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.id << ' ' << c.name << ": " << o.detail << std::endl;
  }
  if (!matched) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return all ? 0 : 1;
}
