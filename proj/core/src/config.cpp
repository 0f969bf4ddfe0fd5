#include "whistle/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <string>

#include "whistle/errors.hpp"

namespace whistle {

namespace {

using json = nlohmann::json;

class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  /// Rejects keys that were never asked for.
  void done() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key), "unknown key");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() || it->is_null() ? nullptr : &*it;
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (const json* v = get(key)) out = convert<T>(*v, field(key));
  }

  template <typename T>
  void read(const std::string& key, std::optional<T>& out) {
    if (const json* v = get(key)) out = convert<T>(*v, field(key));
  }

  template <typename T>
  static T convert(const json& v, const std::string& field) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(field, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.get<long long>() < 0 && !v.is_number_unsigned()) throw ConfigError(field, "must be >= 0");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(field, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(field, "expected a string");
    }
    return v.get<T>();
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_network(const json& node, NetworkConfig& n) {
  Reader r(node, "network");
  r.read("link_bandwidth_mbps", n.link_bandwidth);
  r.read("hops_to_edge", n.hops_to_edge);
  r.read("hops_to_cloud", n.hops_to_cloud);
  r.read("cloud_compute", n.cloud_compute);
  r.done();
}

std::vector<EdgeSpec> read_edges(const json& node) {
  if (!node.is_array()) throw ConfigError("edges", "expected an array");
  std::vector<EdgeSpec> edges;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string path = "edges[" + std::to_string(i) + "]";
    Reader r(node[i], path);
    EdgeSpec e;
    e.id = EdgeId{static_cast<std::uint32_t>(i)};
    std::optional<std::uint32_t> id;
    r.read("id", id);
    if (id) e.id = EdgeId{*id};
    r.read("compute_capacity", e.compute_capacity);
    r.read("quota", e.service_quota);
    r.read("origin_weight", e.origin_weight);
    if (const json* nb = r.get("neighbors")) {
      if (!nb->is_array()) throw ConfigError(path + ".neighbors", "expected an array");
      for (const auto& v : *nb) {
        e.neighbors.push_back(EdgeId{Reader::convert<std::uint32_t>(v, path + ".neighbors")});
      }
    }
    r.done();
    edges.push_back(std::move(e));
  }
  return edges;
}

Popularity read_popularity(const json& v) {
  const std::string field = "workload.popularity";
  Popularity p;
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    if (name == "table3") {
      p.kind = PopularityKind::Table3;
    } else if (name == "uniform") {
      p.kind = PopularityKind::Uniform;
    } else {
      throw ConfigError(field, "unknown popularity '" + name + "'");
    }
  } else if (v.is_object()) {
    Reader r(v, field);
    p.kind = PopularityKind::Zipf;
    if (!r.get("zipf")) throw ConfigError(field + ".zipf", "missing exponent");
    r.read("zipf", p.zipf_exponent);
    r.done();
  } else if (v.is_array()) {
    p.kind = PopularityKind::Explicit;
    for (const auto& w : v) p.weights.push_back(Reader::convert<double>(w, field));
  } else {
    throw ConfigError(field, "expected \"table3\", \"uniform\", {\"zipf\": s} or a weight list");
  }
  return p;
}

void read_workload(const json& node, SynthParams& w, std::optional<std::filesystem::path>& trace,
                   const std::filesystem::path& base_dir) {
  Reader r(node, "workload");
  std::optional<std::string> path;
  r.read("trace", path);
  if (path) {
    std::filesystem::path p(*path);
    trace = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  r.read("n_tasks", w.n_tasks);
  r.read("arrival_rate", w.arrival_rate);
  r.read("n_services", w.n_services);
  if (const json* pop = r.get("popularity")) w.popularity = read_popularity(*pop);
  r.read("redundancy", w.input_redundancy);
  r.read("partial_overlap", w.partial_overlap);
  r.read("descriptor_length", w.descriptor_length);
  r.read("mean_input_size_mb", w.mean_input_size);
  r.read("input_size_sigma", w.input_size_sigma);
  r.read("mean_complexity", w.mean_complexity);
  r.read("complexity_sigma", w.complexity_sigma);
  r.read("mean_output_size_mb", w.mean_output_size);
  r.done();
}

void read_simulation(const json& node, TrialConfig& t) {
  Reader r(node, "simulation");
  r.read("window_s", t.window_length);
  r.read("lookup_cost_s", t.lookup_cost);
  r.read("reuse_capacity", t.reuse_capacity);
  r.read("replica_quota", t.replica_quota);
  r.read("neighbor_queue_limit", t.neighbor_queue_limit);
  std::optional<std::string> sign;
  r.read("gain_sign", sign);
  if (sign) {
    if (*sign == "literal") {
      t.gain_sign = GainSign::Literal;
    } else if (*sign == "subtractive") {
      t.gain_sign = GainSign::Subtractive;
    } else {
      throw ConfigError("simulation.gain_sign", "expected \"literal\" or \"subtractive\"");
    }
  }
  std::optional<std::string> policy;
  r.read("range_policy", policy);
  if (policy) {
    if (*policy == "strict") {
      t.range_policy = RangePolicy::Strict;
    } else if (*policy == "relaxed") {
      t.range_policy = RangePolicy::Relaxed;
    } else {
      throw ConfigError("simulation.range_policy", "expected \"strict\" or \"relaxed\"");
    }
  }
  r.done();
}

void read_baselines(const json& node, TrialConfig& t) {
  Reader r(node, "baselines");
  if (const json* ga = r.get("ga")) {
    Reader g(*ga, "baselines.ga");
    g.read("population", t.ga.population);
    g.read("generations", t.ga.generations);
    g.read("mutation_rate", t.ga.mutation_rate);
    g.read("tournament", t.ga.tournament);
    g.done();
  }
  if (const json* sa = r.get("sa")) {
    Reader s(*sa, "baselines.sa");
    s.read("initial_temperature", t.sa.initial_temperature);
    s.read("cooling", t.sa.cooling);
    s.read("iterations", t.sa.iterations);
    s.done();
  }
  r.done();
  if (!(t.ga.mutation_rate >= 0.0 && t.ga.mutation_rate <= 1.0)) {
    throw ConfigError("baselines.ga.mutation_rate", "must lie in [0,1]");
  }
  if (t.ga.population < 2) throw ConfigError("baselines.ga.population", "must be at least 2");
  if (t.ga.tournament < 1) throw ConfigError("baselines.ga.tournament", "must be at least 1");
  if (!(t.sa.cooling > 0.0 && t.sa.cooling < 1.0)) throw ConfigError("baselines.sa.cooling", "must lie in (0,1)");
  if (t.sa.initial_temperature && !(*t.sa.initial_temperature > 0.0)) {
    throw ConfigError("baselines.sa.initial_temperature", "must be positive");
  }
}

std::vector<Scheme> read_schemes(const json& v) {
  if (v.is_string() && v.get<std::string>() == "all") return Scheme::all();
  if (!v.is_array() || v.empty()) throw ConfigError("schemes", "expected \"all\" or a non-empty list");
  std::vector<Scheme> out;
  for (const auto& name : v) {
    Scheme s = Scheme::parse(Reader::convert<std::string>(name, "schemes"));
    for (const auto& seen : out) {
      if (seen == s) throw ConfigError("schemes", "duplicate scheme '" + s.name() + "'");
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  ScenarioConfig c;
  c.trial.edges = {EdgeSpec{}};
  c.schemes = Scheme::all();
  try {
    Reader r(doc, "");
    if (const json* v = r.get("network")) read_network(*v, c.trial.network);
    if (const json* v = r.get("edges")) c.trial.edges = read_edges(*v);
    if (const json* v = r.get("workload")) read_workload(*v, c.trial.workload, c.trace_path, base_dir);
    if (const json* v = r.get("simulation")) read_simulation(*v, c.trial);
    if (const json* v = r.get("baselines")) read_baselines(*v, c.trial);
    if (const json* v = r.get("schemes")) c.schemes = read_schemes(*v);
    r.read("trials", c.trials);
    r.read("seed", c.seed);
    std::optional<std::string> out;
    r.read("output_dir", out);
    if (out) c.output_dir = *out;
    r.done();
  } catch (const json::exception& e) {
    throw ConfigError("<document>", e.what());
  }
  if (c.trials == 0) throw ConfigError("trials", "must be at least 1");
  for (const auto& scheme : c.schemes) validate(trial_config(c, scheme, 0));
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", path.string() + ": " + e.what());
  }
  ScenarioConfig c = parse_scenario(doc, path.parent_path());
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
    c.output_dir = dir;
  }
  return c;
}

nlohmann::ordered_json scenario_to_json(const ScenarioConfig& c) {
  using oj = nlohmann::ordered_json;
  const auto& t = c.trial;
  oj doc;
  doc["network"] = {{"link_bandwidth_mbps", t.network.link_bandwidth},
                    {"hops_to_edge", t.network.hops_to_edge},
                    {"hops_to_cloud", t.network.hops_to_cloud},
                    {"cloud_compute", t.network.cloud_compute}};
  doc["edges"] = oj::array();
  for (const auto& e : t.edges) {
    oj nb = oj::array();
    for (auto n : e.neighbors) nb.push_back(n.value);
    doc["edges"].push_back({{"id", e.id.value},
                            {"compute_capacity", e.compute_capacity},
                            {"quota", e.service_quota},
                            {"neighbors", nb},
                            {"origin_weight", e.origin_weight}});
  }
  const auto& w = t.workload;
  oj popularity;
  switch (w.popularity.kind) {
    case PopularityKind::Table3: popularity = "table3"; break;
    case PopularityKind::Uniform: popularity = "uniform"; break;
    case PopularityKind::Zipf: popularity = {{"zipf", w.popularity.zipf_exponent}}; break;
    case PopularityKind::Explicit: popularity = w.popularity.weights; break;
  }
  doc["workload"] = {{"trace", c.trace_path ? oj(c.trace_path->string()) : oj()},
                     {"n_tasks", w.n_tasks},
                     {"arrival_rate", w.arrival_rate},
                     {"n_services", w.n_services},
                     {"popularity", popularity},
                     {"redundancy", w.input_redundancy},
                     {"partial_overlap", w.partial_overlap},
                     {"descriptor_length", w.descriptor_length},
                     {"mean_input_size_mb", w.mean_input_size},
                     {"input_size_sigma", w.input_size_sigma},
                     {"mean_complexity", w.mean_complexity},
                     {"complexity_sigma", w.complexity_sigma},
                     {"mean_output_size_mb", w.mean_output_size}};
  doc["simulation"] = {{"window_s", t.window_length ? oj(*t.window_length) : oj()},
                       {"lookup_cost_s", t.lookup_cost},
                       {"reuse_capacity", t.reuse_capacity},
                       {"replica_quota", t.replica_quota},
                       {"gain_sign", t.gain_sign == GainSign::Literal ? "literal" : "subtractive"},
                       {"neighbor_queue_limit", t.neighbor_queue_limit},
                       {"range_policy", t.range_policy == RangePolicy::Strict ? "strict" : "relaxed"}};
  doc["baselines"] = {
      {"ga", {{"population", t.ga.population},
              {"generations", t.ga.generations},
              {"mutation_rate", t.ga.mutation_rate},
              {"tournament", t.ga.tournament}}},
      {"sa", {{"initial_temperature", t.sa.initial_temperature ? oj(*t.sa.initial_temperature) : oj()},
              {"cooling", t.sa.cooling},
              {"iterations", t.sa.iterations}}}};
  doc["schemes"] = oj::array();
  for (const auto& s : c.schemes) doc["schemes"].push_back(s.name());
  doc["trials"] = c.trials;
  doc["seed"] = c.seed;
  doc["output_dir"] = c.output_dir.string();
  return doc;
}

TrialConfig trial_config(const ScenarioConfig& c, const Scheme& scheme, std::size_t trial) {
  TrialConfig t = c.trial;
  t.scheme = scheme;
  t.seed = c.seed + trial;
  t.workload.seed = c.seed + trial;
  return t;
}

std::vector<Task> trial_trace(const ScenarioConfig& c, std::size_t trial) {
  if (c.trace_path) return load_trace(*c.trace_path);
  SynthParams p = c.trial.workload;
  p.seed = c.seed + trial;
  return synth_trace(p);
}

}  // namespace whistle
