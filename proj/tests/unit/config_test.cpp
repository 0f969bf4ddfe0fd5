#include <gtest/gtest.h>

#include "whistle/config.hpp"
#include "whistle/errors.hpp"

namespace whistle {
namespace {

using json = nlohmann::json;

json minimal() {
  return json::parse(R"({
    "edges": [{"id": 0, "quota": 8, "neighbors": [1]}, {"id": 1, "quota": 6, "neighbors": [0]}],
    "workload": {"n_tasks": 1000, "popularity": {"zipf": 1.2}},
    "schemes": ["cloud", "greedy+reuse", "whistle"],
    "trials": 2,
    "seed": 5
  })");
}

std::string field_of(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

TEST(Scenario, ParsesAndDefaults) {
  const auto c = parse_scenario(minimal());
  ASSERT_EQ(c.trial.edges.size(), 2u);
  EXPECT_EQ(c.trial.edges[1].service_quota, 6);
  EXPECT_EQ(c.trial.edges[0].neighbors, (std::vector<EdgeId>{EdgeId{1}}));
  EXPECT_EQ(c.trial.workload.popularity.kind, PopularityKind::Zipf);
  EXPECT_EQ(c.schemes.size(), 3u);
  EXPECT_EQ(c.schemes[1], (Scheme{SchemeKind::Greedy, true}));
  EXPECT_EQ(c.trials, 2u);
  EXPECT_EQ(c.trial.network.hops_to_cloud, 7);

  const auto defaults = parse_scenario(json::object());
  EXPECT_EQ(defaults.schemes, Scheme::all());
  EXPECT_EQ(defaults.trial.edges.size(), 1u);
}

TEST(Scenario, ErrorsNameTheField) {
  auto doc = minimal();
  doc["edges"][1]["quota"] = 3;
  EXPECT_EQ(field_of(doc), "edges[1].quota");
  doc = minimal();
  doc["edges"][0]["colour"] = "red";
  EXPECT_EQ(field_of(doc), "edges[0].colour");
  doc = minimal();
  doc["workload"]["n_tasks"] = "many";
  EXPECT_EQ(field_of(doc), "workload.n_tasks");
  doc = minimal();
  doc["schemes"] = json::array({"optimal"});
  EXPECT_EQ(field_of(doc), "schemes");
  doc = minimal();
  doc["bogus"] = 1;
  EXPECT_EQ(field_of(doc), "bogus");
}

TEST(Scenario, NormalisedDocumentReparses) {
  const auto c = parse_scenario(minimal());
  const auto doc = scenario_to_json(c);
  const auto again = parse_scenario(json::parse(doc.dump()));
  EXPECT_EQ(scenario_to_json(again).dump(), doc.dump());
}

TEST(Scenario, TrialSeedsAndTraces) {
  const auto c = parse_scenario(minimal());
  const auto t1 = trial_config(c, c.schemes[2], 1);
  EXPECT_EQ(t1.seed, 6u);
  EXPECT_EQ(t1.scheme, c.schemes[2]);
  const auto a = trial_trace(c, 0);
  const auto b = trial_trace(c, 1);
  ASSERT_EQ(a.size(), 1000u);
  EXPECT_NE(a.front().arrival_time, b.front().arrival_time);
  EXPECT_EQ(trial_trace(c, 1).back().arrival_time, b.back().arrival_time);
}

}  // namespace
}  // namespace whistle
