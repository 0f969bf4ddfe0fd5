#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "whistle/cli.hpp"
#include "whistle/report.hpp"

namespace whistle {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("whistle_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli_main(args, out_, err_);
  }

  std::string write_config(const std::string& schemes, double redundancy = 0.8) {
    const auto path = dir_ / "scenario.json";
    std::ofstream(path) << R"({"workload": {"n_tasks": 1000, "redundancy": )" << redundancy
                        << R"(}, "schemes": )" << schemes << R"(, "trials": 1, "output_dir": ")"
                        << (dir_ / "out").string() << "\"}";
    return path.string();
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, UnknownFlagIsUsageError) {
  EXPECT_EQ(run({"compare", "--nope"}), kExitConfig);
  EXPECT_NE(err_.str().find("Usage"), std::string::npos);
  EXPECT_EQ(run({}), kExitConfig);
  EXPECT_EQ(run({"--help"}), kExitOk);
}

TEST_F(CliTest, BadConfigIsExitTwo) {
  const auto path = dir_ / "bad.json";
  std::ofstream(path) << R"({"edges": [{"quota": 99}]})";
  EXPECT_EQ(run({"simulate", "--config", path.string()}), kExitConfig);
  EXPECT_NE(err_.str().find("edges[0].quota"), std::string::npos);
}

TEST_F(CliTest, MissingTraceIsRuntimeError) {
  EXPECT_EQ(run({"simulate", "--config", write_config(R"(["cloud"])"), "--trace",
                 (dir_ / "absent.csv").string()}),
            kExitRuntime);
}

TEST_F(CliTest, GenTraceIsDeterministic) {
  const auto a = dir_ / "a.csv";
  const auto b = dir_ / "b.csv";
  ASSERT_EQ(run({"gen-trace", "--n", "100", "--seed", "7", "--out", a.string()}), kExitOk);
  ASSERT_EQ(run({"gen-trace", "--n", "100", "--seed", "7", "--out", b.string()}), kExitOk);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
}

TEST_F(CliTest, SimulateCloudHasNoUtilization) {
  ASSERT_EQ(run({"simulate", "--config", write_config(R"(["whistle"])"), "--scheme", "cloud"}), kExitOk)
      << err_.str();
  std::ifstream in(dir_ / "out" / "simulate.csv");
  const auto reports = read_report(in, ReportFormat::Csv);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].scheme, "cloud");
  EXPECT_EQ(reports[0].resource_utilization, 0.0);
  EXPECT_EQ(reports[0].load_cloud, 1.0);
}

TEST_F(CliTest, CompareShowsPositiveReductions) {
  ASSERT_EQ(run({"compare", "--config", write_config(R"(["cloud", "whistle"])")}), kExitOk) << err_.str();
  std::ifstream in(dir_ / "out" / "comparison.json");
  const auto reports = read_report(in, ReportFormat::Json);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[1].scheme, "whistle");
  EXPECT_GT(reports[1].comm_reduction, 0.0);
  EXPECT_GT(reports[1].comp_reduction, 0.0);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "whistle_tasks.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "whistle_windows.csv"));
}

TEST_F(CliTest, ComparisonIndependentOfJobs) {
  const auto config = load_scenario(write_config(R"(["cloud", "greedy", "whistle"])"));
  auto c = config;
  c.trials = 3;
  c.trial.workload.n_tasks = 1000;
  std::ostringstream a, b;
  write_report(a, run_comparison(c, 1), ReportFormat::Csv);
  write_report(b, run_comparison(c, 4), ReportFormat::Csv);
  EXPECT_EQ(a.str(), b.str());
}

TEST_F(CliTest, InspectDumpsTables) {
  ASSERT_EQ(run({"inspect", "--config", write_config(R"(["whistle"])")}), kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("# edge 0"), std::string::npos);
}

}  // namespace
}  // namespace whistle
