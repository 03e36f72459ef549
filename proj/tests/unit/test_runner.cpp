#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "runner/config.hpp"
#include "runner/runner.hpp"
#include "taxai/errors.hpp"

namespace {

using namespace taxai;
using namespace taxai::runner;
using nlohmann::json;

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("taxai_runner_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Config, RejectsUnknownKeysAndSections) {
  RunConfig c;
  EXPECT_THROW(apply_json(c, json::parse(R"({"model": {"alpah": 0.3}})")), ConfigError);
  EXPECT_THROW(apply_json(c, json::parse(R"({"modle": {}})")), ConfigError);
  try {
    apply_json(c, json::parse(R"({"run": {"sed": 1}})"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("run.sed"), std::string::npos);
  }
  EXPECT_THROW(apply_json(c, json::parse(R"({"model": {"alpha": "x"}})")), ConfigError);
}

TEST(Config, AppliesValues) {
  RunConfig c;
  apply_json(c, json::parse(R"({"model": {"n_households": 7, "alpha": 0.4},
                                 "policy": {"government": "fixed", "fixed_government": [0.1, 0.2, 0.03, 0.04, 0.05]},
                                 "run": {"seed": 42, "task": "gdp"}})"));
  EXPECT_EQ(c.env.model.n_households, 7);
  EXPECT_EQ(c.env.model.alpha, 0.4);
  EXPECT_EQ(c.gov_policy, "fixed");
  EXPECT_EQ(c.fixed_government.xi, 0.2);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.env.task, GovernmentTask::Gdp);
}

TEST(Config, JsonRoundTrip) {
  RunConfig c;
  c.env.model.n_households = 13;
  c.ga.ga.pop_size = 17;
  c.bmfac.hidden_size = 9;
  c.bench_sizes = {5, 6};
  c.out = "somewhere";
  const json doc = to_json(c);
  RunConfig back;
  apply_json(back, doc);
  EXPECT_EQ(to_json(back), doc);
  EXPECT_EQ(back.env.model.n_households, 13);
  EXPECT_EQ(back.ga.ga.pop_size, 17);
}

TEST(Config, ShippedConfigsLoadAndValidate) {
  for (const char* name : {"default.json", "stable.json"}) {
    auto c = load_config_file(std::filesystem::path(TAXAI_CONFIG_DIR) / name);
    resolve_distribution(c);
    EXPECT_NO_THROW(validate(c)) << name;
  }
  const auto defaults = load_config_file(std::filesystem::path(TAXAI_CONFIG_DIR) / "default.json");
  EXPECT_EQ(to_json(defaults), to_json(RunConfig{}));
}

TEST(Config, ParseErrorsAreConfigErrors) {
  const auto p = scratch("bad.json");
  std::ofstream(p) << "{ \"model\": ";
  EXPECT_THROW((void)load_config_file(p), ConfigError);
  EXPECT_THROW((void)load_config_file(scratch("missing.json")), ConfigError);
}

TEST(Config, ValidateCatchesBadPolicies) {
  RunConfig c;
  resolve_distribution(c);
  EXPECT_NO_THROW(validate(c));
  auto bad = c;
  bad.gov_policy = "oracle";
  EXPECT_THROW(validate(bad), ConfigError);
  bad = c;
  bad.hh_policy = "bmfac";  // no checkpoint
  EXPECT_THROW(validate(bad), ConfigError);
  bad = c;
  bad.episodes = 0;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = c;
  bad.env.model.alpha = 1.5;
  EXPECT_THROW(validate(bad), ConfigError);
}

TEST(Config, DistributionResolution) {
  RunConfig c;
  apply_json(c, json::parse(R"({"calibration": {"distribution": "point_mass", "point_value": 12}})"));
  resolve_distribution(c);
  EXPECT_EQ(c.env.initial.kind, DistributionKind::PointMass);
  EXPECT_EQ(c.env.initial.point_value, 12.0);
  c.distribution = "triangular";
  EXPECT_THROW(resolve_distribution(c), ConfigError);
}

RunConfig tiny_simulation(const std::filesystem::path& out) {
  RunConfig c;
  c.env.model.n_households = 20;
  c.env.model.episode_max_steps = 15;
  c.gov_policy = "fixed";
  c.hh_policy = "fixed";
  c.fixed_government = stable_government_action();
  c.fixed_household = stable_household_action();
  c.num_seeds = 2;
  c.episodes = 2;
  c.out = out;
  resolve_distribution(c);
  return c;
}

TEST(Simulate, WritesReproducibleOutputs) {
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  run_simulate(tiny_simulation(a));
  run_simulate(tiny_simulation(b));
  for (const char* f : {"metrics_seed0_ep0.csv", "metrics_seed1_ep1.csv", "summary.csv", "summary_stats.csv",
                        "manifest.json"}) {
    ASSERT_TRUE(std::filesystem::exists(a / f)) << f;
  }
  EXPECT_EQ(slurp(a / "metrics_seed1_ep1.csv"), slurp(b / "metrics_seed1_ep1.csv"));
  EXPECT_EQ(slurp(a / "summary.csv"), slurp(b / "summary.csv"));
  const auto manifest = json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest.at("subcommand"), "simulate");
  EXPECT_TRUE(manifest.contains("hardware"));
  EXPECT_EQ(manifest.at("config").at("run").at("episodes"), 2);
}

TEST(Bench, ThroughputIsPositive) {
  EnvConfig e;
  const auto t = measure_throughput(e, 10, 2, 20, 0);
  EXPECT_EQ(t.households, 10u);
  EXPECT_GT(t.mean, 0.0);
  EXPECT_EQ(t.per_episode.size(), 2u);
}

}  // namespace
