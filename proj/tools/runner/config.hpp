#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taxai/baselines.hpp"
#include "taxai/bmfac/bmfac.hpp"
#include "taxai/calibration.hpp"
#include "taxai/environment.hpp"
#include "taxai/ga.hpp"

namespace taxai::runner {

/// Everything a run needs. Precedence: built-in defaults, then the config
/// file, then command-line flags.
struct RunConfig {
  std::string subcommand = "simulate";

  // [model] + [policy] bounds + [run] environment knobs
  EnvConfig env;

  // [calibration]
  std::string distribution = "quantile_table";
  std::filesystem::path table_csv;  // empty: bundled synthetic table
  double target_ratio = 6.6;
  calibration::BisectionOptions bisection;
  calibration::BurnInOptions burn_in;

  // [policy]
  std::string gov_policy = "free";
  std::string hh_policy = "random";
  GovernmentAction fixed_government = baselines::free_market_action();
  HouseholdAction fixed_household{0.5, 0.5};
  baselines::HeathcoteConfig heathcote;
  std::filesystem::path checkpoint;

  // [ga]
  ga::PolicySearchConfig ga;

  // [bmfac]
  bmfac::BmfacConfig bmfac;
  int bmfac_epochs = 30;
  int bmfac_eval_episodes = 10;

  // [run]
  std::uint64_t seed = 0;
  int num_seeds = 1;
  int episodes = 1;
  std::filesystem::path out = "taxai-out";
  std::vector<int> bench_sizes{10, 100, 1000, 10000};
  int bench_episodes = 3;
  int bench_steps = 100;
};

/// Applies a parsed config file on top of `cfg`. Unknown sections or keys
/// raise ConfigError naming the offending key.
void apply_json(RunConfig& cfg, const nlohmann::json& doc);

[[nodiscard]] RunConfig load_config_file(const std::filesystem::path& path);

/// Fully resolved configuration, suitable for re-running from the manifest.
[[nodiscard]] nlohmann::json to_json(const RunConfig& cfg);

/// Rebuilds cfg.env.initial from the calibration section.
void resolve_distribution(RunConfig& cfg);

/// Checks every component; throws ConfigError.
void validate(const RunConfig& cfg);

}  // namespace taxai::runner
