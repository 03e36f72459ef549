#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "config.hpp"

namespace taxai::runner {

/// A policy that survives a full episode for the bundled calibration:
/// strongly progressive taxes, moderate spending, high savings.
[[nodiscard]] GovernmentAction stable_government_action();
[[nodiscard]] HouseholdAction stable_household_action();

/// Owns whatever the policies reference (a loaded BMFAC agent).
struct PolicySet {
  std::unique_ptr<bmfac::Bmfac> agent;
  std::unique_ptr<GovernmentPolicy> government;
  std::unique_ptr<HouseholdPolicy> households;
};

/// Builds the policies named by cfg.gov_policy / cfg.hh_policy. "ga" runs the
/// policy search first; "bmfac" loads cfg.checkpoint.
[[nodiscard]] PolicySet make_policies(const RunConfig& cfg);

struct Throughput {
  std::size_t households = 0;
  double mean = 0.0;  // steps per second
  double sd = 0.0;
  std::vector<double> per_episode;
};

/// Times `steps` environment steps per episode (policy evaluation excluded)
/// with the stable fixed profile; resets are not timed.
[[nodiscard]] Throughput measure_throughput(EnvConfig env, std::size_t households, int episodes,
                                            int steps, std::uint64_t seed);

/// cpu model, logical cores, OpenMP threads, compiler.
[[nodiscard]] nlohmann::json hardware_info();

/// Writes manifest.json with the resolved config and build identity.
void write_manifest(const RunConfig& cfg, const std::filesystem::path& dir);

/// Per (seed, episode) metrics files plus summary.csv and summary_stats.csv.
void run_simulate(const RunConfig& cfg);
void run_train_bmfac(const RunConfig& cfg);
void run_calibrate(const RunConfig& cfg);
void run_bench(const RunConfig& cfg);

/// Dispatches on cfg.subcommand.
void run(const RunConfig& cfg);

}  // namespace taxai::runner
