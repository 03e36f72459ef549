#pragma once

#include <cstdint>
#include <functional>

#include "taxai/distribution.hpp"
#include "taxai/environment.hpp"
#include "taxai/params.hpp"

namespace taxai::calibration {

struct BisectionOptions {
  double low = 1.0;
  double high = 1e6;
  /// Stop once |ratio - target| / target falls below this.
  double relative_tolerance = 1e-4;
  int max_iterations = 200;
};

struct BisectionResult {
  double root = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Finds x in [low, high] with f(x) close to target, bisecting in log x.
/// f must be monotone on the interval (either direction). Throws
/// NoBracketError when target is not between f(low) and f(high).
[[nodiscard]] BisectionResult bisect_log(const std::function<double(double)>& f, double target,
                                         const BisectionOptions& options = {});

struct BurnInOptions {
  int steps = 20;
  double savings_ratio = 0.5;
  double hours_fraction = 0.5;
};

/// Burn-in average of total wealth over burn-in average of total income in
/// a free-market economy where every household plays the fixed mid-range
/// action. Terminal conditions other than numeric failure are ignored.
[[nodiscard]] double wealth_income_ratio(const ModelParams& params, const InitialDistribution& dist,
                                         std::uint64_t seed, const BurnInOptions& burn_in = {});

struct CalibrationResult {
  double h_max = 0.0;
  double ratio = 0.0;
  int iterations = 0;
};

/// Bisection over h_max so that wealth_income_ratio hits target_ratio.
[[nodiscard]] CalibrationResult calibrate_hmax(const ModelParams& params,
                                               const InitialDistribution& dist,
                                               double target_ratio, std::uint64_t seed,
                                               const BisectionOptions& options = {},
                                               const BurnInOptions& burn_in = {});

}  // namespace taxai::calibration
