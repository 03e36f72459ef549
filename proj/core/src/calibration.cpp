#include "taxai/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "taxai/baselines.hpp"
#include "taxai/errors.hpp"

namespace taxai::calibration {

BisectionResult bisect_log(const std::function<double(double)>& f, double target,
                           const BisectionOptions& options) {
  if (!(target > 0.0)) throw DomainError("bisect_log: target must be > 0");
  if (!(options.low > 0.0) || !(options.high > options.low)) {
    throw DomainError("bisect_log: need 0 < low < high");
  }
  double lo = std::log(options.low);
  double hi = std::log(options.high);
  double f_lo = f(options.low);
  const double f_hi = f(options.high);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi) ||
      (f_lo - target) * (f_hi - target) > 0.0) {
    throw NoBracketError("bisect_log: target " + std::to_string(target) + " not within [" +
                         std::to_string(f_lo) + ", " + std::to_string(f_hi) + "]");
  }
  auto close_enough = [&](double v) {
    return std::abs(v - target) <= options.relative_tolerance * target;
  };
  if (close_enough(f_lo)) return {options.low, f_lo, 0};
  if (close_enough(f_hi)) return {options.high, f_hi, 0};

  BisectionResult best{std::exp(lo), f_lo, 0};
  for (int it = 1; it <= options.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double x = std::exp(mid);
    const double v = f(x);
    best = {x, v, it};
    if (close_enough(v)) return best;
    if ((v - target) * (f_lo - target) > 0.0) {
      lo = mid;
      f_lo = v;
    } else {
      hi = mid;
    }
  }
  return best;
}

double wealth_income_ratio(const ModelParams& params, const InitialDistribution& dist,
                           std::uint64_t seed, const BurnInOptions& burn_in) {
  if (burn_in.steps < 1) throw ConfigError("burn-in needs at least one step");
  EnvConfig cfg;
  cfg.model = params;
  cfg.model.episode_max_steps = std::max(params.episode_max_steps, burn_in.steps);
  cfg.initial = dist;
  cfg.enforce_terminal = false;
  Environment env(cfg);
  env.reset(seed);

  const std::vector<HouseholdAction> actions(env.household_count(),
                                             {burn_in.savings_ratio, burn_in.hours_fraction});
  const GovernmentAction free_market = baselines::free_market_action();
  double sum_wealth = 0.0;
  double sum_income = 0.0;
  for (int t = 0; t < burn_in.steps; ++t) {
    double wealth = 0.0;
    for (double a : env.assets()) wealth += a;
    const auto result = env.step(free_market, actions);
    double income = 0.0;
    for (double i : env.incomes()) income += i;
    if (result.done_reason == DoneReason::NumericOverflow || !(income > 0.0)) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    sum_wealth += wealth;
    sum_income += income;
    if (result.done) break;
  }
  return sum_wealth / sum_income;
}

CalibrationResult calibrate_hmax(const ModelParams& params, const InitialDistribution& dist,
                                 double target_ratio, std::uint64_t seed,
                                 const BisectionOptions& options, const BurnInOptions& burn_in) {
  if (!(target_ratio > 0.0)) throw DomainError("calibrate_hmax: target_ratio must be > 0");
  auto ratio_at = [&](double h_max) {
    ModelParams p = params;
    p.h_max = h_max;
    return wealth_income_ratio(p, dist, seed, burn_in);
  };
  const auto r = bisect_log(ratio_at, target_ratio, options);
  return {r.root, r.value, r.iterations};
}

}  // namespace taxai::calibration
