#pragma once

#include <cstdint>

namespace taxai {

/// What "average ability" the super-star multiplier is applied to.
enum class SuperStarReference : std::uint8_t {
  PopulationMean,  ///< contemporaneous mean productivity of normal-regime households
  Unconditional,   ///< the AR(1) fixed point, e = 1
};

/// Structural constants of the economy. Defaults are the assigned values of
/// the model; h_max defaults to the value calibrated for the bundled
/// synthetic wealth table (see data/scf_synthetic_quantiles.csv).
struct ModelParams {
  double theta = 1.0;         // CRRA coefficient
  double gamma_frisch = 2.0;  // inverse Frisch elasticity
  double beta = 0.975;        // discount factor per step
  double alpha = 1.0 / 3.0;   // capital elasticity
  double delta = 0.06;        // depreciation rate per step
  double r_save = 0.04;       // return to savings per step
  double tau_s = 0.065;       // consumption tax rate
  double p_super = 2.2e-6;    // normal -> super-star transition probability
  double q_super = 0.990;     // probability of remaining super-star
  double rho_e = 0.982;       // AR(1) persistence of log productivity
  double sigma_e = 0.200;     // AR(1) shock volatility
  double e_bar = 504.3;       // super-star ability multiple
  double wealth_income_ratio_target = 6.6;
  double h_max = 5411.75;
  int episode_max_steps = 300;
  double gini_terminal_threshold = 0.8;
  int n_households = 100;
  SuperStarReference superstar_reference = SuperStarReference::PopulationMean;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;

  /// Variance of log productivity under the stationary AR(1) law.
  [[nodiscard]] double stationary_log_variance() const {
    return sigma_e * sigma_e / (1.0 - rho_e * rho_e);
  }
};

}  // namespace taxai
