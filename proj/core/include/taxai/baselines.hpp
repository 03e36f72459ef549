#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "taxai/environment.hpp"
#include "taxai/seed.hpp"

namespace taxai {

/// Government policy interface used by rollouts and the CLI.
class GovernmentPolicy {
 public:
  virtual ~GovernmentPolicy() = default;
  virtual void reset(std::uint64_t /*seed*/) {}
  virtual GovernmentAction act(const Observation& obs) = 0;
};

/// Household policy interface; `out` has one slot per household.
class HouseholdPolicy {
 public:
  virtual ~HouseholdPolicy() = default;
  virtual void reset(std::uint64_t /*seed*/) {}
  virtual void act(const Observation& obs, const GovernmentAction& gov,
                   std::span<HouseholdAction> out) = 0;
};

namespace baselines {

inline constexpr double kFreeMarketSpendingRatio = 0.189;

/// Zero taxes, spending ratio 0.189.
[[nodiscard]] GovernmentAction free_market_action();

/// p ~ U(eps, 1 - eps), hours_fraction ~ U(0, 1).
[[nodiscard]] HouseholdAction random_household_action(std::mt19937_64& rng, double savings_epsilon);

/// Every government component uniform within its bounds.
[[nodiscard]] GovernmentAction random_government_action(std::mt19937_64& rng,
                                                        const ActionBounds& bounds);

/// Components of log e_t = alpha_t + eps_t in the Heathcote-Storesletten-
/// Violante household problem, with eps_t = kappa_t + theta_t.
struct HeathcoteShock {
  double alpha_perm = 0.0;
  double kappa = 0.0;
  double theta_shock = 0.0;
  double omega_innov = 0.0;
  double phi_pref = 0.0;

  [[nodiscard]] double eps_trans() const { return kappa + theta_shock; }
};

struct HeathcoteAction {
  double consumption_share = 1.0;
  double hours = 1.0;
};

/// M^a for Gaussian theta_t with standard deviation sigma_theta, using the
/// log-MGF E[exp(k theta)] = exp(k^2 sigma^2 / 2).
[[nodiscard]] double heathcote_m_a(double theta, double gamma, double sigma_theta);

/// Closed-form consumption-to-income share and hours.
[[nodiscard]] HeathcoteAction heathcote_household_action(const HeathcoteShock& shock,
                                                         const ModelParams& params,
                                                         double sigma_theta);

struct HeathcoteConfig {
  double sigma_theta = 0.2;
  /// p = 1 - min(0.999, consumption_share * normalizer)
  double consumption_normalizer = 0.1;
  /// hours_fraction = clamp(hours_scale * h^a, 0, 1)
  double hours_scale = 0.5;
};

/// Converts the analytic shares into the environment's (p, hours fraction).
[[nodiscard]] HouseholdAction heathcote_to_env_action(const HeathcoteAction& a,
                                                      const HeathcoteConfig& config,
                                                      double savings_epsilon);

}  // namespace baselines

class FixedGovernmentPolicy final : public GovernmentPolicy {
 public:
  explicit FixedGovernmentPolicy(GovernmentAction action) : action_(action) {}
  GovernmentAction act(const Observation&) override { return action_; }

 private:
  GovernmentAction action_;
};

class RandomGovernmentPolicy final : public GovernmentPolicy {
 public:
  explicit RandomGovernmentPolicy(ActionBounds bounds) : bounds_(bounds) {}
  void reset(std::uint64_t seed) override { rng_.seed(seed); }
  GovernmentAction act(const Observation&) override;

 private:
  ActionBounds bounds_;
  std::mt19937_64 rng_;
};

class FixedHouseholdPolicy final : public HouseholdPolicy {
 public:
  explicit FixedHouseholdPolicy(HouseholdAction action) : action_(action) {}
  void act(const Observation&, const GovernmentAction&, std::span<HouseholdAction> out) override;

 private:
  HouseholdAction action_;
};

class RandomHouseholdPolicy final : public HouseholdPolicy {
 public:
  explicit RandomHouseholdPolicy(double savings_epsilon = 1e-6) : eps_(savings_epsilon) {}
  void reset(std::uint64_t seed) override { rng_.seed(seed); }
  void act(const Observation&, const GovernmentAction&, std::span<HouseholdAction> out) override;

 private:
  double eps_;
  std::mt19937_64 rng_;
};

/// alpha_t = log e of the observed productivity, theta_t ~ N(0, sigma_theta)
/// drawn per household and step, kappa = phi = 0.
class HeathcoteHouseholdPolicy final : public HouseholdPolicy {
 public:
  HeathcoteHouseholdPolicy(ModelParams params, baselines::HeathcoteConfig config,
                           double savings_epsilon = 1e-6)
      : params_(params), config_(config), eps_(savings_epsilon) {}
  void reset(std::uint64_t seed) override { rng_.seed(seed); }
  void act(const Observation& obs, const GovernmentAction&, std::span<HouseholdAction> out) override;

 private:
  ModelParams params_;
  baselines::HeathcoteConfig config_;
  double eps_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Per-episode indicators: years survived plus per-step averages.
struct EpisodeSummary {
  int years = 0;
  double mean_social_welfare = 0.0;
  double per_capita_gdp = 0.0;
  double wealth_gini = 0.0;
  double income_gini = 0.0;
  double total_gdp = 0.0;
  double total_government_reward = 0.0;
  /// utility averaged over households and steps
  double mean_household_reward = 0.0;
  /// per-household utility summed over the episode, averaged over households
  double total_household_reward = 0.0;
  std::optional<DoneReason> done_reason;
};

using StepObserver = std::function<void(const StepResult&)>;

/// Resets env with `seed`, resets both policies with derived seeds and
/// plays until done.
EpisodeSummary run_episode(Environment& env, GovernmentPolicy& gov, HouseholdPolicy& households,
                           std::uint64_t seed, const StepObserver& observer = {});

}  // namespace taxai
