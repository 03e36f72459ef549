#include "taxai/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace taxai {

namespace baselines {

GovernmentAction free_market_action() { return {0.0, 0.0, 0.0, 0.0, kFreeMarketSpendingRatio}; }

HouseholdAction random_household_action(std::mt19937_64& rng, double savings_epsilon) {
  std::uniform_real_distribution<double> p(savings_epsilon, 1.0 - savings_epsilon);
  std::uniform_real_distribution<double> h(0.0, 1.0);
  const double savings = p(rng);
  return {savings, h(rng)};
}

GovernmentAction random_government_action(std::mt19937_64& rng, const ActionBounds& bounds) {
  std::array<double, kGovernmentActionDim> v{};
  const auto ranges = bounds.government();
  for (std::size_t k = 0; k < v.size(); ++k) {
    std::uniform_real_distribution<double> u(ranges[k].low, ranges[k].high);
    v[k] = u(rng);
  }
  return GovernmentAction::from_array(v);
}

double heathcote_m_a(double theta, double gamma, double sigma_theta) {
  const double k = (1.0 + gamma) / gamma;
  return gamma / (gamma + theta) * k * k * sigma_theta * sigma_theta / 2.0;
}

HeathcoteAction heathcote_household_action(const HeathcoteShock& shock, const ModelParams& params,
                                           double sigma_theta) {
  const double theta = params.theta;
  const double gamma = params.gamma_frisch;
  const double m_a = heathcote_m_a(theta, gamma, sigma_theta);
  const double log_c = -shock.phi_pref + (1.0 + gamma) / (gamma + theta) * shock.alpha_perm + m_a;
  const double log_h = -shock.phi_pref + (1.0 - theta) / (gamma + theta) * shock.alpha_perm +
                       shock.eps_trans() / gamma - theta / gamma * m_a;
  return {std::exp(log_c), std::exp(log_h)};
}

HouseholdAction heathcote_to_env_action(const HeathcoteAction& a, const HeathcoteConfig& config,
                                        double savings_epsilon) {
  const double p = 1.0 - std::min(0.999, a.consumption_share * config.consumption_normalizer);
  return {std::clamp(p, savings_epsilon, 1.0 - savings_epsilon),
          std::clamp(config.hours_scale * a.hours, 0.0, 1.0)};
}

}  // namespace baselines

GovernmentAction RandomGovernmentPolicy::act(const Observation&) {
  return baselines::random_government_action(rng_, bounds_);
}

void FixedHouseholdPolicy::act(const Observation&, const GovernmentAction&,
                               std::span<HouseholdAction> out) {
  std::fill(out.begin(), out.end(), action_);
}

void RandomHouseholdPolicy::act(const Observation&, const GovernmentAction&,
                                std::span<HouseholdAction> out) {
  for (auto& a : out) a = baselines::random_household_action(rng_, eps_);
}

void HeathcoteHouseholdPolicy::act(const Observation& obs, const GovernmentAction&,
                                   std::span<HouseholdAction> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    baselines::HeathcoteShock shock;
    shock.alpha_perm = std::log(obs.household(i)[8]);
    shock.theta_shock = config_.sigma_theta * normal_(rng_);
    const auto analytic = baselines::heathcote_household_action(shock, params_, config_.sigma_theta);
    out[i] = baselines::heathcote_to_env_action(analytic, config_, eps_);
  }
}

EpisodeSummary run_episode(Environment& env, GovernmentPolicy& gov, HouseholdPolicy& households,
                           std::uint64_t seed, const StepObserver& observer) {
  Observation obs = env.reset(seed);
  gov.reset(derive_seed(seed, 101));
  households.reset(derive_seed(seed, 102));
  std::vector<HouseholdAction> actions(env.household_count());
  const auto n = static_cast<double>(env.household_count());

  EpisodeSummary s;
  double household_reward = 0.0;
  while (!env.done()) {
    const GovernmentAction g = gov.act(obs);
    households.act(obs, g, actions);
    StepResult r = env.step(g, actions);
    ++s.years;
    s.mean_social_welfare += r.metrics.social_welfare;
    s.per_capita_gdp += r.metrics.gdp / n;
    s.wealth_gini += r.metrics.wealth_gini;
    s.income_gini += r.metrics.income_gini;
    s.total_gdp += r.metrics.gdp;
    s.total_government_reward += r.rewards.government;
    for (double u : r.rewards.households) household_reward += u;
    s.done_reason = r.done_reason;
    if (observer) observer(r);
    obs = std::move(r.observation);
  }
  const double steps = s.years;
  s.mean_social_welfare /= steps;
  s.per_capita_gdp /= steps;
  s.wealth_gini /= steps;
  s.income_gini /= steps;
  s.mean_household_reward = household_reward / (steps * n);
  s.total_household_reward = household_reward / n;
  return s;
}

}  // namespace taxai
