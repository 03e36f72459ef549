#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "taxai/baselines.hpp"
#include "taxai/econ.hpp"

namespace {

using namespace taxai;
using namespace taxai::baselines;

TEST(FreeMarket, ZeroTaxes) {
  const auto a = free_market_action();
  EXPECT_EQ(a.tau, 0.0);
  EXPECT_EQ(a.xi, 0.0);
  EXPECT_EQ(a.tau_a, 0.0);
  EXPECT_EQ(a.xi_a, 0.0);
  EXPECT_EQ(a.spending_ratio, 0.189);
  const TaxSchedule s{a.tau, a.xi, a.tau_a, a.xi_a};
  for (double x : {0.0, 1.0, 1e3, 1e9}) {
    EXPECT_EQ(econ::income_tax(x, s), 0.0);
    EXPECT_EQ(econ::asset_tax(x, s), 0.0);
  }
}

TEST(RandomHousehold, BoundsDeterminismMean) {
  std::mt19937_64 a(5), b(5);
  double sum = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const auto x = random_household_action(a, 1e-3);
    const auto y = random_household_action(b, 1e-3);
    ASSERT_EQ(x.savings_ratio, y.savings_ratio);
    ASSERT_EQ(x.hours_fraction, y.hours_fraction);
    ASSERT_GE(x.savings_ratio, 1e-3);
    ASSERT_LE(x.savings_ratio, 1 - 1e-3);
    ASSERT_GE(x.hours_fraction, 0.0);
    ASSERT_LE(x.hours_fraction, 1.0);
    sum += x.savings_ratio;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.01);
}

TEST(RandomGovernment, WithinBounds) {
  std::mt19937_64 rng(1);
  ActionBounds b;
  for (int k = 0; k < 1000; ++k) {
    const auto a = random_government_action(rng, b);
    const auto v = a.to_array();
    const Interval iv[] = {b.tau, b.xi, b.tau_a, b.xi_a, b.spending_ratio};
    for (int j = 0; j < 5; ++j) {
      ASSERT_GE(v[j], iv[j].low);
      ASSERT_LE(v[j], iv[j].high);
    }
  }
}

ModelParams unit_theta() {
  ModelParams p;
  p.theta = 1.0;
  p.gamma_frisch = 2.0;
  return p;
}

TEST(Heathcote, ZeroShocks) {
  const auto a = heathcote_household_action({}, ModelParams{}, 0.0);
  EXPECT_DOUBLE_EQ(a.consumption_share, 1.0);
  EXPECT_DOUBLE_EQ(a.hours, 1.0);
}

TEST(Heathcote, CoefficientArithmetic) {
  HeathcoteShock s;
  s.alpha_perm = std::log(2.0);
  const auto a = heathcote_household_action(s, unit_theta(), 0.0);
  EXPECT_NEAR(a.consumption_share, 2.0, 1e-12);
  EXPECT_NEAR(a.hours, 1.0, 1e-12);
}

TEST(Heathcote, HoursIndependentOfPermanentComponent) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  for (int k = 0; k < 1000; ++k) {
    HeathcoteShock s;
    s.theta_shock = 0.3 * n01(rng);
    s.kappa = 0.1 * n01(rng);
    const double h0 = heathcote_household_action(s, unit_theta(), 0.2).hours;
    s.alpha_perm = 3.0 * n01(rng);
    ASSERT_EQ(heathcote_household_action(s, unit_theta(), 0.2).hours, h0);
  }
}

TEST(Heathcote, InsuranceTermMatchesMonteCarlo) {
  const ModelParams p;
  const double k = (1 + p.gamma_frisch) / p.gamma_frisch;
  for (double sigma : {0.1, 0.2, 0.5}) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> theta(0.0, sigma);
    double acc = 0.0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) acc += std::exp(k * theta(rng));
    const double mc = p.gamma_frisch / (p.gamma_frisch + p.theta) * std::log(acc / draws);
    EXPECT_NEAR(heathcote_m_a(p.theta, p.gamma_frisch, sigma) / mc, 1.0, 0.01) << sigma;
  }
}

TEST(Heathcote, AdapterClampsIntoActionSpace) {
  HeathcoteConfig c;
  const auto mid = heathcote_to_env_action({1.0, 1.0}, c, 1e-6);
  EXPECT_DOUBLE_EQ(mid.savings_ratio, 0.9);
  EXPECT_DOUBLE_EQ(mid.hours_fraction, 0.5);
  const auto big = heathcote_to_env_action({1e6, 1e6}, c, 1e-2);
  EXPECT_DOUBLE_EQ(big.savings_ratio, 1e-2);
  EXPECT_DOUBLE_EQ(big.hours_fraction, 1.0);
}

TEST(Episode, RunEpisodeAggregates) {
  EnvConfig cfg;
  cfg.model.n_households = 10;
  cfg.model.episode_max_steps = 20;
  Environment env(cfg);
  FixedGovernmentPolicy gov({0.6, 0.6, 0.2, 0.3, 0.1});
  FixedHouseholdPolicy hh({0.9, 0.3});
  int calls = 0;
  double gdp = 0.0;
  const auto s = run_episode(env, gov, hh, 1, [&](const StepResult& r) {
    ++calls;
    gdp += r.metrics.gdp;
  });
  EXPECT_EQ(s.years, calls);
  EXPECT_DOUBLE_EQ(s.total_gdp, gdp);
  EXPECT_TRUE(s.done_reason.has_value());
  EXPECT_NEAR(s.total_household_reward, s.mean_household_reward * s.years, 1e-9 * std::abs(s.total_household_reward) + 1e-12);

  // same seed, same summary
  const auto again = run_episode(env, gov, hh, 1);
  EXPECT_EQ(again.total_gdp, s.total_gdp);
  EXPECT_EQ(again.years, s.years);
}

TEST(Episode, RandomPoliciesAreSeeded) {
  EnvConfig cfg;
  cfg.model.n_households = 10;
  Environment env(cfg);
  RandomGovernmentPolicy gov(cfg.bounds);
  RandomHouseholdPolicy hh;
  const auto a = run_episode(env, gov, hh, 4);
  const auto b = run_episode(env, gov, hh, 4);
  EXPECT_EQ(a.total_gdp, b.total_gdp);
  HeathcoteHouseholdPolicy hc(cfg.model, {});
  const auto c = run_episode(env, gov, hc, 4);
  const auto d = run_episode(env, gov, hc, 4);
  EXPECT_EQ(c.total_gdp, d.total_gdp);
}

}  // namespace
