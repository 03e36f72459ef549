#include <cmath>

#include <gtest/gtest.h>

#include "taxai/calibration.hpp"
#include "taxai/errors.hpp"

namespace {

using namespace taxai;
using namespace taxai::calibration;

TEST(Bisection, FindsLogRoot) {
  const auto r = bisect_log([](double x) { return 1.0 / std::sqrt(x); }, 0.01, {1.0, 1e6, 1e-8, 200});
  EXPECT_NEAR(r.root, 1e4, 1e4 * 1e-6);
  const auto up = bisect_log([](double x) { return std::log(x); }, 2.0, {1.0, 100.0, 1e-10, 200});
  EXPECT_NEAR(up.root, std::exp(2.0), 1e-6);
}

TEST(Bisection, NoBracket) {
  EXPECT_THROW((void)bisect_log([](double x) { return x; }, 1e9, {1.0, 10.0, 1e-4, 50}), NoBracketError);
  EXPECT_THROW((void)bisect_log([](double) { return std::nan(""); }, 1.0, {1.0, 10.0, 1e-4, 50}),
               NoBracketError);
}

// One household, no super-stars: with hours fraction f the burn-in income
// only depends on h_max through W e f h_max, so the target ratio has a
// closed-form root when the wealth path is frozen (p close to one and zero
// depreciation of wealth through taxes).
TEST(Calibration, AnalyticSingleHousehold) {
  ModelParams p;
  p.n_households = 1;
  p.p_super = 0.0;
  p.sigma_e = 0.0;  // e = 1 forever
  const auto dist = InitialDistribution::point_mass(1000.0);
  BurnInOptions burn{1, 0.5, 0.5};
  // one step: K = 1000, L = 0.5 h, W = (1-a)(K/L)^a, income = W L + r a
  // ratio = a / income, so income = 1000 / target.
  const double target = 6.6;
  const double a = p.alpha, income = 1000.0 / target;
  // (1-a) K^a L^(1-a) = income - r K
  const double labor = std::pow((income - p.r_save * 1000.0) / ((1 - a) * std::pow(1000.0, a)), 1.0 / (1 - a));
  const double h_expected = labor / 0.5;
  const auto r = calibrate_hmax(p, dist, target, 0, {1.0, 1e6, 1e-9, 300}, burn);
  EXPECT_NEAR(r.h_max, h_expected, 1e-6 * h_expected);
  EXPECT_NEAR(r.ratio, target, 1e-6);
}

TEST(Calibration, DoublingAssetsRaisesRatio) {
  ModelParams p;
  const auto table = InitialDistribution::quantile_table(synthetic_scf_quantiles());
  auto doubled = table;
  for (auto& k : doubled.table) k.asset *= 2.0;
  EXPECT_GT(wealth_income_ratio(p, doubled, 0), wealth_income_ratio(p, table, 0));
}

TEST(Calibration, HitsTargetWithinTwoPercentAndIsReproducible) {
  ModelParams p;
  const auto dist = InitialDistribution::quantile_table(synthetic_scf_quantiles());
  const auto a = calibrate_hmax(p, dist, 6.6, 0);
  const auto b = calibrate_hmax(p, dist, 6.6, 0);
  EXPECT_LE(std::abs(a.ratio - 6.6) / 6.6, 0.02);
  EXPECT_LE(std::abs(wealth_income_ratio([&] { auto q = p; q.h_max = a.h_max; return q; }(), dist, 0) - 6.6) / 6.6, 0.02);
  EXPECT_EQ(a.h_max, b.h_max);
  // the shipped default is this calibration
  EXPECT_NEAR(ModelParams{}.h_max, a.h_max, 0.01);
}

TEST(Calibration, RejectsBadTarget) {
  ModelParams p;
  const auto dist = InitialDistribution::point_mass(10.0);
  EXPECT_THROW((void)calibrate_hmax(p, dist, -1.0, 0), DomainError);
  EXPECT_THROW((void)calibrate_hmax(p, dist, 1e9, 0), NoBracketError);
}

}  // namespace
