#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gen.hpp"
#include "taxai/econ.hpp"
#include "taxai/errors.hpp"

namespace {

using namespace taxai;
using taxai::testing::Gen;
using taxai::testing::kCases;

TEST(ModelParams, DefaultsAreTheAssignedValues) {
  const ModelParams p;
  EXPECT_EQ(p.theta, 1.0);
  EXPECT_EQ(p.gamma_frisch, 2.0);
  EXPECT_EQ(p.beta, 0.975);
  EXPECT_EQ(p.alpha, 1.0 / 3.0);
  EXPECT_EQ(p.delta, 0.06);
  EXPECT_EQ(p.r_save, 0.04);
  EXPECT_EQ(p.tau_s, 0.065);
  EXPECT_EQ(p.p_super, 2.2e-6);
  EXPECT_EQ(p.q_super, 0.990);
  EXPECT_EQ(p.rho_e, 0.982);
  EXPECT_EQ(p.sigma_e, 0.200);
  EXPECT_EQ(p.e_bar, 504.3);
  EXPECT_EQ(p.wealth_income_ratio_target, 6.6);
  EXPECT_NO_THROW(p.validate());
}

TEST(ModelParams, RejectsBrokenInvariants) {
  auto bad = [](auto mutate) {
    ModelParams p;
    mutate(p);
    return p;
  };
  EXPECT_THROW(bad([](ModelParams& p) { p.beta = 1.0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](ModelParams& p) { p.alpha = 0.0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](ModelParams& p) { p.delta = 1.5; }).validate(), ConfigError);
  EXPECT_THROW(bad([](ModelParams& p) { p.tau_s = -0.1; }).validate(), ConfigError);
  EXPECT_THROW(bad([](ModelParams& p) { p.e_bar = 1.0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](ModelParams& p) { p.h_max = 0.0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](ModelParams& p) { p.n_households = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](ModelParams& p) { p.episode_max_steps = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](ModelParams& p) { p.sigma_e = -1.0; }).validate(), ConfigError);
}

TEST(IncomeTax, WorkedExamples) {
  EXPECT_DOUBLE_EQ(econ::income_tax(90, {0.2, 0.0, 0, 0}), 18.0);
  EXPECT_NEAR(econ::income_tax(91.6, {0.2, 0.05, 0, 0}), 30.1, 0.1);
  EXPECT_EQ(econ::income_tax(1234.5, {0, 0, 0, 0}), 0.0);
  EXPECT_EQ(econ::income_tax(0.0, {0.3, 0.4, 0, 0}), 0.0);
}

TEST(IncomeTax, DomainErrors) {
  EXPECT_THROW((void)econ::income_tax(-1.0, {0.2, 0, 0, 0}), DomainError);
  EXPECT_THROW((void)econ::income_tax(1.0, {0.2, 1.0, 0, 0}), DomainError);
  EXPECT_THROW((void)econ::income_tax(std::nan(""), {0.2, 0, 0, 0}), DomainError);
}

TEST(AssetTax, WorkedExamples) {
  EXPECT_NEAR(econ::asset_tax(1040.1, {0, 0, 0.5, 0.05}), 653.3, 0.2);
  EXPECT_EQ(econ::asset_tax(500.0, {0.4, 0.2, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(econ::asset_tax(100, {0, 0, 0.5, 0}), 50.0);
  EXPECT_THROW((void)econ::asset_tax(-5.0, {0, 0, 0.5, 0}), DomainError);
  EXPECT_THROW((void)econ::asset_tax(5.0, {0, 0, 0.5, 1.0}), DomainError);
}

TEST(TaxSchedule, Validity) {
  EXPECT_TRUE((TaxSchedule{0.2, 0.05, 0.5, 0.05}.valid()));
  EXPECT_FALSE((TaxSchedule{1.2, 0, 0, 0}.valid()));
  EXPECT_FALSE((TaxSchedule{0.2, 1.0, 0, 0}.valid()));
  EXPECT_FALSE((TaxSchedule{0.2, 0, -0.1, 0}.valid()));
}

TEST(HouseholdIncome, Examples) {
  // labor income 50 and 100 with W e h split as 1 x 50 x 1
  EXPECT_DOUBLE_EQ(econ::household_income(1.0, 50.0, 1.0, 0.04, 1000.0), 90.0);
  EXPECT_DOUBLE_EQ(econ::household_income(2.0, 50.0, 1.0, 0.04, 100.0), 104.0);
  EXPECT_EQ(econ::household_income(3.0, 1.5, 0.0, 0.04, 0.0), 0.0);
  EXPECT_THROW((void)econ::household_income(1.0, 1.0, -1.0, 0.04, 0.0), DomainError);
}

TEST(BudgetTransition, WorkedExamples) {
  const TaxSchedule flat{0.2, 0.0, 0.0, 0.0};
  const double tau_s = 0.065;
  for (auto [income, asset, expected] : {std::tuple{90.0, 1000.0, 1040.1}, {104.0, 100.0, 151.2}}) {
    const double x = econ::post_tax_resources(income, asset, flat);
    const double p = econ::savings_ratio_for_consumption(x, 30.0, tau_s);
    const auto out = econ::budget_transition(income, asset, p, flat, tau_s);
    EXPECT_NEAR(out.next_asset, expected, 0.1);
    EXPECT_NEAR(out.consumption, 30.0, 1e-9);
  }
  const auto half = econ::split_resources(100.0, 0.5, tau_s);
  EXPECT_DOUBLE_EQ(half.next_asset, 50.0);
  EXPECT_NEAR(half.consumption, 46.948, 1e-3);
  EXPECT_NEAR(1.065 * half.consumption + half.next_asset, 100.0, 1e-12);
}

TEST(BudgetTransition, Errors) {
  const TaxSchedule s{0.2, 0, 0, 0};
  EXPECT_THROW((void)econ::budget_transition(10, 10, 0.0, s, 0.065), DomainError);
  EXPECT_THROW((void)econ::budget_transition(10, 10, 1.0, s, 0.065), DomainError);
  EXPECT_THROW((void)econ::budget_transition(-1, 10, 0.5, s, 0.065), DomainError);
  // tau above one taxes more than the base
  EXPECT_THROW((void)econ::budget_transition(100, 100, 0.5, {1.5, 0, 1.5, 0}, 0.065),
               BankruptcyError);
  EXPECT_THROW((void)econ::savings_ratio_for_consumption(0.0, 1.0, 0.065), DomainError);
}

TEST(ProductivityStep, Examples) {
  const ModelParams p;
  const HouseholdState one{0.0, 1.0, Regime::Normal};
  EXPECT_DOUBLE_EQ(econ::productivity_step(one, 0.0, 0.5, 1.0, p).productivity, 1.0);
  const auto up = econ::productivity_step(one, 1.0, 0.5, 1.0, p);
  EXPECT_NEAR(up.productivity, 1.2214, 1e-4);
  EXPECT_EQ(up.regime, Regime::Normal);

  const HouseholdState star{0.0, 504.3, Regime::SuperStar};
  const auto stay = econ::productivity_step(star, 0.3, 0.5, 1.7, p);
  EXPECT_EQ(stay.regime, Regime::SuperStar);
  EXPECT_DOUBLE_EQ(stay.productivity, p.e_bar * 1.7);

  const auto leave = econ::productivity_step(star, 0.0, 0.995, 1.7, p);
  EXPECT_EQ(leave.regime, Regime::Normal);
  EXPECT_DOUBLE_EQ(leave.productivity, 1.0);

  const auto enter = econ::productivity_step(one, 0.0, 1e-7, 2.0, p);
  EXPECT_EQ(enter.regime, Regime::SuperStar);
  EXPECT_DOUBLE_EQ(enter.productivity, p.e_bar * 2.0);
}

TEST(ProductivityStep, StaysPositive) {
  Gen g(11);
  const ModelParams p;
  for (int k = 0; k < kCases; ++k) {
    HouseholdState s{0.0, g.log_uniform(1e-3, 1e3), g.coin(0.1) ? Regime::SuperStar : Regime::Normal};
    const auto next = econ::productivity_step(s, 3.0 * g.normal(), g.uniform(0, 1), g.log_uniform(0.1, 10), p);
    ASSERT_GT(next.productivity, 0.0);
    ASSERT_TRUE(std::isfinite(next.productivity));
  }
}

TEST(Production, Examples) {
  EXPECT_DOUBLE_EQ(econ::production(1, 1, 0.3), 1.0);
  EXPECT_NEAR(econ::production(8, 1, 1.0 / 3.0), 2.0, 1e-14);
  EXPECT_EQ(econ::production(0, 5, 1.0 / 3.0), 0.0);
  EXPECT_EQ(econ::production(5, 0, 1.0 / 3.0), 0.0);
}

TEST(FactorPrices, Examples) {
  const auto eq = econ::factor_prices(3.0, 3.0, 0.25);
  EXPECT_DOUBLE_EQ(eq.wage, 0.75);
  EXPECT_DOUBLE_EQ(eq.rental, 0.25);
  const auto p = econ::factor_prices(8.0, 1.0, 1.0 / 3.0);
  EXPECT_NEAR(p.wage, 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(p.rental, 1.0 / 12.0, 1e-14);
  EXPECT_NEAR(p.wage * 1.0 + p.rental * 8.0, 2.0, 1e-14);
  EXPECT_THROW((void)econ::factor_prices(0.0, 1.0, 0.3), DegenerateMarketError);
  EXPECT_THROW((void)econ::factor_prices(1.0, 0.0, 0.3), DegenerateMarketError);
}

TEST(AggregateLabor, Examples) {
  EXPECT_EQ(econ::aggregate_labor(std::vector{1.0}, std::vector{1.0}), 1.0);
  EXPECT_EQ(econ::aggregate_labor(std::vector{2.0, 1.0}, std::vector{0.5, 1.0}), 2.0);
  EXPECT_EQ(econ::aggregate_labor({}, {}), 0.0);
  EXPECT_THROW((void)econ::aggregate_labor(std::vector{1.0}, std::vector{1.0, 2.0}), DimensionError);
}

TEST(GovernmentBudget, Examples) {
  EXPECT_EQ(econ::government_budget_step(0, 10, 10, 0.04), 0.0);
  EXPECT_DOUBLE_EQ(econ::government_budget_step(100, 0, 0, 0.04), 104.0);
  EXPECT_DOUBLE_EQ(econ::government_budget_step(100, 20, 30, 0.04), 94.0);
  EXPECT_LT(econ::government_budget_step(0, 0, 5, 0.04), 0.0);
}

TEST(TotalTaxRevenue, Examples) {
  const TaxSchedule s{0.2, 0, 0, 0};
  const std::vector<econ::HouseholdFlows> one{{90, 1000, 30}};
  EXPECT_NEAR(econ::total_tax_revenue(one, s, 0.065), 19.95, 1e-12);
  const std::vector<econ::HouseholdFlows> nothing{{50, 50, 0}};
  EXPECT_EQ(econ::total_tax_revenue(nothing, {}, 0.065), 0.0);
  const TaxSchedule both{0.2, 0.05, 0.5, 0.05};
  const std::vector<econ::HouseholdFlows> two{{91.6, 1040.1, 30}, {106.0, 151.2, 30}};
  double expected = 0.0;
  for (const auto& h : two) {
    expected += econ::income_tax(h.income, both) + econ::asset_tax(h.asset, both) + 0.065 * h.consumption;
  }
  EXPECT_DOUBLE_EQ(econ::total_tax_revenue(two, both, 0.065), expected);
}

TEST(Intermediary, Examples) {
  EXPECT_EQ(econ::intermediary_step(1000, 0), 1000.0);
  EXPECT_EQ(econ::intermediary_step(1000, 400), 600.0);
  EXPECT_EQ(econ::intermediary_step(1000, -50), 1050.0);
  EXPECT_DOUBLE_EQ(econ::no_arbitrage_rental_rate(0.04, 0.06), 0.10);
  EXPECT_THROW((void)econ::intermediary_step(400, 400), CapitalExhaustedError);
  EXPECT_THROW((void)econ::intermediary_step(-1, -10), DomainError);
}

TEST(IntermediaryProperty, BudgetHoldsOverTwoSteps) {
  // Net worth N = K + B - A of an intermediary that pays r on deposits,
  // earns R = r + delta on capital and r on bonds stays at zero.
  const double r = 0.04, delta = 0.06;
  const double rental = econ::no_arbitrage_rental_rate(r, delta);
  double deposits = 1000, debt = 400;
  double capital = econ::intermediary_step(deposits, debt);
  for (int t = 0; t < 2; ++t) {
    const double inflow = (rental - delta) * capital + r * debt;
    const double outflow = r * deposits;
    EXPECT_NEAR(inflow - outflow, 0.0, 1e-9);
    deposits *= 1.05;
    debt += 20;
    capital = econ::intermediary_step(deposits, debt);
    EXPECT_NEAR(capital + debt - deposits, 0.0, 1e-9);
  }
}

}  // namespace
