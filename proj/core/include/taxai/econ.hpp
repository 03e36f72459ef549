#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "taxai/params.hpp"

namespace taxai {

/// Parameters of the HSV income and asset tax schedules.
///   T(i)   = i - (1 - tau)   * i^(1 - xi)     / (1 - xi)
///   T^a(a) = a - (1 - tau_a) * a^(1 - xi_a)   / (1 - xi_a)
struct TaxSchedule {
  double tau = 0.0;
  double xi = 0.0;
  double tau_a = 0.0;
  double xi_a = 0.0;

  /// tau, tau_a in [0,1] and xi, xi_a in [0,1).
  [[nodiscard]] bool valid() const;
};

enum class Regime : std::uint8_t { Normal, SuperStar };

struct HouseholdState {
  double asset = 0.0;
  double productivity = 1.0;
  Regime regime = Regime::Normal;
};

/// Aggregate state of the economy for one step.
struct EconomyState {
  double capital = 0.0;                   // K_t
  double debt = 0.0;                      // B_t, may be negative
  double wage_rate = 0.0;                 // W_t
  double rental_rate = 0.0;               // no-arbitrage r + delta
  double marginal_product_capital = 0.0;  // dY/dK paid by the firm
  double gdp = 0.0;                       // Y_t
  double gross_consumption = 0.0;         // C_t
  double gov_spending = 0.0;              // G_t
  double total_tax = 0.0;                 // T_t
  double gross_deposits = 0.0;            // A_t
  double investment = 0.0;                // X_t = K_{t+1} - (1 - delta) K_t
  double funded_capital = 0.0;            // A_{t+1} - B_{t+1}
};

namespace econ {

/// HSV income tax. Throws DomainError for negative income or xi == 1.
[[nodiscard]] double income_tax(double income, const TaxSchedule& schedule);

/// HSV asset tax. Throws DomainError for negative assets or xi_a == 1.
[[nodiscard]] double asset_tax(double asset, const TaxSchedule& schedule);

/// Unchecked HSV kernel shared by both schedules; x >= 0, slope != 1.
[[nodiscard]] inline double hsv_tax(double x, double level, double slope) noexcept {
  if (slope == 0.0) return level * x;
  return x - (1.0 - level) * std::pow(x, 1.0 - slope) / (1.0 - slope);
}

/// i_t = W_t e_t h_t + r_{t-1} a_t
[[nodiscard]] double household_income(double wage_rate, double productivity, double hours,
                                      double r_prev, double asset);

/// Post-tax resources x = i - T(i) + a - T^a(a).
[[nodiscard]] double post_tax_resources(double income, double asset,
                                        const TaxSchedule& schedule) noexcept;

struct BudgetOutcome {
  double next_asset = 0.0;
  double consumption = 0.0;
};

/// Splits post-tax resources x by the savings ratio p:
/// a' = p x and c = (1 - p) x / (1 + tau_s). No checks.
[[nodiscard]] inline BudgetOutcome split_resources(double resources, double savings_ratio,
                                                   double tau_s) noexcept {
  return {savings_ratio * resources, (1.0 - savings_ratio) * resources / (1.0 + tau_s)};
}

/// Budget transition under the proportional savings action. Throws
/// DomainError when p is outside (0,1) or inputs are negative, and
/// BankruptcyError when post-tax resources are negative.
[[nodiscard]] BudgetOutcome budget_transition(double income, double asset, double savings_ratio,
                                              const TaxSchedule& schedule, double tau_s);

/// Savings ratio that yields a given consumption level; inverse of the
/// proportional action for a household with post-tax resources x.
[[nodiscard]] double savings_ratio_for_consumption(double resources, double consumption,
                                                   double tau_s);

/// One transition of the two-regime productivity process.
///
/// Normal households draw log e' = rho_e log e + sigma_e u and move to the
/// super-star regime if regime_draw < p_super. Super-stars stay while
/// regime_draw < q_super and otherwise return to the normal regime with
/// log e' = sigma_e / sqrt(1 - rho_e^2) u, a draw from the stationary law.
/// Super-star productivity is e_bar * superstar_reference.
[[nodiscard]] HouseholdState productivity_step(const HouseholdState& state, double shock_u,
                                               double regime_draw, double superstar_reference,
                                               const ModelParams& params);

/// Cobb-Douglas output Y = K^alpha L^(1 - alpha).
[[nodiscard]] double production(double capital, double labor, double alpha);

struct FactorPrices {
  double wage = 0.0;
  double rental = 0.0;
};

/// Marginal products of labor and capital. Throws DegenerateMarketError if
/// K <= 0 or L <= 0.
[[nodiscard]] FactorPrices factor_prices(double capital, double labor, double alpha);

/// L = sum_i e_i h_i, summed in index order.
[[nodiscard]] double aggregate_labor(std::span<const double> productivity,
                                     std::span<const double> hours);

/// B_{t+1} = (1 + r) B_t + G_t - T_t
[[nodiscard]] double government_budget_step(double debt, double spending, double tax,
                                            double r_prev) noexcept;

struct HouseholdFlows {
  double income = 0.0;
  double asset = 0.0;
  double consumption = 0.0;
};

/// T_t = sum_i T(i) + T^a(a) + tau_s c
[[nodiscard]] double total_tax_revenue(std::span<const HouseholdFlows> households,
                                       const TaxSchedule& schedule, double tau_s);

/// Intermediary balance-sheet closure K = A - B. Throws CapitalExhaustedError
/// when A - B <= 0 and DomainError when A < 0.
[[nodiscard]] double intermediary_step(double deposits_next, double debt_next);

/// R = r + delta
[[nodiscard]] constexpr double no_arbitrage_rental_rate(double r_save, double delta) noexcept {
  return r_save + delta;
}

}  // namespace econ
}  // namespace taxai

