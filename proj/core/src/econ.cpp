#include "taxai/econ.hpp"

#include <cmath>
#include <string>

#include "taxai/errors.hpp"

namespace taxai {

namespace {

void require(bool condition, const char* what) {
  if (!condition) throw ConfigError(std::string("invalid model parameter: ") + what);
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void ModelParams::validate() const {
  require(std::isfinite(theta) && theta > 0.0, "theta > 0");
  require(std::isfinite(gamma_frisch) && gamma_frisch > 0.0, "gamma_frisch > 0");
  require(beta > 0.0 && beta < 1.0, "beta in (0,1)");
  require(alpha > 0.0 && alpha < 1.0, "alpha in (0,1)");
  require(in_unit(delta), "delta in [0,1]");
  require(std::isfinite(r_save), "r_save finite");
  require(tau_s >= 0.0 && std::isfinite(tau_s), "tau_s >= 0");
  require(in_unit(p_super), "p_super in [0,1]");
  require(in_unit(q_super), "q_super in [0,1]");
  require(in_unit(rho_e), "rho_e in [0,1]");
  require(sigma_e >= 0.0 && std::isfinite(sigma_e), "sigma_e >= 0");
  require(e_bar > 1.0 && std::isfinite(e_bar), "e_bar > 1");
  require(wealth_income_ratio_target > 0.0, "wealth_income_ratio_target > 0");
  require(h_max > 0.0 && std::isfinite(h_max), "h_max > 0");
  require(episode_max_steps >= 1, "episode_max_steps >= 1");
  require(gini_terminal_threshold > 0.0 && gini_terminal_threshold <= 1.0,
          "gini_terminal_threshold in (0,1]");
  require(n_households >= 1, "n_households >= 1");
}

bool TaxSchedule::valid() const {
  return in_unit(tau) && in_unit(tau_a) && xi >= 0.0 && xi < 1.0 && xi_a >= 0.0 && xi_a < 1.0;
}

namespace econ {

double income_tax(double income, const TaxSchedule& schedule) {
  if (!(income >= 0.0)) throw DomainError("income_tax: income must be >= 0");
  if (schedule.xi == 1.0) throw DomainError("income_tax: xi = 1 is singular");
  return hsv_tax(income, schedule.tau, schedule.xi);
}

double asset_tax(double asset, const TaxSchedule& schedule) {
  if (!(asset >= 0.0)) throw DomainError("asset_tax: asset must be >= 0");
  if (schedule.xi_a == 1.0) throw DomainError("asset_tax: xi_a = 1 is singular");
  return hsv_tax(asset, schedule.tau_a, schedule.xi_a);
}

double household_income(double wage_rate, double productivity, double hours, double r_prev,
                        double asset) {
  if (!(wage_rate >= 0.0 && productivity >= 0.0 && hours >= 0.0 && r_prev >= 0.0 &&
        asset >= 0.0)) {
    throw DomainError("household_income: inputs must be >= 0");
  }
  return wage_rate * productivity * hours + r_prev * asset;
}

double post_tax_resources(double income, double asset, const TaxSchedule& schedule) noexcept {
  return income - hsv_tax(income, schedule.tau, schedule.xi) + asset -
         hsv_tax(asset, schedule.tau_a, schedule.xi_a);
}

BudgetOutcome budget_transition(double income, double asset, double savings_ratio,
                                const TaxSchedule& schedule, double tau_s) {
  if (!(savings_ratio > 0.0 && savings_ratio < 1.0)) {
    throw DomainError("budget_transition: savings ratio must lie in (0,1)");
  }
  if (!(income >= 0.0 && asset >= 0.0)) {
    throw DomainError("budget_transition: income and asset must be >= 0");
  }
  const double resources =
      income - income_tax(income, schedule) + asset - asset_tax(asset, schedule);
  if (resources < 0.0) throw BankruptcyError("budget_transition: negative post-tax resources");
  return split_resources(resources, savings_ratio, tau_s);
}

double savings_ratio_for_consumption(double resources, double consumption, double tau_s) {
  if (!(resources > 0.0)) throw DomainError("savings_ratio_for_consumption: resources must be > 0");
  return (resources - (1.0 + tau_s) * consumption) / resources;
}

HouseholdState productivity_step(const HouseholdState& state, double shock_u, double regime_draw,
                                 double superstar_reference, const ModelParams& params) {
  HouseholdState next = state;
  if (state.regime == Regime::Normal) {
    const double log_e = params.rho_e * std::log(state.productivity) + params.sigma_e * shock_u;
    next.productivity = std::exp(log_e);
    if (regime_draw < params.p_super) {
      next.regime = Regime::SuperStar;
      next.productivity = params.e_bar * superstar_reference;
    }
    return next;
  }
  if (regime_draw < params.q_super) {
    next.productivity = params.e_bar * superstar_reference;
    return next;
  }
  next.regime = Regime::Normal;
  next.productivity = std::exp(std::sqrt(params.stationary_log_variance()) * shock_u);
  return next;
}

double production(double capital, double labor, double alpha) {
  if (capital <= 0.0 || labor <= 0.0) return 0.0;
  return std::pow(capital, alpha) * std::pow(labor, 1.0 - alpha);
}

FactorPrices factor_prices(double capital, double labor, double alpha) {
  if (!(capital > 0.0) || !(labor > 0.0)) {
    throw DegenerateMarketError("factor_prices: capital and labor must be positive");
  }
  const double k_per_l = capital / labor;
  const double k_alpha = std::pow(k_per_l, alpha);
  return {(1.0 - alpha) * k_alpha, alpha * k_alpha / k_per_l};
}

double aggregate_labor(std::span<const double> productivity, std::span<const double> hours) {
  if (productivity.size() != hours.size()) {
    throw DimensionError("aggregate_labor: productivity and hours differ in length");
  }
  double labor = 0.0;
  for (std::size_t i = 0; i < productivity.size(); ++i) labor += productivity[i] * hours[i];
  return labor;
}

double government_budget_step(double debt, double spending, double tax, double r_prev) noexcept {
  return (1.0 + r_prev) * debt + spending - tax;
}

double total_tax_revenue(std::span<const HouseholdFlows> households, const TaxSchedule& schedule,
                         double tau_s) {
  double total = 0.0;
  for (const auto& h : households) {
    total += income_tax(h.income, schedule) + asset_tax(h.asset, schedule) + tau_s * h.consumption;
  }
  return total;
}

double intermediary_step(double deposits_next, double debt_next) {
  if (!(deposits_next >= 0.0)) throw DomainError("intermediary_step: deposits must be >= 0");
  const double capital = deposits_next - debt_next;
  if (!(capital > 0.0)) {
    throw CapitalExhaustedError("intermediary_step: deposits net of debt cannot fund capital");
  }
  return capital;
}

}  // namespace econ
}  // namespace taxai
