#include "taxai/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "taxai/errors.hpp"
#include "taxai/seed.hpp"

namespace taxai {

namespace {

double clamp_counted(double v, const Interval& range, int& counter) {
  if (v < range.low) {
    ++counter;
    return range.low;
  }
  if (v > range.high) {
    ++counter;
    return range.high;
  }
  return v;
}

double utility_unchecked(double consumption, double hours_fraction, double theta,
                         double gamma) noexcept {
  const double c_term =
      theta == 1.0 ? std::log(consumption) : std::pow(consumption, 1.0 - theta) / (1.0 - theta);
  const double h_term = gamma == 2.0 ? hours_fraction * hours_fraction * hours_fraction / 3.0
                                     : std::pow(hours_fraction, 1.0 + gamma) / (1.0 + gamma);
  return c_term - h_term;
}

}  // namespace

std::string_view done_reason_name(DoneReason reason) {
  switch (reason) {
    case DoneReason::MaxSteps: return "MaxSteps";
    case DoneReason::GiniExceeded: return "GiniExceeded";
    case DoneReason::ConsumptionExceedsOutput: return "ConsumptionExceedsOutput";
    case DoneReason::Bankruptcy: return "Bankruptcy";
    case DoneReason::NumericOverflow: return "NumericOverflow";
  }
  return "Unknown";
}

void ActionBounds::validate() const {
  for (const auto& r : government()) {
    if (!(r.low <= r.high) || !std::isfinite(r.low) || !std::isfinite(r.high)) {
      throw ConfigError("action bounds: each interval needs finite low <= high");
    }
  }
  if (xi.high >= 1.0 || xi_a.high >= 1.0) {
    throw ConfigError("action bounds: xi and xi_a must stay below 1");
  }
  if (spending_ratio.low < 0.0 || spending_ratio.high >= 1.0) {
    throw ConfigError("action bounds: spending ratio must lie in [0,1)");
  }
  if (!(savings_epsilon > 0.0 && savings_epsilon < 0.5)) {
    throw ConfigError("action bounds: savings_epsilon must lie in (0, 0.5)");
  }
}

void EnvConfig::validate() const {
  model.validate();
  bounds.validate();
  initial.validate();
  if (model.rho_e >= 1.0) throw ConfigError("rho_e must be < 1 for a stationary initial law");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!(consumption_floor > 0.0)) throw ConfigError("consumption_floor must be > 0");
  if (!(reset_hours_fraction > 0.0 && reset_hours_fraction <= 1.0)) {
    throw ConfigError("reset_hours_fraction must lie in (0,1]");
  }
}

std::optional<DoneReason> terminal_check(const StepAggregates& agg, const ModelParams& params) {
  if (!agg.all_finite) return DoneReason::NumericOverflow;
  if (agg.min_next_asset < 0.0) return DoneReason::Bankruptcy;
  if (agg.consumption + agg.gov_spending > agg.gdp) return DoneReason::ConsumptionExceedsOutput;
  if (agg.wealth_gini > params.gini_terminal_threshold ||
      agg.income_gini > params.gini_terminal_threshold) {
    return DoneReason::GiniExceeded;
  }
  if (agg.steps_taken >= params.episode_max_steps) return DoneReason::MaxSteps;
  return std::nullopt;
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto n = static_cast<std::size_t>(config_.model.n_households);
  for (auto* v : {&assets_, &productivity_, &hours_, &savings_, &hours_fraction_, &income_,
                  &income_tax_, &asset_tax_, &post_tax_income_, &next_assets_, &consumption_,
                  &utility_, &shock_u_, &regime_draw_, &sorted_}) {
    v->assign(n, 0.0);
  }
  regime_.assign(n, Regime::Normal);
  order_.reserve(n);
  observation_.households.assign(n * kHouseholdObsDim, 0.0);
}

double Environment::mean_normal_productivity() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < productivity_.size(); ++i) {
    if (regime_[i] == Regime::Normal) {
      sum += productivity_[i];
      ++count;
    }
  }
  return count == 0 ? 1.0 : sum / static_cast<double>(count);
}

Observation Environment::reset(std::uint64_t seed) {
  const auto& m = config_.model;
  const std::size_t n = assets_.size();
  assets_ = sample_initial_assets(config_.initial, n, derive_seed(seed, 1));

  rng_.seed(derive_seed(seed, 2));
  normal_.reset();
  const double sd = std::sqrt(m.stationary_log_variance());
  const double leave = 1.0 - m.q_super;
  const double superstar_share = (m.p_super + leave) > 0.0 ? m.p_super / (m.p_super + leave) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    productivity_[i] = std::exp(sd * normal_(rng_));
    regime_[i] = unit_(rng_) < superstar_share ? Regime::SuperStar : Regime::Normal;
  }
  const double reference =
      m.superstar_reference == SuperStarReference::PopulationMean ? mean_normal_productivity() : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (regime_[i] == Regime::SuperStar) productivity_[i] = m.e_bar * reference;
  }
  start_episode(seed, 0.0);
  return observation_;
}

Observation Environment::reset_with_households(std::span<const HouseholdState> households,
                                               std::uint64_t seed, double initial_debt) {
  if (households.size() != assets_.size()) {
    throw DimensionError("reset_with_households: expected " + std::to_string(assets_.size()) +
                         " households, got " + std::to_string(households.size()));
  }
  for (std::size_t i = 0; i < households.size(); ++i) {
    const auto& h = households[i];
    if (!(h.asset >= 0.0) || !(h.productivity > 0.0)) {
      throw ConfigError("reset_with_households: asset must be >= 0 and productivity > 0");
    }
    assets_[i] = h.asset;
    productivity_[i] = h.productivity;
    regime_[i] = h.regime;
  }
  rng_.seed(derive_seed(seed, 2));
  normal_.reset();
  start_episode(seed, initial_debt);
  return observation_;
}

void Environment::start_episode(std::uint64_t /*seed*/, double initial_debt) {
  const auto& m = config_.model;
  const std::size_t n = assets_.size();

  double deposits = 0.0;
  for (double a : assets_) deposits += a;

  economy_ = EconomyState{};
  economy_.debt = initial_debt;
  economy_.gross_deposits = deposits;
  economy_.capital = econ::intermediary_step(deposits, initial_debt);
  economy_.funded_capital = economy_.capital;
  economy_.rental_rate = econ::no_arbitrage_rental_rate(m.r_save, m.delta);

  // Prices and incomes reported before any action is taken assume every
  // household works reset_hours_fraction of h_max.
  const double h0 = config_.reset_hours_fraction * m.h_max;
  double labor = 0.0;
  for (double e : productivity_) labor += e * h0;
  const auto prices = econ::factor_prices(economy_.capital, labor, m.alpha);
  economy_.wage_rate = prices.wage;
  economy_.marginal_product_capital = prices.rental;
  economy_.gdp = econ::production(economy_.capital, labor, m.alpha);
  for (std::size_t i = 0; i < n; ++i) {
    income_[i] = prices.wage * productivity_[i] * h0 + m.r_save * assets_[i];
  }

  gdp_prev_ = economy_.gdp;
  discounted_welfare_ = 0.0;
  steps_ = 0;
  clamp_count_ = 0;
  started_ = true;
  done_ = false;
  metrics::wealth_ranking(assets_, order_);
  build_observation();
}

void Environment::build_observation() {
  const auto g = metrics::group_stats_ranked(order_, assets_, income_, productivity_);
  observation_.government = {economy_.wage_rate, g.mean_asset_rich, g.mean_income_rich,
                             g.mean_e_rich,      g.mean_asset_poor, g.mean_income_poor,
                             g.mean_e_poor};
  const std::size_t n = assets_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double* row = observation_.households.data() + i * kHouseholdObsDim;
    std::copy(observation_.government.begin(), observation_.government.end(), row);
    row[7] = assets_[i];
    row[8] = productivity_[i];
  }
}

void Environment::evolve_productivity() {
  const auto& m = config_.model;
  const std::size_t n = assets_.size();
  for (std::size_t i = 0; i < n; ++i) {
    shock_u_[i] = normal_(rng_);
    regime_draw_[i] = unit_(rng_);
  }
  const double reference =
      m.superstar_reference == SuperStarReference::PopulationMean ? mean_normal_productivity() : 1.0;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for num_threads(config_.threads) schedule(static) if (config_.threads > 1)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const auto next = econ::productivity_step({assets_[i], productivity_[i], regime_[i]},
                                              shock_u_[i], regime_draw_[i], reference, m);
    productivity_[i] = next.productivity;
    regime_[i] = next.regime;
  }
}

StepResult Environment::step(const GovernmentAction& gov_action,
                             std::span<const HouseholdAction> actions) {
  if (!started_) throw IllegalStateError("step called before reset");
  if (done_) throw IllegalStateError("step called after the episode finished");
  const std::size_t n = assets_.size();
  if (actions.size() != n) {
    throw DimensionError("step: expected " + std::to_string(n) + " household actions, got " +
                         std::to_string(actions.size()));
  }
  const auto& m = config_.model;
  const auto& b = config_.bounds;

  // (1) clamp actions into bounds
  GovernmentAction gov;
  gov.tau = clamp_counted(gov_action.tau, b.tau, clamp_count_);
  gov.xi = clamp_counted(gov_action.xi, b.xi, clamp_count_);
  gov.tau_a = clamp_counted(gov_action.tau_a, b.tau_a, clamp_count_);
  gov.xi_a = clamp_counted(gov_action.xi_a, b.xi_a, clamp_count_);
  gov.spending_ratio = clamp_counted(gov_action.spending_ratio, b.spending_ratio, clamp_count_);
  const Interval savings_range{b.savings_epsilon, 1.0 - b.savings_epsilon};
  const Interval unit_range{0.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    savings_[i] = clamp_counted(actions[i].savings_ratio, savings_range, clamp_count_);
    hours_fraction_[i] = clamp_counted(actions[i].hours_fraction, unit_range, clamp_count_);
    hours_[i] = hours_fraction_[i] * m.h_max;
  }

  // (2)-(3) labor market and factor prices
  const double capital = economy_.capital;
  const double labor = econ::aggregate_labor(productivity_, hours_);
  double wage = 0.0;
  double mpk = 0.0;
  double gdp = 0.0;
  if (capital > 0.0 && labor > 0.0) {
    const auto prices = econ::factor_prices(capital, labor, m.alpha);
    wage = prices.wage;
    mpk = prices.rental;
    gdp = econ::production(capital, labor, m.alpha);
  }

  // (4)-(5) incomes, taxes and budget transitions
  const double r = m.r_save;
  const auto count = static_cast<std::ptrdiff_t>(n);
  const double floor = config_.consumption_floor;
#pragma omp parallel for num_threads(config_.threads) schedule(static) if (config_.threads > 1)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double income = wage * productivity_[i] * hours_[i] + r * assets_[i];
    const double it = econ::hsv_tax(income, gov.tau, gov.xi);
    const double at = econ::hsv_tax(assets_[i], gov.tau_a, gov.xi_a);
    const double resources = income - it + assets_[i] - at;
    const auto flow = econ::split_resources(resources, savings_[i], m.tau_s);
    income_[i] = income;
    income_tax_[i] = it;
    asset_tax_[i] = at;
    post_tax_income_[i] = income - it;
    next_assets_[i] = flow.next_asset;
    consumption_[i] = flow.consumption;
    utility_[i] = utility_unchecked(std::max(flow.consumption, floor), hours_fraction_[i],
                                    m.theta, m.gamma_frisch);
  }

  // (6) aggregates, summed in household order
  double total_consumption = 0.0;
  double total_tax = 0.0;
  double deposits_next = 0.0;
  double welfare = 0.0;
  double min_next_asset = n > 0 ? next_assets_[0] : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total_consumption += consumption_[i];
    total_tax += income_tax_[i] + asset_tax_[i] + m.tau_s * consumption_[i];
    deposits_next += next_assets_[i];
    welfare += utility_[i];
    min_next_asset = std::min(min_next_asset, next_assets_[i]);
  }
  const double spending = gov.spending_ratio * gdp;

  const bool households_finite = std::isfinite(total_consumption) && std::isfinite(total_tax) &&
                                 std::isfinite(deposits_next) && std::isfinite(welfare);
  double wealth_gini = 0.0;
  double income_gini = 0.0;
  if (households_finite) {
    std::copy(next_assets_.begin(), next_assets_.end(), sorted_.begin());
    std::sort(sorted_.begin(), sorted_.end());
    wealth_gini = metrics::gini_sorted(sorted_);
    std::copy(post_tax_income_.begin(), post_tax_income_.end(), sorted_.begin());
    std::sort(sorted_.begin(), sorted_.end());
    income_gini = metrics::gini_sorted(sorted_);
  }

  // government reward
  const double growth = gdp_prev_ != 0.0 ? (gdp - gdp_prev_) / gdp_prev_
                                        : std::numeric_limits<double>::quiet_NaN();
  const double inequality = income_gini * wealth_gini;
  double gov_reward = 0.0;
  switch (config_.task) {
    case GovernmentTask::Gdp: gov_reward = growth; break;
    case GovernmentTask::Inequality: gov_reward = -inequality; break;
    case GovernmentTask::Welfare: gov_reward = welfare; break;
    case GovernmentTask::Multi:
      gov_reward = growth - config_.omega1 * inequality + config_.omega2 * welfare;
      break;
  }

  // (7) terminal checks
  ++steps_;
  StepAggregates agg;
  agg.all_finite = households_finite && std::isfinite(gdp) && std::isfinite(wage) &&
                   std::isfinite(spending) && std::isfinite(gov_reward);
  agg.min_next_asset = min_next_asset;
  agg.consumption = total_consumption;
  agg.gov_spending = spending;
  agg.gdp = gdp;
  agg.wealth_gini = wealth_gini;
  agg.income_gini = income_gini;
  agg.steps_taken = steps_;
  std::optional<DoneReason> reason = terminal_check(agg, m);
  if (!config_.enforce_terminal && reason && *reason != DoneReason::NumericOverflow &&
      *reason != DoneReason::MaxSteps) {
    reason.reset();
    if (steps_ >= m.episode_max_steps) reason = DoneReason::MaxSteps;
  }

  // (8) government debt, capital accumulation, deposits, productivity
  const double debt_next = econ::government_budget_step(economy_.debt, spending, total_tax, r);
  const double investment = gdp - total_consumption - spending;
  // Negative capital is only reachable with terminal checks disabled.
  economy_.capital = std::max(0.0, (1.0 - m.delta) * capital + investment);
  economy_.debt = debt_next;
  economy_.wage_rate = wage;
  economy_.rental_rate = econ::no_arbitrage_rental_rate(m.r_save, m.delta);
  economy_.marginal_product_capital = mpk;
  economy_.gdp = gdp;
  economy_.gross_consumption = total_consumption;
  economy_.gov_spending = spending;
  economy_.total_tax = total_tax;
  economy_.gross_deposits = deposits_next;
  economy_.investment = investment;
  economy_.funded_capital = deposits_next - debt_next;

  const double discount = std::pow(m.beta, steps_ - 1);
  discounted_welfare_ += discount * welfare;
  gdp_prev_ = gdp;
  assets_.swap(next_assets_);
  evolve_productivity();

  // (9) observations, rewards, metrics
  StepResult result;
  if (households_finite) {
    metrics::wealth_ranking(assets_, order_);
  } else {
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
  }
  build_observation();
  result.observation = observation_;
  result.rewards.government = gov_reward;
  result.rewards.households = utility_;
  result.done_reason = reason;
  result.done = reason.has_value();
  done_ = result.done;

  auto& mt = result.metrics;
  mt.step = steps_;
  mt.gdp = gdp;
  mt.gdp_growth = growth;
  mt.wealth_gini = wealth_gini;
  mt.income_gini = income_gini;
  mt.social_welfare = welfare;
  const std::size_t rich = metrics::rich_group_size(n);
  const std::size_t poor = metrics::poor_group_size(n);
  auto mean_utility = [&](std::size_t first, std::size_t last) {
    if (last <= first) return 0.0;
    double s = 0.0;
    for (std::size_t k = first; k < last; ++k) s += utility_[order_[k]];
    return s / static_cast<double>(last - first);
  };
  mt.mean_utility_rich = mean_utility(0, rich);
  mt.mean_utility_mid = mean_utility(rich, n - poor);
  mt.mean_utility_poor = mean_utility(n - poor, n);
  mt.wage_rate = wage;
  mt.total_tax = total_tax;
  mt.debt = debt_next;
  mt.discounted_welfare = discounted_welfare_;
  mt.years_survived = steps_;
  mt.clamp_count = clamp_count_;
  return result;
}

}  // namespace taxai
