#include "taxai/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "taxai/errors.hpp"

namespace taxai {

GovernmentTask parse_task(std::string_view name) {
  if (name == "gdp") return GovernmentTask::Gdp;
  if (name == "gini") return GovernmentTask::Inequality;
  if (name == "welfare") return GovernmentTask::Welfare;
  if (name == "multi") return GovernmentTask::Multi;
  throw ConfigError("unknown task '" + std::string(name) + "' (expected gdp|gini|welfare|multi)");
}

std::string_view task_name(GovernmentTask task) {
  switch (task) {
    case GovernmentTask::Gdp: return "gdp";
    case GovernmentTask::Inequality: return "gini";
    case GovernmentTask::Welfare: return "welfare";
    case GovernmentTask::Multi: return "multi";
  }
  return "unknown";
}

namespace metrics {

namespace {

void check_nonnegative(std::span<const double> values, const char* who) {
  if (values.empty()) throw DomainError(std::string(who) + ": empty input");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string(who) + ": values must be finite and >= 0");
    }
  }
}

}  // namespace

double gini_sorted(std::span<const double> sorted_values) noexcept {
  const auto n = static_cast<double>(sorted_values.size());
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < sorted_values.size(); ++i) {
    total += sorted_values[i];
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * sorted_values[i];
  }
  if (total <= 0.0) return 0.0;
  return std::clamp(weighted / (n * total), 0.0, 1.0);
}

double gini(std::span<const double> values) {
  check_nonnegative(values, "gini");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return gini_sorted(sorted);
}

std::vector<LorenzPoint> lorenz_points(std::span<const double> values) {
  check_nonnegative(values, "lorenz_points");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  const auto n = static_cast<double>(sorted.size());

  std::vector<LorenzPoint> curve;
  curve.reserve(sorted.size() + 1);
  curve.push_back({0.0, 0.0});
  double cumulative = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double pop = static_cast<double>(k + 1) / n;
    curve.push_back({pop, total > 0.0 ? cumulative / total : pop});
  }
  curve.back() = {1.0, 1.0};
  return curve;
}

double gini_from_lorenz(std::span<const LorenzPoint> curve) {
  double area = 0.0;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    const double width = curve[k].population_fraction - curve[k - 1].population_fraction;
    area += 0.5 * width * (curve[k].wealth_fraction + curve[k - 1].wealth_fraction);
  }
  return 1.0 - 2.0 * area;
}

double household_utility(double consumption, double hours, double theta, double gamma_frisch) {
  if (!(consumption > 0.0)) throw DomainError("household_utility: consumption must be > 0");
  if (!(hours >= 0.0)) throw DomainError("household_utility: hours must be >= 0");
  // theta = 1 is the log-utility limit of CRRA
  const double consumption_term = theta == 1.0
                                      ? std::log(consumption)
                                      : std::pow(consumption, 1.0 - theta) / (1.0 - theta);
  const double labor_term = std::pow(hours, 1.0 + gamma_frisch) / (1.0 + gamma_frisch);
  return consumption_term - labor_term;
}

double government_reward(GovernmentTask task, const RewardInputs& in, double omega1,
                         double omega2) {
  auto growth = [&] {
    if (in.gdp_prev == 0.0) throw DivisionByZeroError("government_reward: previous GDP is 0");
    return (in.gdp - in.gdp_prev) / in.gdp_prev;
  };
  const double inequality = in.income_gini * in.wealth_gini;
  switch (task) {
    case GovernmentTask::Gdp: return growth();
    case GovernmentTask::Inequality: return -inequality;
    case GovernmentTask::Welfare: return in.social_welfare;
    case GovernmentTask::Multi:
      return growth() - omega1 * inequality + omega2 * in.social_welfare;
  }
  return 0.0;
}

void wealth_ranking(std::span<const double> assets, std::vector<std::size_t>& order) {
  order.resize(assets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (assets[a] != assets[b]) return assets[a] > assets[b];
    return a < b;
  });
}

std::vector<std::size_t> wealth_ranking(std::span<const double> assets) {
  std::vector<std::size_t> order;
  wealth_ranking(assets, order);
  return order;
}

GroupStats group_stats_ranked(std::span<const std::size_t> order, std::span<const double> assets,
                              std::span<const double> incomes,
                              std::span<const double> productivities) {
  const std::size_t n = order.size();
  const std::size_t rich = rich_group_size(n);
  const std::size_t poor = poor_group_size(n);

  auto mean_over = [&](std::size_t first, std::size_t count, std::span<const double> v) {
    if (count == 0) return 0.0;
    double s = 0.0;
    for (std::size_t k = first; k < first + count; ++k) s += v[order[k]];
    return s / static_cast<double>(count);
  };

  GroupStats g;
  g.mean_asset_rich = mean_over(0, rich, assets);
  g.mean_income_rich = mean_over(0, rich, incomes);
  g.mean_e_rich = mean_over(0, rich, productivities);
  g.mean_asset_poor = mean_over(n - poor, poor, assets);
  g.mean_income_poor = mean_over(n - poor, poor, incomes);
  g.mean_e_poor = mean_over(n - poor, poor, productivities);
  return g;
}

GroupStats group_stats(std::span<const double> assets, std::span<const double> incomes,
                       std::span<const double> productivities) {
  if (assets.size() != incomes.size() || assets.size() != productivities.size()) {
    throw DimensionError("group_stats: input lengths differ");
  }
  const auto order = wealth_ranking(assets);
  return group_stats_ranked(order, assets, incomes, productivities);
}

std::string_view metrics_csv_header() {
  return "step,gdp,gdp_growth,wealth_gini,income_gini,social_welfare,mean_utility_rich,"
         "mean_utility_mid,mean_utility_poor,wage_rate,total_tax,debt,discounted_welfare,"
         "clamp_count";
}

namespace {

void put_double(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

void write_metrics_csv_row(std::ostream& out, const EpisodeMetrics& m) {
  out << m.step;
  for (double v : {m.gdp, m.gdp_growth, m.wealth_gini, m.income_gini, m.social_welfare,
                   m.mean_utility_rich, m.mean_utility_mid, m.mean_utility_poor, m.wage_rate,
                   m.total_tax, m.debt, m.discounted_welfare}) {
    out << ',';
    put_double(out, v);
  }
  out << ',' << m.clamp_count << '\n';
}

}  // namespace metrics
}  // namespace taxai
