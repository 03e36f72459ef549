#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace taxai {

enum class GovernmentTask : std::uint8_t { Gdp, Inequality, Welfare, Multi };

/// Parses "gdp", "gini", "welfare" or "multi". Throws ConfigError otherwise.
[[nodiscard]] GovernmentTask parse_task(std::string_view name);
[[nodiscard]] std::string_view task_name(GovernmentTask task);

/// Averages over the top 10% (rich) and bottom 50% (poor) by wealth.
struct GroupStats {
  double mean_asset_rich = 0.0;
  double mean_income_rich = 0.0;
  double mean_e_rich = 0.0;
  double mean_asset_poor = 0.0;
  double mean_income_poor = 0.0;
  double mean_e_poor = 0.0;
};

/// One row of the per-step metrics CSV.
struct EpisodeMetrics {
  int step = 0;
  double gdp = 0.0;
  double gdp_growth = 0.0;
  double wealth_gini = 0.0;
  double income_gini = 0.0;
  double social_welfare = 0.0;
  double mean_utility_rich = 0.0;
  double mean_utility_mid = 0.0;
  double mean_utility_poor = 0.0;
  double wage_rate = 0.0;
  double total_tax = 0.0;
  double debt = 0.0;
  double discounted_welfare = 0.0;  // sum_s beta^s welfare_s up to this step
  int years_survived = 0;
  int clamp_count = 0;  // action components clamped into bounds so far this episode
};

namespace metrics {

/// Mean absolute pairwise difference over 2 mu: sum_ij |x_i - x_j| / (2 n^2 mu).
/// Returns 0 when every value is zero. Throws DomainError on negative or
/// non-finite input or an empty list.
[[nodiscard]] double gini(std::span<const double> values);

/// Same as gini() for values already sorted ascending; unchecked.
[[nodiscard]] double gini_sorted(std::span<const double> sorted_values) noexcept;

struct LorenzPoint {
  double population_fraction = 0.0;
  double wealth_fraction = 0.0;
};

/// Lorenz curve from (0,0) to (1,1), n + 1 points. An all-zero list maps to
/// the equality line.
[[nodiscard]] std::vector<LorenzPoint> lorenz_points(std::span<const double> values);

/// 1 - 2 * (trapezoid area under the curve).
[[nodiscard]] double gini_from_lorenz(std::span<const LorenzPoint> curve);

/// c^(1-theta)/(1-theta) - h^(1+gamma)/(1+gamma), log c at theta = 1.
/// Throws DomainError if c <= 0 or h < 0.
[[nodiscard]] double household_utility(double consumption, double hours, double theta,
                                       double gamma_frisch);

/// Step aggregates the government reward depends on.
struct RewardInputs {
  double gdp = 0.0;
  double gdp_prev = 0.0;
  double income_gini = 0.0;
  double wealth_gini = 0.0;
  double social_welfare = 0.0;
};

/// Throws DivisionByZeroError if gdp_prev == 0 for the Gdp and Multi tasks.
[[nodiscard]] double government_reward(GovernmentTask task, const RewardInputs& in, double omega1,
                                       double omega2);

/// Group sizes: rich = ceil(0.1 N), poor = floor(0.5 N).
[[nodiscard]] constexpr std::size_t rich_group_size(std::size_t n) { return (n + 9) / 10; }
[[nodiscard]] constexpr std::size_t poor_group_size(std::size_t n) { return n / 2; }

/// Household indices ordered richest first; ties go to the lower index.
[[nodiscard]] std::vector<std::size_t> wealth_ranking(std::span<const double> assets);

/// Same ordering written into an existing buffer (resized to assets.size()).
void wealth_ranking(std::span<const double> assets, std::vector<std::size_t>& order);

[[nodiscard]] GroupStats group_stats(std::span<const double> assets,
                                     std::span<const double> incomes,
                                     std::span<const double> productivities);

/// group_stats using a precomputed richest-first ranking.
[[nodiscard]] GroupStats group_stats_ranked(std::span<const std::size_t> order,
                                            std::span<const double> assets,
                                            std::span<const double> incomes,
                                            std::span<const double> productivities);

/// Header of the metrics CSV, comma separated, no trailing newline.
[[nodiscard]] std::string_view metrics_csv_header();

/// Writes one metrics row followed by a newline. Doubles use the shortest
/// representation that round-trips, so output is byte-stable.
void write_metrics_csv_row(std::ostream& out, const EpisodeMetrics& m);

}  // namespace metrics
}  // namespace taxai
