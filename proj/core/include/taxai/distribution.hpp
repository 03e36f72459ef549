#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace taxai {

enum class DistributionKind : std::uint8_t { PointMass, LogNormal, Pareto, QuantileTable };

/// One knot of an empirical quantile function: a fraction F of households
/// holds at most `asset`.
struct QuantileKnot {
  double cumulative_fraction = 0.0;
  double asset = 0.0;
};

/// Initial wealth distribution across households.
///
/// QuantileTable is evaluated as a piecewise-linear inverse CDF through the
/// knots, constant at the first knot's level below its fraction.
struct InitialDistribution {
  DistributionKind kind = DistributionKind::QuantileTable;
  double point_value = 0.0;   // PointMass
  double log_mean = 0.0;      // LogNormal: mean of log asset
  double log_sd = 1.0;        // LogNormal: sd of log asset
  double pareto_scale = 1.0;  // Pareto: minimum asset x_m
  double pareto_shape = 2.0;  // Pareto: tail index
  std::vector<QuantileKnot> table;

  static InitialDistribution point_mass(double value);
  static InitialDistribution log_normal(double log_mean, double log_sd);
  static InitialDistribution pareto(double scale, double shape);
  static InitialDistribution quantile_table(std::vector<QuantileKnot> knots);

  /// Throws ConfigError with the violated invariant.
  void validate() const;

  /// Quantile function evaluated at u in [0,1).
  [[nodiscard]] double inverse_cdf(double u) const;
};

/// n draws via inverse-CDF sampling, deterministic in seed.
[[nodiscard]] std::vector<double> sample_initial_assets(const InitialDistribution& dist,
                                                        std::size_t n, std::uint64_t seed);

/// Two-column CSV (fraction, asset); an optional non-numeric header row and
/// '#' comment lines are skipped. Throws ConfigError on malformed content.
[[nodiscard]] InitialDistribution load_quantile_table_csv(const std::filesystem::path& path);

/// Synthetic SCF-style net-worth quantiles (currency units) bundled with the
/// library; the same table ships as data/scf_synthetic_quantiles.csv. Its
/// wealth Gini is about 0.79.
[[nodiscard]] const std::vector<QuantileKnot>& synthetic_scf_quantiles();

}  // namespace taxai
