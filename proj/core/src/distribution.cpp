#include "taxai/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/lognormal.hpp>

#include "taxai/errors.hpp"

namespace taxai {

InitialDistribution InitialDistribution::point_mass(double value) {
  InitialDistribution d;
  d.kind = DistributionKind::PointMass;
  d.point_value = value;
  return d;
}

InitialDistribution InitialDistribution::log_normal(double log_mean, double log_sd) {
  InitialDistribution d;
  d.kind = DistributionKind::LogNormal;
  d.log_mean = log_mean;
  d.log_sd = log_sd;
  return d;
}

InitialDistribution InitialDistribution::pareto(double scale, double shape) {
  InitialDistribution d;
  d.kind = DistributionKind::Pareto;
  d.pareto_scale = scale;
  d.pareto_shape = shape;
  return d;
}

InitialDistribution InitialDistribution::quantile_table(std::vector<QuantileKnot> knots) {
  InitialDistribution d;
  d.kind = DistributionKind::QuantileTable;
  d.table = std::move(knots);
  return d;
}

void InitialDistribution::validate() const {
  switch (kind) {
    case DistributionKind::PointMass:
      if (!(point_value >= 0.0) || !std::isfinite(point_value)) {
        throw ConfigError("point mass value must be finite and >= 0");
      }
      return;
    case DistributionKind::LogNormal:
      if (!std::isfinite(log_mean) || !(log_sd >= 0.0) || !std::isfinite(log_sd)) {
        throw ConfigError("log-normal needs finite log_mean and log_sd >= 0");
      }
      return;
    case DistributionKind::Pareto:
      if (!(pareto_scale > 0.0) || !(pareto_shape > 0.0)) {
        throw ConfigError("pareto needs scale > 0 and shape > 0");
      }
      return;
    case DistributionKind::QuantileTable: {
      if (table.empty()) throw ConfigError("quantile table is empty");
      double prev_f = 0.0;
      double prev_a = 0.0;
      for (std::size_t k = 0; k < table.size(); ++k) {
        const auto& knot = table[k];
        if (!(knot.cumulative_fraction > prev_f) || knot.cumulative_fraction > 1.0) {
          throw ConfigError("quantile table fractions must increase strictly within (0,1]");
        }
        if (!(knot.asset >= 0.0) || !std::isfinite(knot.asset) ||
            (k > 0 && knot.asset < prev_a)) {
          throw ConfigError("quantile table assets must be finite, >= 0 and nondecreasing");
        }
        prev_f = knot.cumulative_fraction;
        prev_a = knot.asset;
      }
      return;
    }
  }
}

double InitialDistribution::inverse_cdf(double u) const {
  switch (kind) {
    case DistributionKind::PointMass: return point_value;
    case DistributionKind::LogNormal:
      if (log_sd == 0.0) return std::exp(log_mean);
      return boost::math::quantile(boost::math::lognormal_distribution<double>(log_mean, log_sd),
                                   std::clamp(u, 1e-300, 1.0 - 1e-16));
    case DistributionKind::Pareto: return pareto_scale * std::pow(1.0 - u, -1.0 / pareto_shape);
    case DistributionKind::QuantileTable: {
      const auto it = std::lower_bound(
          table.begin(), table.end(), u,
          [](const QuantileKnot& k, double x) { return k.cumulative_fraction < x; });
      if (it == table.begin()) return table.front().asset;
      if (it == table.end()) return table.back().asset;
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (u - lo.cumulative_fraction) / (hi.cumulative_fraction - lo.cumulative_fraction);
      return lo.asset + w * (hi.asset - lo.asset);
    }
  }
  return 0.0;
}

std::vector<double> sample_initial_assets(const InitialDistribution& dist, std::size_t n,
                                          std::uint64_t seed) {
  dist.validate();
  if (n == 0) throw ConfigError("sample_initial_assets: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& a : out) a = dist.inverse_cdf(unit(rng));
  return out;
}

InitialDistribution load_quantile_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open quantile table '" + path.string() + "'");
  std::vector<QuantileKnot> knots;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
    }
    try {
      knots.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    } catch (const std::invalid_argument&) {
      if (knots.empty()) continue;  // header row
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": non-numeric value");
    }
  }
  auto dist = InitialDistribution::quantile_table(std::move(knots));
  dist.validate();
  return dist;
}

const std::vector<QuantileKnot>& synthetic_scf_quantiles() {
  static const std::vector<QuantileKnot> table = {
      {0.05, 0.0},        {0.10, 2000.0},      {0.20, 14000.0},      {0.25, 30000.0},
      {0.30, 50000.0},    {0.40, 100000.0},    {0.50, 192900.0},     {0.60, 300000.0},
      {0.70, 480000.0},   {0.75, 659000.0},    {0.80, 850000.0},     {0.90, 1938000.0},
      {0.95, 3600000.0},  {0.99, 9500000.0},   {0.999, 25000000.0},  {1.0, 50000000.0},
  };
  return table;
}

}  // namespace taxai
