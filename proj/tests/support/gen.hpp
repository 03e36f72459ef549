#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace taxai::testing {

// Small random-case generator for property tests. Every case is derived
// from (seed, case index) so a failure can be replayed on its own.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  // log-uniform on [lo, hi], lo > 0
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

  // Nonnegative values with occasional exact zeros and heavy tails.
  std::vector<double> wealth_vector(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = coin(0.1) ? 0.0 : log_uniform(1e-3, 1e6);
    return v;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline constexpr int kCases = 1000;

}  // namespace taxai::testing
