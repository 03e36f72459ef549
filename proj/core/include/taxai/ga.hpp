#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "taxai/baselines.hpp"
#include "taxai/environment.hpp"

namespace taxai::ga {

struct GAConfig {
  int dna_size = 12;
  int pop_size = 100;
  double crossover_rate = 0.8;
  double mutation_rate = 0.1;
  int max_generations = 200;
  /// Empty means [0,1] for every gene.
  std::vector<Interval> gene_bounds;
  /// Individuals copied unchanged into the next generation.
  int elite = 1;

  void validate() const;
  [[nodiscard]] Interval bound(std::size_t gene) const;
};

struct GAResult {
  std::vector<double> best_genome;
  double best_fitness = 0.0;
  /// Best fitness of generation 0..max_generations.
  std::vector<double> history;
};

/// Must be safe to call concurrently when threads > 1.
using Fitness = std::function<double(std::span<const double>)>;

/// Elitist generational GA: binary tournament selection, uniform crossover
/// (each gene swapped with probability 0.5) applied at crossover_rate, and
/// simple mutation that redraws a gene uniformly within its bounds. Fitness
/// evaluation may run on `threads` threads; results do not depend on it.
[[nodiscard]] GAResult optimize(const Fitness& fitness, const GAConfig& config, std::uint64_t seed,
                                int threads = 1);

/// Genes per action component (tau, xi, tau_a, xi_a, r^G).
inline constexpr std::array<int, kGovernmentActionDim> kDefaultGeneGroups{3, 2, 3, 2, 2};

/// Averages each gene group, rescales it from its gene bounds into the
/// matching action interval.
[[nodiscard]] GovernmentAction decode_genome(std::span<const double> genome,
                                             const ActionBounds& bounds, const GAConfig& config,
                                             std::span<const int, kGovernmentActionDim> groups =
                                                 kDefaultGeneGroups);

struct PolicySearchConfig {
  GAConfig ga;
  int rollouts = 3;
  baselines::HeathcoteConfig heathcote;
  int threads = 1;
};

struct PolicySearchResult {
  GovernmentAction action;
  GAResult ga;
};

/// Searches a static government action maximizing the mean episodic
/// government reward over `rollouts` seeded episodes, households following
/// the Heathcote strategy. Rollout seeds are shared by all individuals.
[[nodiscard]] PolicySearchResult search_government_policy(const EnvConfig& env_config,
                                                          const PolicySearchConfig& config,
                                                          std::uint64_t seed);

}  // namespace taxai::ga
