#include "taxai/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "taxai/errors.hpp"
#include "taxai/seed.hpp"

namespace taxai::ga {

void GAConfig::validate() const {
  if (dna_size < 1) throw ConfigError("ga: dna_size must be >= 1");
  if (pop_size < 2) throw ConfigError("ga: pop_size must be >= 2");
  if (max_generations < 0) throw ConfigError("ga: max_generations must be >= 0");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    throw ConfigError("ga: crossover_rate must lie in [0,1]");
  }
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw ConfigError("ga: mutation_rate must lie in [0,1]");
  }
  if (elite < 0 || elite >= pop_size) throw ConfigError("ga: elite must lie in [0, pop_size)");
  if (!gene_bounds.empty()) {
    if (gene_bounds.size() != static_cast<std::size_t>(dna_size)) {
      throw ConfigError("ga: gene_bounds length must equal dna_size");
    }
    for (const auto& b : gene_bounds) {
      if (!std::isfinite(b.low) || !std::isfinite(b.high) || !(b.low <= b.high)) {
        throw ConfigError("ga: gene bounds need finite low <= high");
      }
    }
  }
}

Interval GAConfig::bound(std::size_t gene) const {
  return gene_bounds.empty() ? Interval{0.0, 1.0} : gene_bounds[gene];
}

namespace {

void evaluate(const Fitness& fitness, const std::vector<std::vector<double>>& pop,
              std::vector<double>& scores, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(pop.size());
#pragma omp parallel for num_threads(threads) schedule(dynamic) if (threads > 1)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const double f = fitness(pop[static_cast<std::size_t>(k)]);
    scores[static_cast<std::size_t>(k)] = std::isnan(f) ? -std::numeric_limits<double>::infinity() : f;
  }
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

GAResult optimize(const Fitness& fitness, const GAConfig& config, std::uint64_t seed,
                  int threads) {
  config.validate();
  if (threads < 1) throw ConfigError("ga: threads must be >= 1");
  const auto dna = static_cast<std::size_t>(config.dna_size);
  const auto pop_size = static_cast<std::size_t>(config.pop_size);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);
  auto draw_gene = [&](std::size_t g) {
    const Interval b = config.bound(g);
    return b.low + (b.high - b.low) * unit(rng);
  };

  std::vector<std::vector<double>> pop(pop_size, std::vector<double>(dna));
  for (auto& ind : pop) {
    for (std::size_t g = 0; g < dna; ++g) ind[g] = draw_gene(g);
  }
  std::vector<double> scores(pop_size);
  evaluate(fitness, pop, scores, threads);

  GAResult result;
  std::size_t best = argmax(scores);
  result.best_genome = pop[best];
  result.best_fitness = scores[best];
  result.history.push_back(result.best_fitness);

  std::vector<std::vector<double>> next(pop_size, std::vector<double>(dna));
  std::vector<std::size_t> ranked(pop_size);
  auto tournament = [&]() -> const std::vector<double>& {
    const std::size_t a = pick(rng);
    const std::size_t b = pick(rng);
    return scores[a] >= scores[b] ? pop[a] : pop[b];
  };

  for (int gen = 1; gen <= config.max_generations; ++gen) {
    std::iota(ranked.begin(), ranked.end(), std::size_t{0});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    const auto elite = static_cast<std::size_t>(config.elite);
    for (std::size_t k = 0; k < elite; ++k) next[k] = pop[ranked[k]];
    for (std::size_t k = elite; k < pop_size; ++k) {
      auto& child = next[k];
      child = tournament();
      if (unit(rng) < config.crossover_rate) {
        const auto& other = tournament();
        for (std::size_t g = 0; g < dna; ++g) {
          if (unit(rng) < 0.5) child[g] = other[g];
        }
      }
      for (std::size_t g = 0; g < dna; ++g) {
        if (unit(rng) < config.mutation_rate) child[g] = draw_gene(g);
      }
    }
    pop.swap(next);
    evaluate(fitness, pop, scores, threads);
    best = argmax(scores);
    if (scores[best] > result.best_fitness) {
      result.best_fitness = scores[best];
      result.best_genome = pop[best];
    }
    result.history.push_back(result.best_fitness);
  }
  return result;
}

GovernmentAction decode_genome(std::span<const double> genome, const ActionBounds& bounds,
                               const GAConfig& config,
                               std::span<const int, kGovernmentActionDim> groups) {
  const int total = std::accumulate(groups.begin(), groups.end(), 0);
  if (static_cast<int>(genome.size()) != total || total != config.dna_size) {
    throw DimensionError("decode_genome: genome length must equal the sum of the gene groups");
  }
  const auto ranges = bounds.government();
  std::array<double, kGovernmentActionDim> out{};
  std::size_t g = 0;
  for (std::size_t k = 0; k < kGovernmentActionDim; ++k) {
    if (groups[k] < 1) throw ConfigError("decode_genome: every gene group needs >= 1 gene");
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    for (int j = 0; j < groups[k]; ++j, ++g) {
      mean += genome[g];
      lo += config.bound(g).low;
      hi += config.bound(g).high;
    }
    mean /= groups[k];
    lo /= groups[k];
    hi /= groups[k];
    const double unit = hi > lo ? std::clamp((mean - lo) / (hi - lo), 0.0, 1.0) : 0.0;
    out[k] = ranges[k].low + unit * (ranges[k].high - ranges[k].low);
  }
  return GovernmentAction::from_array(out);
}

PolicySearchResult search_government_policy(const EnvConfig& env_config,
                                            const PolicySearchConfig& config, std::uint64_t seed) {
  if (config.rollouts < 1) throw ConfigError("ga: rollouts must be >= 1");
  env_config.validate();
  std::vector<std::uint64_t> rollout_seeds;
  for (int k = 0; k < config.rollouts; ++k) {
    rollout_seeds.push_back(derive_seed(seed, 1000 + static_cast<std::uint64_t>(k)));
  }
  EnvConfig single = env_config;
  single.threads = 1;

  auto fitness = [&](std::span<const double> genome) {
    const GovernmentAction action = decode_genome(genome, single.bounds, config.ga);
    Environment env(single);
    FixedGovernmentPolicy gov(action);
    HeathcoteHouseholdPolicy households(single.model, config.heathcote,
                                        single.bounds.savings_epsilon);
    double total = 0.0;
    for (const auto s : rollout_seeds) {
      total += run_episode(env, gov, households, s).total_government_reward;
    }
    return total / static_cast<double>(rollout_seeds.size());
  };

  PolicySearchResult out;
  out.ga = optimize(fitness, config.ga, derive_seed(seed, 7), config.threads);
  out.action = decode_genome(out.ga.best_genome, single.bounds, config.ga);
  return out;
}

}  // namespace taxai::ga
