#pragma once

#include <array>
#include <cstddef>
#include <random>
#include <vector>

#include "taxai/environment.hpp"

namespace taxai::bmfac {

/// One environment step for every agent.
struct Transition {
  std::array<double, kGovernmentObsDim> gov_obs{};
  std::array<double, kGovernmentActionDim> gov_action{};
  double gov_reward = 0.0;
  std::array<double, kGovernmentObsDim> next_gov_obs{};
  std::vector<double> hh_obs;       // N x 9
  std::vector<double> hh_actions;   // N x 2
  std::vector<double> hh_rewards;   // N
  std::vector<double> next_hh_obs;  // N x 9
  /// Mean household action of the previous step (household actor input).
  std::array<double, kHouseholdActionDim> prev_mean_action{};
  bool done = false;

  [[nodiscard]] std::size_t household_count() const { return hh_rewards.size(); }
  /// Mean household action of this step.
  [[nodiscard]] std::array<double, kHouseholdActionDim> mean_action() const;
};

/// Fixed-capacity ring buffer; the oldest entry is overwritten once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  [[nodiscard]] std::size_t size() const { return data_.size(); }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }
  /// Entries in insertion order, 0 = oldest retained.
  [[nodiscard]] const Transition& at(std::size_t i) const;

  /// batch distinct indices drawn uniformly (Floyd's algorithm). Throws
  /// DimensionError if batch > size().
  [[nodiscard]] std::vector<std::size_t> sample_indices(std::size_t batch,
                                                        std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> data_;
};

}  // namespace taxai::bmfac
