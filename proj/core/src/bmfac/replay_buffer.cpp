#include "taxai/bmfac/replay_buffer.hpp"

#include <algorithm>
#include <unordered_set>

#include "taxai/errors.hpp"

namespace taxai::bmfac {

std::array<double, kHouseholdActionDim> Transition::mean_action() const {
  std::array<double, kHouseholdActionDim> m{};
  const std::size_t n = household_count();
  if (n == 0) return m;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < kHouseholdActionDim; ++k) m[k] += hh_actions[i * kHouseholdActionDim + k];
  }
  for (double& v : m) v /= static_cast<double>(n);
  return m;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay buffer capacity must be >= 1");
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
    return;
  }
  data_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= data_.size()) throw DimensionError("replay buffer index out of range");
  return data_[(head_ + i) % data_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch,
                                                      std::mt19937_64& rng) const {
  const std::size_t n = data_.size();
  if (batch > n) throw DimensionError("replay buffer: batch larger than contents");
  std::vector<std::size_t> out;
  out.reserve(batch);
  std::unordered_set<std::size_t> chosen;
  for (std::size_t j = n - batch; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng);
    const std::size_t v = chosen.insert(t).second ? t : j;
    if (v == j) chosen.insert(j);
    out.push_back(v);
  }
  return out;
}

}  // namespace taxai::bmfac
