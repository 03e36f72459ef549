#include "taxai/bmfac/adam.hpp"

#include <cmath>

#include "taxai/errors.hpp"

namespace taxai::bmfac {

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state, double lr,
               const AdamHyper& hyper) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw DimensionError("adam_step: params, grads and moments must share one size");
  }
  ++state.step;
  state.m = hyper.beta1 * state.m + (1.0 - hyper.beta1) * grads;
  state.v = hyper.beta2 * state.v + (1.0 - hyper.beta2) * grads.cwiseProduct(grads);
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + hyper.epsilon);
}

}  // namespace taxai::bmfac
