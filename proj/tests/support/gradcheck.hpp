#pragma once

// Central finite-difference checks for the network losses. Each returns
// the worst per-entry relative error between analytic and numeric
// gradients, with a floor on the denominator for entries near zero.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "taxai/bmfac/bmfac.hpp"
#include "taxai/bmfac/gaussian.hpp"
#include "taxai/bmfac/mlp.hpp"

namespace taxai::testing {

inline double worst_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric,
                                   double floor = 1e-6) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < analytic.size(); ++k) {
    const double d = std::max({std::abs(analytic[k]), std::abs(numeric[k]), floor});
    worst = std::max(worst, std::abs(analytic[k] - numeric[k]) / d);
  }
  return worst;
}

inline Eigen::VectorXd numeric_gradient(Eigen::VectorXd& params, const std::function<double()>& loss,
                                        double h = 1e-6) {
  Eigen::VectorXd g(params.size());
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    const double keep = params[k];
    params[k] = keep + h;
    const double up = loss();
    params[k] = keep - h;
    const double down = loss();
    params[k] = keep;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                                     double scale = 1.0) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = scale * n01(rng);
  return m;
}

/// Critic of the household critic's input width, small enough for the
/// parameter budget.
inline double critic_gradient_error(std::uint64_t seed) {
  using namespace bmfac;
  std::mt19937_64 rng(seed);
  Mlp critic({kHouseholdCriticInput, 16, 16, 1}, Activation::Tanh, seed);
  CriticBatch batch{random_matrix(kHouseholdCriticInput, 8, rng), random_matrix(1, 8, rng)};
  Eigen::VectorXd grad;
  (void)critic_loss(critic, batch, &grad);
  const auto numeric = numeric_gradient(critic.parameters(), [&] { return critic_loss(critic, batch, nullptr); });
  return worst_relative_error(grad, numeric);
}

inline double actor_gradient_error(std::uint64_t seed) {
  using namespace bmfac;
  std::mt19937_64 rng(seed);
  Mlp actor({kHouseholdActorInput, 16, 16, 2 * kHouseholdActionDim}, Activation::Tanh, seed + 1);
  GaussianHead head;
  head.action_dim = kHouseholdActionDim;
  head.low = Eigen::Vector2d(0.0, 0.0);
  head.high = Eigen::Vector2d(1.0, 1.0);
  ActorBatch batch{random_matrix(kHouseholdActorInput, 8, rng), random_matrix(2, 8, rng),
                   random_matrix(1, 8, rng)};
  Eigen::VectorXd grad;
  (void)actor_surrogate_loss(actor, head, batch, &grad);
  const auto numeric = numeric_gradient(actor.parameters(),
                                        [&] { return actor_surrogate_loss(actor, head, batch, nullptr); });
  return worst_relative_error(grad, numeric);
}

inline double government_actor_gradient_error(std::uint64_t seed) {
  using namespace bmfac;
  std::mt19937_64 rng(seed);
  Mlp actor({kGovernmentActorInput, 16, 16, 2 * kGovernmentActionDim}, Activation::Tanh, seed + 2);
  GaussianHead head;
  head.action_dim = kGovernmentActionDim;
  head.low = Eigen::VectorXd::Zero(kGovernmentActionDim);
  head.high = Eigen::VectorXd::Ones(kGovernmentActionDim);
  ActorBatch batch{random_matrix(kGovernmentActorInput, 8, rng),
                   random_matrix(kGovernmentActionDim, 8, rng), random_matrix(1, 8, rng)};
  Eigen::VectorXd grad;
  (void)actor_surrogate_loss(actor, head, batch, &grad);
  const auto numeric = numeric_gradient(actor.parameters(),
                                        [&] { return actor_surrogate_loss(actor, head, batch, nullptr); });
  return worst_relative_error(grad, numeric);
}

}  // namespace taxai::testing
