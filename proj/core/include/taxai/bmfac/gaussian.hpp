#pragma once

#include <Eigen/Dense>

namespace taxai::bmfac {

/// Diagonal Gaussian policy head. The actor network emits 2k rows per
/// sample: k means followed by k unconstrained log-std values that are
/// mapped into [log_std_min, log_std_max] through tanh. Samples z are
/// squashed into [low, high] by low + (high - low) sigmoid(z).
struct GaussianHead {
  int action_dim = 1;
  double log_std_min = -5.0;
  double log_std_max = 2.0;
  Eigen::VectorXd low;
  Eigen::VectorXd high;

  [[nodiscard]] Eigen::MatrixXd mean(const Eigen::MatrixXd& raw) const;
  [[nodiscard]] Eigen::MatrixXd log_std(const Eigen::MatrixXd& raw) const;

  /// Log density of each column of z under N(mean, exp(log_std)^2).
  [[nodiscard]] Eigen::RowVectorXd log_prob(const Eigen::MatrixXd& raw,
                                            const Eigen::MatrixXd& z) const;

  /// d/d raw of sum_b weight_b log_prob_b.
  [[nodiscard]] Eigen::MatrixXd log_prob_grad(const Eigen::MatrixXd& raw, const Eigen::MatrixXd& z,
                                              const Eigen::RowVectorXd& weight) const;

  /// z = mean + exp(log_std) * noise
  [[nodiscard]] Eigen::MatrixXd sample(const Eigen::MatrixXd& raw,
                                       const Eigen::MatrixXd& noise) const;

  [[nodiscard]] Eigen::MatrixXd squash(const Eigen::MatrixXd& z) const;
};

}  // namespace taxai::bmfac
