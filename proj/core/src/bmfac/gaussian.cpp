#include "taxai/bmfac/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "taxai/errors.hpp"

namespace taxai::bmfac {

namespace {

void check_raw(const GaussianHead& head, const Eigen::MatrixXd& raw) {
  if (raw.rows() != 2 * head.action_dim) {
    throw DimensionError("gaussian head: raw output must have 2 * action_dim rows");
  }
}

}  // namespace

Eigen::MatrixXd GaussianHead::mean(const Eigen::MatrixXd& raw) const {
  check_raw(*this, raw);
  return raw.topRows(action_dim);
}

Eigen::MatrixXd GaussianHead::log_std(const Eigen::MatrixXd& raw) const {
  check_raw(*this, raw);
  const double half = 0.5 * (log_std_max - log_std_min);
  return ((raw.bottomRows(action_dim).array().tanh() + 1.0) * half + log_std_min).matrix();
}

Eigen::RowVectorXd GaussianHead::log_prob(const Eigen::MatrixXd& raw,
                                          const Eigen::MatrixXd& z) const {
  const Eigen::MatrixXd mu = mean(raw);
  const Eigen::MatrixXd ls = log_std(raw);
  const Eigen::ArrayXXd u = (z - mu).array() / ls.array().exp();
  const double log_root_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
  return (-0.5 * u.square() - ls.array() - log_root_two_pi).matrix().colwise().sum();
}

Eigen::MatrixXd GaussianHead::log_prob_grad(const Eigen::MatrixXd& raw, const Eigen::MatrixXd& z,
                                            const Eigen::RowVectorXd& weight) const {
  const Eigen::MatrixXd mu = mean(raw);
  const Eigen::MatrixXd ls = log_std(raw);
  const Eigen::ArrayXXd inv_var = (-2.0 * ls.array()).exp();
  const Eigen::ArrayXXd diff = (z - mu).array();
  const double half = 0.5 * (log_std_max - log_std_min);
  const Eigen::ArrayXXd dls_draw = half * (1.0 - raw.bottomRows(action_dim).array().tanh().square());

  Eigen::MatrixXd grad(raw.rows(), raw.cols());
  grad.topRows(action_dim) = (diff * inv_var).matrix();
  grad.bottomRows(action_dim) = ((diff.square() * inv_var - 1.0) * dls_draw).matrix();
  for (Eigen::Index b = 0; b < grad.cols(); ++b) grad.col(b) *= weight[b];
  return grad;
}

Eigen::MatrixXd GaussianHead::sample(const Eigen::MatrixXd& raw,
                                     const Eigen::MatrixXd& noise) const {
  return mean(raw) + (log_std(raw).array().exp() * noise.array()).matrix();
}

Eigen::MatrixXd GaussianHead::squash(const Eigen::MatrixXd& z) const {
  if (z.rows() != action_dim || low.size() != action_dim || high.size() != action_dim) {
    throw DimensionError("gaussian head: squash dimension mismatch");
  }
  const Eigen::ArrayXXd s = 1.0 / (1.0 + (-z.array()).exp());
  Eigen::MatrixXd out(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    out.row(r) = (low[r] + (high[r] - low[r]) * s.row(r)).matrix();
  }
  return out;
}

}  // namespace taxai::bmfac
