#include "taxai/bmfac/mlp.hpp"

#include <cmath>
#include <random>
#include <string>

#include "taxai/errors.hpp"

namespace taxai::bmfac {

std::size_t Mlp::parameter_count(const std::vector<int>& dims) {
  std::size_t n = 0;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    n += static_cast<std::size_t>(dims[k]) * static_cast<std::size_t>(dims[k + 1]) +
         static_cast<std::size_t>(dims[k + 1]);
  }
  return n;
}

Mlp::Mlp(std::vector<int> dims, Activation hidden, std::uint64_t seed)
    : dims_(std::move(dims)), activation_(hidden) {
  if (dims_.size() < 2) throw ConfigError("mlp: need at least input and output dims");
  for (int d : dims_) {
    if (d < 1) throw ConfigError("mlp: layer dims must be >= 1");
  }
  params_.resize(static_cast<Eigen::Index>(parameter_count(dims_)));
  std::mt19937_64 rng(seed);
  std::size_t offset = 0;
  for (std::size_t k = 0; k + 1 < dims_.size(); ++k) {
    offsets_.push_back(offset);
    const double limit = 1.0 / std::sqrt(static_cast<double>(dims_[k]));
    std::uniform_real_distribution<double> u(-limit, limit);
    const std::size_t count = static_cast<std::size_t>(dims_[k] + 1) *
                              static_cast<std::size_t>(dims_[k + 1]);
    for (std::size_t j = 0; j < count; ++j) params_[static_cast<Eigen::Index>(offset + j)] = u(rng);
    offset += count;
  }
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(std::size_t k) const {
  return {params_.data() + offsets_[k], dims_[k + 1], dims_[k]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(std::size_t k) const {
  return {params_.data() + offsets_[k] + static_cast<std::size_t>(dims_[k + 1]) * dims_[k],
          dims_[k + 1]};
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Tape tape;
  return forward(x, tape);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Tape& tape) const {
  if (x.rows() != input_dim()) {
    throw DimensionError("mlp forward: expected " + std::to_string(input_dim()) +
                         " input rows, got " + std::to_string(x.rows()));
  }
  const std::size_t layers = layer_count();
  tape.inputs.resize(layers);
  tape.pre.resize(layers - 1);
  Eigen::MatrixXd h = x;
  for (std::size_t k = 0; k < layers; ++k) {
    tape.inputs[k] = h;
    Eigen::MatrixXd z = weight(k) * h;
    z.colwise() += bias(k);
    if (k + 1 == layers) return z;
    tape.pre[k] = z;
    h = activation_ == Activation::ReLU ? Eigen::MatrixXd(z.cwiseMax(0.0))
                                        : Eigen::MatrixXd(z.array().tanh().matrix());
  }
  return h;
}

Eigen::MatrixXd Mlp::backward(const Tape& tape, const Eigen::MatrixXd& grad_out,
                              Eigen::VectorXd& grad) const {
  if (grad.size() != params_.size()) grad = Eigen::VectorXd::Zero(params_.size());
  const std::size_t layers = layer_count();
  if (tape.inputs.size() != layers || grad_out.rows() != output_dim() ||
      grad_out.cols() != tape.inputs.front().cols()) {
    throw DimensionError("mlp backward: tape or gradient shape mismatch");
  }
  Eigen::MatrixXd delta = grad_out;
  for (std::size_t k = layers; k-- > 0;) {
    const int out = dims_[k + 1];
    const int in = dims_[k];
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + offsets_[k], out, in);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offsets_[k] + static_cast<std::size_t>(out) * in,
                                   out);
    gw.noalias() += delta * tape.inputs[k].transpose();
    gb += delta.rowwise().sum();
    Eigen::MatrixXd back = weight(k).transpose() * delta;
    if (k == 0) return back;
    const auto& z = tape.pre[k - 1];
    if (activation_ == Activation::ReLU) {
      delta = back.array() * (z.array() > 0.0).cast<double>();
    } else {
      delta = back.array() * (1.0 - z.array().tanh().square());
    }
  }
  return delta;
}

void Mlp::soft_update_from(const Mlp& source, double rate) {
  if (source.params_.size() != params_.size()) {
    throw DimensionError("soft update: parameter counts differ");
  }
  params_ = (1.0 - rate) * params_ + rate * source.params_;
}

}  // namespace taxai::bmfac
