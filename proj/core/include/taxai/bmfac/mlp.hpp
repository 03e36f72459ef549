#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace taxai::bmfac {

enum class Activation : std::uint8_t { ReLU = 0, Tanh = 1 };

/// Fully connected network with a linear output layer. Batches are stored
/// one sample per column. All weights and biases live in one flat vector,
/// layer by layer: W_k (column-major, out x in) followed by b_k.
class Mlp {
 public:
  Mlp() = default;
  /// dims = {input, hidden..., output}; weights and biases are drawn from
  /// U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  Mlp(std::vector<int> dims, Activation hidden, std::uint64_t seed);

  /// Intermediate values kept by forward for backward.
  struct Tape {
    std::vector<Eigen::MatrixXd> inputs;  // input of each layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of each hidden layer
  };

  [[nodiscard]] Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape& tape) const;

  /// Accumulates dL/dparams into grad (resized and zeroed if its size is
  /// wrong) and returns dL/dx.
  Eigen::MatrixXd backward(const Tape& tape, const Eigen::MatrixXd& grad_out,
                           Eigen::VectorXd& grad) const;

  [[nodiscard]] static std::size_t parameter_count(const std::vector<int>& dims);
  [[nodiscard]] std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }
  [[nodiscard]] int input_dim() const { return dims_.empty() ? 0 : dims_.front(); }
  [[nodiscard]] int output_dim() const { return dims_.empty() ? 0 : dims_.back(); }
  [[nodiscard]] const std::vector<int>& dims() const { return dims_; }
  [[nodiscard]] Activation activation() const { return activation_; }

  [[nodiscard]] Eigen::VectorXd& parameters() { return params_; }
  [[nodiscard]] const Eigen::VectorXd& parameters() const { return params_; }

  /// Views of layer k's weight matrix and bias.
  [[nodiscard]] Eigen::Map<const Eigen::MatrixXd> weight(std::size_t k) const;
  [[nodiscard]] Eigen::Map<const Eigen::VectorXd> bias(std::size_t k) const;
  [[nodiscard]] std::size_t layer_count() const { return dims_.size() < 2 ? 0 : dims_.size() - 1; }

  /// this <- (1 - rate) this + rate source
  void soft_update_from(const Mlp& source, double rate);

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> offsets_;  // start of W_k in params_
  Activation activation_ = Activation::Tanh;
  Eigen::VectorXd params_;
};

}  // namespace taxai::bmfac
