#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "taxai/bmfac/adam.hpp"
#include "taxai/bmfac/checkpoint.hpp"
#include "taxai/bmfac/gaussian.hpp"
#include "taxai/bmfac/mlp.hpp"
#include "taxai/bmfac/replay_buffer.hpp"
#include "taxai/errors.hpp"

namespace {

using namespace taxai;
using namespace taxai::bmfac;
using taxai::testing::numeric_gradient;
using taxai::testing::random_matrix;
using taxai::testing::worst_relative_error;

TEST(Mlp, ParameterCount) {
  EXPECT_EQ(Mlp::parameter_count({3, 4, 2}), 3u * 4 + 4 + 4 * 2 + 2);
  const Mlp m({5, 7, 7, 1}, Activation::ReLU, 0);
  EXPECT_EQ(m.parameter_count(), Mlp::parameter_count({5, 7, 7, 1}));
  EXPECT_EQ(m.layer_count(), 3u);
  EXPECT_THROW(Mlp({3}, Activation::ReLU, 0), ConfigError);
  EXPECT_THROW(Mlp({3, 0, 1}, Activation::ReLU, 0), ConfigError);
}

TEST(Mlp, ZeroWeightsReturnLastBias) {
  Mlp m({3, 4, 2}, Activation::Tanh, 1);
  m.parameters().setZero();
  const auto n = m.parameter_count();
  m.parameters()[static_cast<Eigen::Index>(n - 2)] = 0.25;
  m.parameters()[static_cast<Eigen::Index>(n - 1)] = -3.0;
  const Eigen::MatrixXd y = m.forward(Eigen::MatrixXd::Random(3, 5));
  for (Eigen::Index c = 0; c < 5; ++c) {
    EXPECT_EQ(y(0, c), 0.25);
    EXPECT_EQ(y(1, c), -3.0);
  }
}

TEST(Mlp, HandComputedRelu) {
  Mlp m({2, 2, 1}, Activation::ReLU, 0);
  // W0 column-major {1, -1; 2, 0.5}, b0 {0, 0}, W1 {1, 1}, b1 {0.5}
  m.parameters() << 1, -1, 2, 0.5, 0, 0, 1, 1, 0.5;
  Eigen::MatrixXd x(2, 1);
  x << 1, 1;
  // hidden pre-activation (3, -0.5) -> relu (3, 0)
  EXPECT_DOUBLE_EQ(m.forward(x)(0, 0), 3.5);
  Mlp::Tape tape;
  (void)m.forward(x, tape);
  Eigen::VectorXd g;
  const Eigen::MatrixXd dx = m.backward(tape, Eigen::MatrixXd::Ones(1, 1), g);
  EXPECT_DOUBLE_EQ(dx(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(dx(1, 0), 2.0);
  // dW0 row 0 = x, row 1 = 0 (dead unit)
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
  EXPECT_DOUBLE_EQ(g[8], 1.0);
}

TEST(Mlp, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Mlp m({6, 10, 8, 3}, Activation::Tanh, seed);
    ASSERT_LE(m.parameter_count(), 1000u);
    const Eigen::MatrixXd x = random_matrix(6, 4, rng);
    const Eigen::MatrixXd w = random_matrix(3, 4, rng);
    auto loss = [&] { return (m.forward(x).array() * w.array()).sum(); };
    Mlp::Tape tape;
    (void)m.forward(x, tape);
    Eigen::VectorXd g;
    const Eigen::MatrixXd dx = m.backward(tape, w, g);
    EXPECT_LE(worst_relative_error(g, numeric_gradient(m.parameters(), loss)), 1e-4);

    // input gradient too
    Eigen::MatrixXd xv = x;
    Eigen::VectorXd flat = Eigen::Map<Eigen::VectorXd>(xv.data(), xv.size());
    auto loss_x = [&] {
      const Eigen::MatrixXd xx = Eigen::Map<const Eigen::MatrixXd>(flat.data(), 6, 4);
      return (m.forward(xx).array() * w.array()).sum();
    };
    const Eigen::VectorXd dx_flat = Eigen::Map<const Eigen::VectorXd>(dx.data(), dx.size());
    EXPECT_LE(worst_relative_error(dx_flat, numeric_gradient(flat, loss_x)), 1e-4);
  }
}

TEST(Mlp, ForwardRejectsWrongInput) {
  const Mlp m({3, 4, 1}, Activation::Tanh, 0);
  EXPECT_THROW((void)m.forward(Eigen::MatrixXd::Zero(2, 1)), DimensionError);
}

TEST(Mlp, SoftUpdate) {
  Mlp a({2, 3, 1}, Activation::Tanh, 0), b({2, 3, 1}, Activation::Tanh, 1);
  const Eigen::VectorXd pa = a.parameters(), pb = b.parameters();
  a.soft_update_from(b, 0.25);
  EXPECT_LE((a.parameters() - (0.75 * pa + 0.25 * pb)).cwiseAbs().maxCoeff(), 1e-15);
  a.soft_update_from(b, 1.0);
  EXPECT_EQ(a.parameters(), pb);
  Mlp c({2, 4, 1}, Activation::Tanh, 0);
  EXPECT_THROW(a.soft_update_from(c, 0.5), DimensionError);
}

TEST(Adam, FirstStepIsSignedLearningRate) {
  Eigen::VectorXd p(3), g(3);
  p << 1, 2, 3;
  g << 0.5, -20, 1e-3;
  AdamState s(3);
  adam_step(p, g, s, 0.01);
  EXPECT_NEAR(p[0], 1 - 0.01, 1e-9);
  EXPECT_NEAR(p[1], 2 + 0.01, 1e-9);
  EXPECT_NEAR(p[2], 3 - 0.01, 1e-6);
  EXPECT_EQ(s.step, 1);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(5, -1, 1), g = Eigen::VectorXd::Zero(5);
  const Eigen::VectorXd keep = p;
  AdamState s(5);
  for (int k = 0; k < 10; ++k) adam_step(p, g, s, 0.1);
  EXPECT_EQ(p, keep);
}

TEST(Adam, TwoStepScalarTrace) {
  Eigen::VectorXd p(1), g(1);
  p << 0.0;
  AdamState s(1);
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  g << 2.0;
  adam_step(p, g, s, lr);
  g << -1.0;
  adam_step(p, g, s, lr);
  // by hand
  double m = (1 - b1) * 2.0, v = (1 - b2) * 4.0, x = -lr * (m / (1 - b1)) / (std::sqrt(v / (1 - b2)) + eps);
  m = b1 * m + (1 - b1) * -1.0;
  v = b2 * v + (1 - b2) * 1.0;
  x -= lr * (m / (1 - b1 * b1)) / (std::sqrt(v / (1 - b2 * b2)) + eps);
  EXPECT_NEAR(p[0], x, 1e-12);
}

TEST(Adam, RejectsSizeMismatch) {
  Eigen::VectorXd p(2), g(3);
  AdamState s(2);
  EXPECT_THROW(adam_step(p, g, s, 0.1), DimensionError);
}

TEST(Gaussian, LogProbMatchesDensity) {
  GaussianHead h;
  h.action_dim = 1;
  h.low = Eigen::VectorXd::Zero(1);
  h.high = Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd raw(2, 1);
  raw << 0.3, 0.0;  // log std at the midpoint of its range
  const double ls = 0.5 * (h.log_std_min + h.log_std_max);
  Eigen::MatrixXd z(1, 1);
  z << 1.1;
  const double u = (1.1 - 0.3) / std::exp(ls);
  EXPECT_NEAR(h.log_prob(raw, z)[0], -0.5 * u * u - ls - 0.5 * std::log(2 * M_PI), 1e-12);
  const Eigen::MatrixXd sq = h.squash(Eigen::MatrixXd::Zero(1, 1));
  EXPECT_DOUBLE_EQ(sq(0, 0), 0.5);
}

TEST(Gaussian, LogProbGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  GaussianHead h;
  h.action_dim = 3;
  h.low = Eigen::VectorXd::Zero(3);
  h.high = Eigen::VectorXd::Ones(3);
  const Eigen::MatrixXd raw = random_matrix(6, 5, rng);
  const Eigen::MatrixXd z = random_matrix(3, 5, rng);
  const Eigen::RowVectorXd w = random_matrix(1, 5, rng);
  const Eigen::MatrixXd g = h.log_prob_grad(raw, z, w);
  Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(raw.data(), raw.size());
  auto loss = [&] {
    const Eigen::MatrixXd r = Eigen::Map<const Eigen::MatrixXd>(flat.data(), 6, 5);
    return (h.log_prob(r, z).array() * w.array()).sum();
  };
  const Eigen::VectorXd gf = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
  EXPECT_LE(worst_relative_error(gf, numeric_gradient(flat, loss)), 1e-4);
}

TEST(Losses, CriticAndActorGradients) {
  for (std::uint64_t s = 0; s < 3; ++s) {
    EXPECT_LE(taxai::testing::critic_gradient_error(s), 1e-4);
    EXPECT_LE(taxai::testing::actor_gradient_error(s), 1e-4);
    EXPECT_LE(taxai::testing::government_actor_gradient_error(s), 1e-4);
  }
}

Transition tagged(double tag) {
  Transition t;
  t.gov_reward = tag;
  t.hh_rewards = {tag, tag};
  t.hh_obs.assign(18, 0.0);
  t.next_hh_obs.assign(18, 0.0);
  t.hh_actions = {0.2, 0.4, 0.6, 0.8};
  return t;
}

TEST(ReplayBuffer, RingOverwritesOldest) {
  ReplayBuffer b(3);
  for (int k = 0; k < 5; ++k) b.push(tagged(k));
  EXPECT_EQ(b.size(), 3u);
  EXPECT_EQ(b.at(0).gov_reward, 2.0);
  EXPECT_EQ(b.at(2).gov_reward, 4.0);
  EXPECT_THROW((void)b.at(3), DimensionError);
  EXPECT_THROW(ReplayBuffer(0), ConfigError);
  const auto m = b.at(0).mean_action();
  EXPECT_DOUBLE_EQ(m[0], 0.4);
  EXPECT_DOUBLE_EQ(m[1], 0.6);
}

TEST(ReplayBuffer, SamplesDistinctIndicesUniformly) {
  ReplayBuffer b(10);
  for (int k = 0; k < 10; ++k) b.push(tagged(k));
  std::mt19937_64 rng(1);
  std::vector<int> hits(10, 0);
  for (int rep = 0; rep < 20000; ++rep) {
    const auto idx = b.sample_indices(4, rng);
    ASSERT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), 4u);
    for (auto i : idx) ++hits[i];
  }
  // each index expected 8000 times; binomial sd about 69
  for (int h : hits) EXPECT_NEAR(h, 8000, 400);
  EXPECT_THROW((void)b.sample_indices(11, rng), DimensionError);
}

TEST(Checkpoint, RoundTripAndBadInput) {
  std::vector<NamedNetwork> nets{{"a", Mlp({3, 5, 2}, Activation::Tanh, 1)},
                                 {"b", Mlp({4, 2, 2, 1}, Activation::ReLU, 2)}};
  std::stringstream buf;
  write_checkpoint(buf, nets);
  const auto back = read_checkpoint(buf);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back[k].first, nets[k].first);
    EXPECT_EQ(back[k].second.dims(), nets[k].second.dims());
    EXPECT_EQ(back[k].second.activation(), nets[k].second.activation());
    EXPECT_EQ(back[k].second.parameters(), nets[k].second.parameters());
  }
  std::stringstream bad("NOPE0000");
  EXPECT_THROW((void)read_checkpoint(bad), ConfigError);
  std::string truncated = [&] {
    std::stringstream s;
    write_checkpoint(s, nets);
    return s.str();
  }();
  truncated.resize(truncated.size() / 2);
  std::stringstream t(truncated);
  EXPECT_THROW((void)read_checkpoint(t), ConfigError);
}

}  // namespace
