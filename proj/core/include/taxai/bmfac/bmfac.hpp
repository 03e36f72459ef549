#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "taxai/baselines.hpp"
#include "taxai/bmfac/adam.hpp"
#include "taxai/bmfac/checkpoint.hpp"
#include "taxai/bmfac/gaussian.hpp"
#include "taxai/bmfac/mlp.hpp"
#include "taxai/bmfac/replay_buffer.hpp"
#include "taxai/environment.hpp"

namespace taxai::bmfac {

// Network input widths. Household actor: own observation, government
// action, previous mean household action. Household critic adds its own
// action and the leave-one-out mean action of the others. Government
// critic: observation, action and the mean household response.
inline constexpr int kHouseholdActorInput = 9 + 5 + 2;
inline constexpr int kHouseholdCriticInput = 9 + 5 + 2 + 2;
inline constexpr int kGovernmentActorInput = 7;
inline constexpr int kGovernmentCriticInput = 7 + 5 + 2;

struct BmfacConfig {
  double lr_critic = 3e-4;
  double lr_actor = 3e-4;
  double gamma = 0.975;
  int batch_size = 128;
  std::size_t buffer_capacity = 1'000'000;
  int init_exploration_steps = 1000;
  int household_updates = 10;   // N^h per epoch
  int government_updates = 10;  // N^g per epoch
  double tau_soft = 5e-3;
  int hidden_size = 128;
  int hidden_layers = 2;
  Activation activation = Activation::ReLU;
  /// Environment steps collected by each of the inner and outer stages.
  int steps_per_epoch = 100;
  /// Samples used to estimate the mean-field value of the next state.
  int value_samples = 1;
  /// Households drawn from each transition for household updates.
  int households_per_sample = 16;
  /// Feed the government action to the household actor (it always reaches
  /// the household critic).
  bool household_actor_sees_government = true;

  void validate() const;
};

/// sign(x) log(1 + |x|), applied to every observation entry.
[[nodiscard]] double compress_observation(double x) noexcept;

/// Componentwise mean; throws DimensionError on an empty list.
[[nodiscard]] std::array<double, kHouseholdActionDim> mean_action(
    std::span<const HouseholdAction> actions);

/// y = r + gamma V
[[nodiscard]] constexpr double household_critic_target(double reward, double gamma,
                                                       double value_next) noexcept {
  return reward + gamma * value_next;
}

struct CriticBatch {
  Eigen::MatrixXd inputs;
  Eigen::RowVectorXd targets;
};

/// Inputs, fixed pre-squash samples z and detached advantages.
struct ActorBatch {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd z;
  Eigen::RowVectorXd advantage;
};

/// mean_b (y_b - Q(x_b))^2; writes dL/dparams into grad when non-null.
double critic_loss(const Mlp& critic, const CriticBatch& batch, Eigen::VectorXd* grad);

/// -mean_b advantage_b log pi(z_b | x_b); the score-function surrogate.
double actor_surrogate_loss(const Mlp& actor, const GaussianHead& head, const ActorBatch& batch,
                            Eigen::VectorXd* grad);

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
};

struct EpochMetrics {
  int epoch = 0;
  long env_steps = 0;
  double government_reward = 0.0;  // per step, over this epoch's samples
  double household_reward = 0.0;  // per household and step
  double household_critic_loss = 0.0;
  double household_actor_loss = 0.0;
  double government_critic_loss = 0.0;
  double government_actor_loss = 0.0;
  int episodes_finished = 0;
};

void write_epoch_csv_header(std::ostream& out);
void write_epoch_csv_row(std::ostream& out, const EpochMetrics& m);

struct EvaluationResult {
  EpisodeSummary trained;  // means over episodes
  EpisodeSummary random;   // random households under the trained government
};

/// Bi-level mean-field actor-critic: one shared household actor with a
/// double critic, one government actor with a double critic, target
/// critics and a replay buffer of whole environment steps. Single-threaded.
class Bmfac {
 public:
  Bmfac(EnvConfig env_config, BmfacConfig config, std::uint64_t seed);

  /// Deterministic (mean) action unless explore is set. Before the first
  /// government update this is the free-market action.
  GovernmentAction government_action(const Observation& obs, bool explore);
  void household_actions(const Observation& obs, const GovernmentAction& gov,
                         const std::array<double, kHouseholdActionDim>& prev_mean,
                         std::span<HouseholdAction> out, bool explore);

  struct Batches {
    CriticBatch critic;
    ActorBatch actor;
  };
  /// Builds training batches from buffer entries (consumes RNG draws).
  Batches household_batches(std::span<const std::size_t> indices);
  Batches government_batches(std::span<const std::size_t> indices);

  /// One step on both critics and the actor, then target soft update.
  /// Throws NonFiniteGradientError on NaN or infinite gradients.
  UpdateStats household_update();
  UpdateStats government_update();

  /// Alternates the household (inner) and government (outer) stages.
  std::vector<EpochMetrics> train(Environment& env, int epochs,
                                  const std::function<void(const EpochMetrics&)>& on_epoch = {});

  /// Deterministic policies versus random households, `episodes` each.
  EvaluationResult evaluate(int episodes, std::uint64_t seed);

  [[nodiscard]] const BmfacConfig& config() const { return config_; }
  [[nodiscard]] const EnvConfig& env_config() const { return env_config_; }
  [[nodiscard]] ReplayBuffer& buffer() { return buffer_; }
  [[nodiscard]] bool government_trained() const { return government_trained_; }
  [[nodiscard]] Mlp& household_actor() { return hh_actor_; }
  [[nodiscard]] Mlp& household_critic(int k) { return hh_critic_[k]; }
  [[nodiscard]] Mlp& household_critic_target(int k) { return hh_target_[k]; }
  [[nodiscard]] Mlp& government_actor() { return gov_actor_; }
  [[nodiscard]] Mlp& government_critic(int k) { return gov_critic_[k]; }
  [[nodiscard]] Mlp& government_critic_target(int k) { return gov_target_[k]; }
  [[nodiscard]] const GaussianHead& household_head() const { return hh_head_; }
  [[nodiscard]] const GaussianHead& government_head() const { return gov_head_; }
  /// Household action expected before any step has been taken.
  [[nodiscard]] std::array<double, kHouseholdActionDim> nominal_mean_action() const;

  /// The government actor is included only once it has been trained.
  [[nodiscard]] std::vector<NamedNetwork> networks() const;
  /// Replaces networks by name; marks the government as trained when a
  /// government actor is present.
  void load_networks(const std::vector<NamedNetwork>& networks);

 private:
  void household_actor_inputs(std::span<const double, kHouseholdObsDim> obs,
                              std::span<const double, kGovernmentActionDim> gov,
                              const std::array<double, kHouseholdActionDim>& prev_mean,
                              Eigen::Ref<Eigen::VectorXd> col) const;
  Eigen::MatrixXd deterministic_government(const Eigen::MatrixXd& gov_obs) const;
  Eigen::MatrixXd noise(Eigen::Index rows, Eigen::Index cols);
  void collect_step(Environment& env, bool outer_stage, EpochMetrics& m, double& gov_reward,
                    double& hh_reward, long& hh_count);

  EnvConfig env_config_;
  BmfacConfig config_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};

  GaussianHead hh_head_;
  GaussianHead gov_head_;
  Mlp hh_actor_;
  std::array<Mlp, 2> hh_critic_;
  std::array<Mlp, 2> hh_target_;
  Mlp gov_actor_;
  std::array<Mlp, 2> gov_critic_;
  std::array<Mlp, 2> gov_target_;
  AdamState hh_actor_opt_;
  std::array<AdamState, 2> hh_critic_opt_;
  AdamState gov_actor_opt_;
  std::array<AdamState, 2> gov_critic_opt_;
  ReplayBuffer buffer_;
  bool government_trained_ = false;

  // rollout state
  bool episode_running_ = false;
  std::uint64_t episode_counter_ = 0;
  long total_steps_ = 0;
  Observation obs_;
  std::array<double, kHouseholdActionDim> prev_mean_{};
  std::vector<HouseholdAction> actions_;
};

class BmfacGovernmentPolicy final : public GovernmentPolicy {
 public:
  explicit BmfacGovernmentPolicy(Bmfac& agent) : agent_(agent) {}
  GovernmentAction act(const Observation& obs) override { return agent_.government_action(obs, false); }

 private:
  Bmfac& agent_;
};

class BmfacHouseholdPolicy final : public HouseholdPolicy {
 public:
  explicit BmfacHouseholdPolicy(Bmfac& agent) : agent_(agent) {}
  void reset(std::uint64_t) override { prev_mean_ = agent_.nominal_mean_action(); }
  void act(const Observation& obs, const GovernmentAction& gov,
           std::span<HouseholdAction> out) override;

 private:
  Bmfac& agent_;
  std::array<double, kHouseholdActionDim> prev_mean_{};
};

}  // namespace taxai::bmfac
