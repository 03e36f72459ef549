#include "taxai/bmfac/bmfac.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "taxai/errors.hpp"
#include "taxai/seed.hpp"

namespace taxai::bmfac {

void BmfacConfig::validate() const {
  if (!(lr_critic >= 0.0) || !(lr_actor >= 0.0)) throw ConfigError("bmfac: learning rates must be >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("bmfac: gamma must lie in [0,1]");
  if (batch_size < 1) throw ConfigError("bmfac: batch_size must be >= 1");
  if (buffer_capacity < static_cast<std::size_t>(batch_size)) {
    throw ConfigError("bmfac: buffer capacity must be >= batch_size");
  }
  if (init_exploration_steps < 0) throw ConfigError("bmfac: init_exploration_steps must be >= 0");
  if (household_updates < 0 || government_updates < 0) {
    throw ConfigError("bmfac: update counts must be >= 0");
  }
  if (!(tau_soft >= 0.0 && tau_soft <= 1.0)) throw ConfigError("bmfac: tau_soft must lie in [0,1]");
  if (hidden_size < 1 || hidden_layers < 1) throw ConfigError("bmfac: need >= 1 hidden unit and layer");
  if (steps_per_epoch < 1) throw ConfigError("bmfac: steps_per_epoch must be >= 1");
  if (value_samples < 1) throw ConfigError("bmfac: value_samples must be >= 1");
  if (households_per_sample < 1) throw ConfigError("bmfac: households_per_sample must be >= 1");
}

double compress_observation(double x) noexcept {
  return std::copysign(std::log1p(std::abs(x)), x);
}

std::array<double, kHouseholdActionDim> mean_action(std::span<const HouseholdAction> actions) {
  if (actions.empty()) throw DimensionError("mean_action: empty neighbor list");
  std::array<double, kHouseholdActionDim> m{};
  for (const auto& a : actions) {
    m[0] += a.savings_ratio;
    m[1] += a.hours_fraction;
  }
  const auto n = static_cast<double>(actions.size());
  return {m[0] / n, m[1] / n};
}

double critic_loss(const Mlp& critic, const CriticBatch& batch, Eigen::VectorXd* grad) {
  if (batch.inputs.cols() != batch.targets.size() || batch.inputs.cols() == 0) {
    throw DimensionError("critic_loss: inputs and targets disagree on batch size");
  }
  Mlp::Tape tape;
  const Eigen::MatrixXd q = critic.forward(batch.inputs, tape);
  const Eigen::RowVectorXd residual = batch.targets - q.row(0);
  const auto b = static_cast<double>(batch.targets.size());
  if (grad != nullptr) {
    grad->setZero(static_cast<Eigen::Index>(critic.parameter_count()));
    const Eigen::MatrixXd d_out = (-2.0 / b) * residual;
    critic.backward(tape, d_out, *grad);
  }
  return residual.squaredNorm() / b;
}

double actor_surrogate_loss(const Mlp& actor, const GaussianHead& head, const ActorBatch& batch,
                            Eigen::VectorXd* grad) {
  const Eigen::Index b = batch.inputs.cols();
  if (b == 0 || batch.z.cols() != b || batch.advantage.size() != b || batch.z.rows() != head.action_dim) {
    throw DimensionError("actor_surrogate_loss: batch shape mismatch");
  }
  Mlp::Tape tape;
  const Eigen::MatrixXd raw = actor.forward(batch.inputs, tape);
  const Eigen::RowVectorXd logp = head.log_prob(raw, batch.z);
  const double n = static_cast<double>(b);
  if (grad != nullptr) {
    grad->setZero(static_cast<Eigen::Index>(actor.parameter_count()));
    const Eigen::RowVectorXd weight = -batch.advantage / n;
    actor.backward(tape, head.log_prob_grad(raw, batch.z, weight), *grad);
  }
  return -(batch.advantage.cwiseProduct(logp)).sum() / n;
}

namespace {

std::vector<int> layer_dims(int input, int output, const BmfacConfig& c) {
  std::vector<int> dims{input};
  for (int k = 0; k < c.hidden_layers; ++k) dims.push_back(c.hidden_size);
  dims.push_back(output);
  return dims;
}

void check_finite(const Eigen::VectorXd& g, const char* who) {
  if (!g.allFinite()) throw NonFiniteGradientError(std::string(who) + ": non-finite gradient");
}

void put_double(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

Eigen::RowVectorXd elementwise_min(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.row(0).cwiseMin(b.row(0));
}

void accumulate(EpisodeSummary& acc, const EpisodeSummary& s) {
  acc.years += s.years;
  acc.mean_social_welfare += s.mean_social_welfare;
  acc.per_capita_gdp += s.per_capita_gdp;
  acc.wealth_gini += s.wealth_gini;
  acc.income_gini += s.income_gini;
  acc.total_gdp += s.total_gdp;
  acc.total_government_reward += s.total_government_reward;
  acc.mean_household_reward += s.mean_household_reward;
  acc.total_household_reward += s.total_household_reward;
}

void divide(EpisodeSummary& acc, int episodes, double& years_mean) {
  const double n = episodes;
  years_mean = acc.years / n;
  acc.mean_social_welfare /= n;
  acc.per_capita_gdp /= n;
  acc.wealth_gini /= n;
  acc.income_gini /= n;
  acc.total_gdp /= n;
  acc.total_government_reward /= n;
  acc.mean_household_reward /= n;
  acc.total_household_reward /= n;
}

}  // namespace

void write_epoch_csv_header(std::ostream& out) {
  out << "epoch,env_steps,government_reward,household_reward,household_critic_loss,"
         "household_actor_loss,government_critic_loss,government_actor_loss,episodes_finished\n";
}

void write_epoch_csv_row(std::ostream& out, const EpochMetrics& m) {
  out << m.epoch << ',' << m.env_steps;
  for (double v : {m.government_reward, m.household_reward, m.household_critic_loss,
                   m.household_actor_loss, m.government_critic_loss, m.government_actor_loss}) {
    out << ',';
    put_double(out, v);
  }
  out << ',' << m.episodes_finished << '\n';
}

Bmfac::Bmfac(EnvConfig env_config, BmfacConfig config, std::uint64_t seed)
    : env_config_(std::move(env_config)),
      config_(config),
      seed_(seed),
      rng_(derive_seed(seed, 31)),
      buffer_(config.buffer_capacity) {
  env_config_.validate();
  config_.validate();
  if (env_config_.model.n_households < 2) {
    throw ConfigError("bmfac: needs at least two households for the mean action");
  }
  const auto& b = env_config_.bounds;
  hh_head_.action_dim = kHouseholdActionDim;
  hh_head_.low = Eigen::Vector2d(b.savings_epsilon, 0.0);
  hh_head_.high = Eigen::Vector2d(1.0 - b.savings_epsilon, 1.0);
  gov_head_.action_dim = kGovernmentActionDim;
  gov_head_.low.resize(kGovernmentActionDim);
  gov_head_.high.resize(kGovernmentActionDim);
  const auto ranges = b.government();
  for (std::size_t k = 0; k < kGovernmentActionDim; ++k) {
    gov_head_.low[static_cast<Eigen::Index>(k)] = ranges[k].low;
    gov_head_.high[static_cast<Eigen::Index>(k)] = ranges[k].high;
  }

  const auto act = config_.activation;
  hh_actor_ = Mlp(layer_dims(kHouseholdActorInput, 2 * kHouseholdActionDim, config_), act,
                  derive_seed(seed, 40));
  gov_actor_ = Mlp(layer_dims(kGovernmentActorInput, 2 * kGovernmentActionDim, config_), act,
                   derive_seed(seed, 41));
  for (int k = 0; k < 2; ++k) {
    hh_critic_[k] = Mlp(layer_dims(kHouseholdCriticInput, 1, config_), act,
                        derive_seed(seed, 42 + static_cast<std::uint64_t>(k)));
    gov_critic_[k] = Mlp(layer_dims(kGovernmentCriticInput, 1, config_), act,
                         derive_seed(seed, 44 + static_cast<std::uint64_t>(k)));
    hh_target_[k] = hh_critic_[k];
    gov_target_[k] = gov_critic_[k];
    hh_critic_opt_[k] = AdamState(static_cast<Eigen::Index>(hh_critic_[k].parameter_count()));
    gov_critic_opt_[k] = AdamState(static_cast<Eigen::Index>(gov_critic_[k].parameter_count()));
  }
  hh_actor_opt_ = AdamState(static_cast<Eigen::Index>(hh_actor_.parameter_count()));
  gov_actor_opt_ = AdamState(static_cast<Eigen::Index>(gov_actor_.parameter_count()));
}

std::array<double, kHouseholdActionDim> Bmfac::nominal_mean_action() const {
  return {0.5, env_config_.reset_hours_fraction};
}

Eigen::MatrixXd Bmfac::noise(Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = normal_(rng_);
  }
  return m;
}

void Bmfac::household_actor_inputs(std::span<const double, kHouseholdObsDim> obs,
                                   std::span<const double, kGovernmentActionDim> gov,
                                   const std::array<double, kHouseholdActionDim>& prev_mean,
                                   Eigen::Ref<Eigen::VectorXd> col) const {
  for (std::size_t k = 0; k < kHouseholdObsDim; ++k) {
    col[static_cast<Eigen::Index>(k)] = compress_observation(obs[k]);
  }
  for (std::size_t k = 0; k < kGovernmentActionDim; ++k) {
    col[static_cast<Eigen::Index>(kHouseholdObsDim + k)] =
        config_.household_actor_sees_government ? gov[k] : 0.0;
  }
  col[14] = prev_mean[0];
  col[15] = prev_mean[1];
}

Eigen::MatrixXd Bmfac::deterministic_government(const Eigen::MatrixXd& gov_obs) const {
  // gov_obs holds compressed observations, one column per sample
  if (!government_trained_) {
    const auto fm = baselines::free_market_action().to_array();
    Eigen::MatrixXd out(kGovernmentActionDim, gov_obs.cols());
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      for (std::size_t k = 0; k < kGovernmentActionDim; ++k) out(static_cast<Eigen::Index>(k), c) = fm[k];
    }
    return out;
  }
  return gov_head_.squash(gov_head_.mean(gov_actor_.forward(gov_obs)));
}

GovernmentAction Bmfac::government_action(const Observation& obs, bool explore) {
  if (!government_trained_) return baselines::free_market_action();
  Eigen::VectorXd x(kGovernmentActorInput);
  for (std::size_t k = 0; k < kGovernmentObsDim; ++k) {
    x[static_cast<Eigen::Index>(k)] = compress_observation(obs.government[k]);
  }
  const Eigen::MatrixXd raw = gov_actor_.forward(x);
  const Eigen::MatrixXd z = explore ? gov_head_.sample(raw, noise(kGovernmentActionDim, 1))
                                    : gov_head_.mean(raw);
  const Eigen::MatrixXd a = gov_head_.squash(z);
  return {a(0, 0), a(1, 0), a(2, 0), a(3, 0), a(4, 0)};
}

void Bmfac::household_actions(const Observation& obs, const GovernmentAction& gov,
                              const std::array<double, kHouseholdActionDim>& prev_mean,
                              std::span<HouseholdAction> out, bool explore) {
  const std::size_t n = obs.household_count();
  if (out.size() != n) throw DimensionError("household_actions: output size differs from N");
  const auto g = gov.to_array();
  Eigen::MatrixXd x(kHouseholdActorInput, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    household_actor_inputs(obs.household(i), g, prev_mean, x.col(static_cast<Eigen::Index>(i)));
  }
  const Eigen::MatrixXd raw = hh_actor_.forward(x);
  const Eigen::MatrixXd z =
      explore ? hh_head_.sample(raw, noise(kHouseholdActionDim, x.cols())) : hh_head_.mean(raw);
  const Eigen::MatrixXd a = hh_head_.squash(z);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {a(0, static_cast<Eigen::Index>(i)), a(1, static_cast<Eigen::Index>(i))};
  }
}

Bmfac::Batches Bmfac::household_batches(std::span<const std::size_t> indices) {
  const auto batch = static_cast<Eigen::Index>(indices.size());
  if (batch == 0) throw DimensionError("household_batches: empty batch");
  const std::size_t n = buffer_.at(indices[0]).household_count();
  const std::size_t per = std::min<std::size_t>(n, static_cast<std::size_t>(config_.households_per_sample));
  const auto cols = batch * static_cast<Eigen::Index>(per);
  const double nm1 = static_cast<double>(n - 1);

  // next-state government action, one column per transition
  Eigen::MatrixXd next_gov_obs(kGovernmentActorInput, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto& tr = buffer_.at(indices[static_cast<std::size_t>(b)]);
    for (std::size_t k = 0; k < kGovernmentObsDim; ++k) {
      next_gov_obs(static_cast<Eigen::Index>(k), b) = compress_observation(tr.next_gov_obs[k]);
    }
  }
  const Eigen::MatrixXd next_gov = deterministic_government(next_gov_obs);

  // household subsets
  std::vector<std::size_t> chosen(static_cast<std::size_t>(cols));
  for (Eigen::Index b = 0; b < batch; ++b) {
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    if (per < n) {
      for (std::size_t k = 0; k < per; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, n - 1);
        std::swap(ids[k], ids[pick(rng_)]);
      }
    }
    for (std::size_t k = 0; k < per; ++k) chosen[static_cast<std::size_t>(b) * per + k] = ids[k];
  }

  Batches out;
  out.critic.inputs.resize(kHouseholdCriticInput, cols);
  out.critic.targets.resize(cols);
  out.actor.inputs.resize(kHouseholdActorInput, cols);
  Eigen::MatrixXd next_critic(kHouseholdCriticInput, cols);
  Eigen::RowVectorXd value_next = Eigen::RowVectorXd::Zero(cols);
  Eigen::MatrixXd loo(kHouseholdActionDim, cols);

  for (int sample = 0; sample < config_.value_samples; ++sample) {
    for (Eigen::Index b = 0; b < batch; ++b) {
      const auto& tr = buffer_.at(indices[static_cast<std::size_t>(b)]);
      const auto mean_now = tr.mean_action();
      std::array<double, kGovernmentActionDim> g_next{};
      for (std::size_t k = 0; k < kGovernmentActionDim; ++k) g_next[k] = next_gov(static_cast<Eigen::Index>(k), b);

      // next actions of every household in the transition, one sample
      Eigen::MatrixXd x_next(kHouseholdActorInput, static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        household_actor_inputs(
            std::span<const double, kHouseholdObsDim>(tr.next_hh_obs.data() + i * kHouseholdObsDim, kHouseholdObsDim),
            g_next, mean_now, x_next.col(static_cast<Eigen::Index>(i)));
      }
      const Eigen::MatrixXd raw_next = hh_actor_.forward(x_next);
      const Eigen::MatrixXd a_next =
          hh_head_.squash(hh_head_.sample(raw_next, noise(kHouseholdActionDim, x_next.cols())));
      const Eigen::Vector2d sum_next = a_next.rowwise().sum();

      for (std::size_t k = 0; k < per; ++k) {
        const std::size_t i = chosen[static_cast<std::size_t>(b) * per + k];
        const auto c = b * static_cast<Eigen::Index>(per) + static_cast<Eigen::Index>(k);
        auto col = next_critic.col(c);
        for (std::size_t j = 0; j < kHouseholdObsDim; ++j) {
          col[static_cast<Eigen::Index>(j)] = compress_observation(tr.next_hh_obs[i * kHouseholdObsDim + j]);
        }
        for (std::size_t j = 0; j < kGovernmentActionDim; ++j) col[static_cast<Eigen::Index>(9 + j)] = g_next[j];
        const auto ii = static_cast<Eigen::Index>(i);
        col[14] = a_next(0, ii);
        col[15] = a_next(1, ii);
        col[16] = (sum_next[0] - a_next(0, ii)) / nm1;
        col[17] = (sum_next[1] - a_next(1, ii)) / nm1;
      }
    }
    value_next += elementwise_min(hh_target_[0].forward(next_critic), hh_target_[1].forward(next_critic));
  }
  value_next /= static_cast<double>(config_.value_samples);

  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto& tr = buffer_.at(indices[static_cast<std::size_t>(b)]);
    std::array<double, kHouseholdActionDim> sum{};
    for (std::size_t i = 0; i < n; ++i) {
      sum[0] += tr.hh_actions[i * 2];
      sum[1] += tr.hh_actions[i * 2 + 1];
    }
    for (std::size_t k = 0; k < per; ++k) {
      const std::size_t i = chosen[static_cast<std::size_t>(b) * per + k];
      const auto c = b * static_cast<Eigen::Index>(per) + static_cast<Eigen::Index>(k);
      const std::span<const double, kHouseholdObsDim> obs(tr.hh_obs.data() + i * kHouseholdObsDim,
                                                          kHouseholdObsDim);
      household_actor_inputs(obs, tr.gov_action, tr.prev_mean_action, out.actor.inputs.col(c));
      auto col = out.critic.inputs.col(c);
      for (std::size_t j = 0; j < kHouseholdObsDim; ++j) col[static_cast<Eigen::Index>(j)] = compress_observation(obs[j]);
      for (std::size_t j = 0; j < kGovernmentActionDim; ++j) col[static_cast<Eigen::Index>(9 + j)] = tr.gov_action[j];
      col[14] = tr.hh_actions[i * 2];
      col[15] = tr.hh_actions[i * 2 + 1];
      loo(0, c) = (sum[0] - tr.hh_actions[i * 2]) / nm1;
      loo(1, c) = (sum[1] - tr.hh_actions[i * 2 + 1]) / nm1;
      col[16] = loo(0, c);
      col[17] = loo(1, c);
      const double continuation = tr.done ? 0.0 : 1.0;
      out.critic.targets[c] =
          bmfac::household_critic_target(tr.hh_rewards[i], config_.gamma * continuation, value_next[c]);
    }
  }

  // actor batch: fresh samples scored against the mean action
  const Eigen::MatrixXd raw = hh_actor_.forward(out.actor.inputs);
  out.actor.z = hh_head_.sample(raw, noise(kHouseholdActionDim, cols));
  Eigen::MatrixXd q_in = out.critic.inputs;
  q_in.middleRows(14, 2) = hh_head_.squash(out.actor.z);
  const Eigen::RowVectorXd q_sample = hh_critic_[0].forward(q_in).row(0);
  q_in.middleRows(14, 2) = hh_head_.squash(hh_head_.mean(raw));
  const Eigen::RowVectorXd q_mean = hh_critic_[0].forward(q_in).row(0);
  out.actor.advantage = q_sample - q_mean;
  return out;
}

Bmfac::Batches Bmfac::government_batches(std::span<const std::size_t> indices) {
  const auto batch = static_cast<Eigen::Index>(indices.size());
  if (batch == 0) throw DimensionError("government_batches: empty batch");

  // mean deterministic household response to government actions `gov`
  // (one column per transition) at the stored or next observations
  auto household_response = [&](const Eigen::MatrixXd& gov, bool next) {
    Eigen::MatrixXd response(kHouseholdActionDim, batch);
    for (Eigen::Index b = 0; b < batch; ++b) {
      const auto& tr = buffer_.at(indices[static_cast<std::size_t>(b)]);
      const std::size_t n = tr.household_count();
      std::array<double, kGovernmentActionDim> g{};
      for (std::size_t k = 0; k < kGovernmentActionDim; ++k) g[k] = gov(static_cast<Eigen::Index>(k), b);
      const auto prev = next ? tr.mean_action() : tr.prev_mean_action;
      const auto& obs = next ? tr.next_hh_obs : tr.hh_obs;
      Eigen::MatrixXd x(kHouseholdActorInput, static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        household_actor_inputs(
            std::span<const double, kHouseholdObsDim>(obs.data() + i * kHouseholdObsDim, kHouseholdObsDim), g,
            prev, x.col(static_cast<Eigen::Index>(i)));
      }
      response.col(b) = hh_head_.squash(hh_head_.mean(hh_actor_.forward(x))).rowwise().mean();
    }
    return response;
  };
  auto critic_inputs = [&](const Eigen::MatrixXd& obs, const Eigen::MatrixXd& gov,
                           const Eigen::MatrixXd& response) {
    Eigen::MatrixXd in(kGovernmentCriticInput, batch);
    in.topRows(kGovernmentObsDim) = obs;
    in.middleRows(kGovernmentObsDim, kGovernmentActionDim) = gov;
    in.bottomRows(kHouseholdActionDim) = response;
    return in;
  };

  Eigen::MatrixXd obs(kGovernmentActorInput, batch);
  Eigen::MatrixXd next_obs(kGovernmentActorInput, batch);
  Eigen::MatrixXd gov(kGovernmentActionDim, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto& tr = buffer_.at(indices[static_cast<std::size_t>(b)]);
    for (std::size_t k = 0; k < kGovernmentObsDim; ++k) {
      obs(static_cast<Eigen::Index>(k), b) = compress_observation(tr.gov_obs[k]);
      next_obs(static_cast<Eigen::Index>(k), b) = compress_observation(tr.next_gov_obs[k]);
    }
    for (std::size_t k = 0; k < kGovernmentActionDim; ++k) gov(static_cast<Eigen::Index>(k), b) = tr.gov_action[k];
  }

  Batches out;
  out.critic.inputs = critic_inputs(obs, gov, household_response(gov, false));

  Eigen::RowVectorXd value_next = Eigen::RowVectorXd::Zero(batch);
  const Eigen::MatrixXd raw_next = gov_actor_.forward(next_obs);
  for (int sample = 0; sample < config_.value_samples; ++sample) {
    const Eigen::MatrixXd g_next =
        gov_head_.squash(gov_head_.sample(raw_next, noise(kGovernmentActionDim, batch)));
    const Eigen::MatrixXd in_next = critic_inputs(next_obs, g_next, household_response(g_next, true));
    value_next += elementwise_min(gov_target_[0].forward(in_next), gov_target_[1].forward(in_next));
  }
  value_next /= static_cast<double>(config_.value_samples);
  out.critic.targets.resize(batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto& tr = buffer_.at(indices[static_cast<std::size_t>(b)]);
    out.critic.targets[b] = tr.gov_reward + (tr.done ? 0.0 : config_.gamma) * value_next[b];
  }

  out.actor.inputs = obs;
  const Eigen::MatrixXd raw = gov_actor_.forward(obs);
  out.actor.z = gov_head_.sample(raw, noise(kGovernmentActionDim, batch));
  const Eigen::MatrixXd a_sample = gov_head_.squash(out.actor.z);
  const Eigen::MatrixXd a_mean = gov_head_.squash(gov_head_.mean(raw));
  const Eigen::RowVectorXd q_sample =
      gov_critic_[0].forward(critic_inputs(obs, a_sample, household_response(a_sample, false))).row(0);
  const Eigen::RowVectorXd q_mean =
      gov_critic_[0].forward(critic_inputs(obs, a_mean, household_response(a_mean, false))).row(0);
  out.actor.advantage = q_sample - q_mean;
  return out;
}

UpdateStats Bmfac::household_update() {
  const auto indices = buffer_.sample_indices(static_cast<std::size_t>(config_.batch_size), rng_);
  const Batches batches = household_batches(indices);
  UpdateStats stats;
  Eigen::VectorXd grad;
  for (int k = 0; k < 2; ++k) {
    stats.critic_loss += 0.5 * critic_loss(hh_critic_[k], batches.critic, &grad);
    check_finite(grad, "household critic");
    adam_step(hh_critic_[k].parameters(), grad, hh_critic_opt_[k], config_.lr_critic);
  }
  stats.actor_loss = actor_surrogate_loss(hh_actor_, hh_head_, batches.actor, &grad);
  check_finite(grad, "household actor");
  adam_step(hh_actor_.parameters(), grad, hh_actor_opt_, config_.lr_actor);
  for (int k = 0; k < 2; ++k) hh_target_[k].soft_update_from(hh_critic_[k], config_.tau_soft);
  return stats;
}

UpdateStats Bmfac::government_update() {
  const auto indices = buffer_.sample_indices(static_cast<std::size_t>(config_.batch_size), rng_);
  const Batches batches = government_batches(indices);
  UpdateStats stats;
  Eigen::VectorXd grad;
  for (int k = 0; k < 2; ++k) {
    stats.critic_loss += 0.5 * critic_loss(gov_critic_[k], batches.critic, &grad);
    check_finite(grad, "government critic");
    adam_step(gov_critic_[k].parameters(), grad, gov_critic_opt_[k], config_.lr_critic);
  }
  stats.actor_loss = actor_surrogate_loss(gov_actor_, gov_head_, batches.actor, &grad);
  check_finite(grad, "government actor");
  adam_step(gov_actor_.parameters(), grad, gov_actor_opt_, config_.lr_actor);
  for (int k = 0; k < 2; ++k) gov_target_[k].soft_update_from(gov_critic_[k], config_.tau_soft);
  government_trained_ = true;
  return stats;
}

void Bmfac::collect_step(Environment& env, bool outer_stage, EpochMetrics& m, double& gov_reward,
                         double& hh_reward, long& hh_count) {
  if (!episode_running_) {
    obs_ = env.reset(derive_seed(seed_, 5000 + episode_counter_++));
    prev_mean_ = nominal_mean_action();
    episode_running_ = true;
  }
  const std::size_t n = env.household_count();
  actions_.resize(n);
  const bool exploring = total_steps_ < config_.init_exploration_steps;
  const GovernmentAction g = exploring ? baselines::free_market_action()
                                       : government_action(obs_, outer_stage);
  if (exploring) {
    for (auto& a : actions_) a = baselines::random_household_action(rng_, env_config_.bounds.savings_epsilon);
  } else {
    household_actions(obs_, g, prev_mean_, actions_, true);
  }

  StepResult r = env.step(g, actions_);
  ++total_steps_;
  Transition tr;
  tr.gov_obs = obs_.government;
  tr.gov_action = g.to_array();
  tr.gov_reward = r.rewards.government;
  tr.next_gov_obs = r.observation.government;
  tr.hh_obs = obs_.households;
  tr.hh_actions.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    tr.hh_actions[2 * i] = actions_[i].savings_ratio;
    tr.hh_actions[2 * i + 1] = actions_[i].hours_fraction;
  }
  tr.hh_rewards = r.rewards.households;
  tr.next_hh_obs = r.observation.households;
  tr.prev_mean_action = prev_mean_;
  tr.done = r.done;

  const bool usable = std::isfinite(tr.gov_reward) &&
                      std::all_of(tr.hh_rewards.begin(), tr.hh_rewards.end(),
                                  [](double v) { return std::isfinite(v); });
  if (usable) {
    gov_reward += tr.gov_reward;
    for (double u : tr.hh_rewards) hh_reward += u;
    hh_count += static_cast<long>(n);
    prev_mean_ = tr.mean_action();
    buffer_.push(std::move(tr));
  }
  obs_ = std::move(r.observation);
  if (r.done) {
    episode_running_ = false;
    ++m.episodes_finished;
  }
}

std::vector<EpochMetrics> Bmfac::train(Environment& env, int epochs,
                                       const std::function<void(const EpochMetrics&)>& on_epoch) {
  if (env.household_count() != static_cast<std::size_t>(env_config_.model.n_households)) {
    throw DimensionError("bmfac train: environment household count differs from the config");
  }
  std::vector<EpochMetrics> history;
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    EpochMetrics m;
    m.epoch = epoch;
    double gov_reward = 0.0;
    double hh_reward = 0.0;
    long hh_count = 0;
    long steps_before = total_steps_;
    const auto ready = [&] {
      return total_steps_ >= config_.init_exploration_steps &&
             buffer_.size() >= static_cast<std::size_t>(config_.batch_size);
    };

    // inner loop: households best-respond to the current government
    for (int s = 0; s < config_.steps_per_epoch; ++s) collect_step(env, false, m, gov_reward, hh_reward, hh_count);
    if (ready() && config_.household_updates > 0) {
      for (int k = 0; k < config_.household_updates; ++k) {
        const auto st = household_update();
        m.household_critic_loss += st.critic_loss / config_.household_updates;
        m.household_actor_loss += st.actor_loss / config_.household_updates;
      }
    }
    // outer loop: the government moves against the fixed household policy
    for (int s = 0; s < config_.steps_per_epoch; ++s) collect_step(env, true, m, gov_reward, hh_reward, hh_count);
    if (ready() && config_.government_updates > 0) {
      for (int k = 0; k < config_.government_updates; ++k) {
        const auto st = government_update();
        m.government_critic_loss += st.critic_loss / config_.government_updates;
        m.government_actor_loss += st.actor_loss / config_.government_updates;
      }
    }

    const auto steps = static_cast<double>(total_steps_ - steps_before);
    m.env_steps = total_steps_;
    m.government_reward = gov_reward / steps;
    m.household_reward = hh_count > 0 ? hh_reward / static_cast<double>(hh_count) : 0.0;
    history.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  return history;
}

EvaluationResult Bmfac::evaluate(int episodes, std::uint64_t seed) {
  if (episodes < 1) throw ConfigError("bmfac evaluate: episodes must be >= 1");
  Environment env(env_config_);
  BmfacGovernmentPolicy gov(*this);
  BmfacHouseholdPolicy trained(*this);
  RandomHouseholdPolicy random(env_config_.bounds.savings_epsilon);
  EvaluationResult out;
  for (int e = 0; e < episodes; ++e) {
    const auto s = derive_seed(seed, 9000 + static_cast<std::uint64_t>(e));
    accumulate(out.trained, run_episode(env, gov, trained, s));
    accumulate(out.random, run_episode(env, gov, random, s));
  }
  double years = 0.0;
  divide(out.trained, episodes, years);
  out.trained.years = static_cast<int>(std::lround(years));
  divide(out.random, episodes, years);
  out.random.years = static_cast<int>(std::lround(years));
  return out;
}

std::vector<NamedNetwork> Bmfac::networks() const {
  std::vector<NamedNetwork> out{
      {"household_actor", hh_actor_},          {"household_critic_0", hh_critic_[0]},
      {"household_critic_1", hh_critic_[1]},   {"household_target_0", hh_target_[0]},
      {"household_target_1", hh_target_[1]},   {"government_critic_0", gov_critic_[0]},
      {"government_critic_1", gov_critic_[1]}, {"government_target_0", gov_target_[0]},
      {"government_target_1", gov_target_[1]}};
  // an untrained government actor would be mistaken for a trained one on load
  if (government_trained_) out.emplace_back("government_actor", gov_actor_);
  return out;
}

void Bmfac::load_networks(const std::vector<NamedNetwork>& networks) {
  auto assign = [](Mlp& dst, const Mlp& src, const std::string& name) {
    if (src.dims() != dst.dims()) throw DimensionError("checkpoint network '" + name + "' has other dims");
    dst = src;
  };
  for (const auto& [name, net] : networks) {
    if (name == "household_actor") assign(hh_actor_, net, name);
    else if (name == "household_critic_0") assign(hh_critic_[0], net, name);
    else if (name == "household_critic_1") assign(hh_critic_[1], net, name);
    else if (name == "household_target_0") assign(hh_target_[0], net, name);
    else if (name == "household_target_1") assign(hh_target_[1], net, name);
    else if (name == "government_actor") {
      assign(gov_actor_, net, name);
      government_trained_ = true;
    } else if (name == "government_critic_0") assign(gov_critic_[0], net, name);
    else if (name == "government_critic_1") assign(gov_critic_[1], net, name);
    else if (name == "government_target_0") assign(gov_target_[0], net, name);
    else if (name == "government_target_1") assign(gov_target_[1], net, name);
    else throw ConfigError("checkpoint: unknown network '" + name + "'");
  }
}

void BmfacHouseholdPolicy::act(const Observation& obs, const GovernmentAction& gov,
                               std::span<HouseholdAction> out) {
  agent_.household_actions(obs, gov, prev_mean_, out, false);
  prev_mean_ = mean_action(out);
}

}  // namespace taxai::bmfac
