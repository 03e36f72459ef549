#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "taxai/distribution.hpp"
#include "taxai/econ.hpp"
#include "taxai/metrics.hpp"
#include "taxai/params.hpp"

namespace taxai {

inline constexpr std::size_t kGovernmentObsDim = 7;
inline constexpr std::size_t kHouseholdObsDim = 9;
inline constexpr std::size_t kGovernmentActionDim = 5;
inline constexpr std::size_t kHouseholdActionDim = 2;

/// Tax schedule parameters plus the spending-to-GDP ratio r^G.
struct GovernmentAction {
  double tau = 0.0;
  double xi = 0.0;
  double tau_a = 0.0;
  double xi_a = 0.0;
  double spending_ratio = 0.0;

  [[nodiscard]] TaxSchedule schedule() const { return {tau, xi, tau_a, xi_a}; }
  [[nodiscard]] std::array<double, kGovernmentActionDim> to_array() const {
    return {tau, xi, tau_a, xi_a, spending_ratio};
  }
  static GovernmentAction from_array(std::span<const double, kGovernmentActionDim> v) {
    return {v[0], v[1], v[2], v[3], v[4]};
  }
};

struct HouseholdAction {
  double savings_ratio = 0.5;   // p in (0,1)
  double hours_fraction = 0.5;  // h / h_max in [0,1]
};

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Bounds every action component is clamped into before use.
struct ActionBounds {
  Interval tau{0.0, 1.0};
  Interval xi{0.0, 0.95};
  Interval tau_a{0.0, 1.0};
  Interval xi_a{0.0, 0.95};
  Interval spending_ratio{0.0, 0.95};
  double savings_epsilon = 1e-6;

  [[nodiscard]] std::array<Interval, kGovernmentActionDim> government() const {
    return {tau, xi, tau_a, xi_a, spending_ratio};
  }
  void validate() const;
};

// Integer codes are part of the external interface; do not reorder.
enum class DoneReason : std::uint8_t {
  MaxSteps = 1,
  GiniExceeded = 2,
  ConsumptionExceedsOutput = 3,
  Bankruptcy = 4,
  NumericOverflow = 5,
};

[[nodiscard]] std::string_view done_reason_name(DoneReason reason);

struct EnvConfig {
  ModelParams model;
  ActionBounds bounds;
  InitialDistribution initial = InitialDistribution::quantile_table(synthetic_scf_quantiles());
  GovernmentTask task = GovernmentTask::Welfare;
  double omega1 = 1.0;
  double omega2 = 1.0;
  int threads = 1;
  /// When false only NumericOverflow ends an episode (used by calibration).
  bool enforce_terminal = true;
  /// Utility is evaluated at max(c, floor); c <= 0 only occurs on bankruptcy.
  double consumption_floor = 1e-8;
  /// Hours fraction assumed for the prices and incomes reported at reset.
  double reset_hours_fraction = 0.5;

  void validate() const;
};

/// Government view (7 global entries) and household views (global entries
/// followed by own asset and productivity), stored row-major N x 9.
struct Observation {
  std::array<double, kGovernmentObsDim> government{};
  std::vector<double> households;

  [[nodiscard]] std::size_t household_count() const {
    return households.size() / kHouseholdObsDim;
  }
  [[nodiscard]] std::span<const double, kHouseholdObsDim> household(std::size_t i) const {
    return std::span<const double, kHouseholdObsDim>(households.data() + i * kHouseholdObsDim,
                                                     kHouseholdObsDim);
  }
};

struct StepRewards {
  double government = 0.0;
  std::vector<double> households;
};

struct StepResult {
  Observation observation;
  StepRewards rewards;
  bool done = false;
  std::optional<DoneReason> done_reason;
  EpisodeMetrics metrics;
};

/// Aggregates inspected by terminal_check.
struct StepAggregates {
  bool all_finite = true;
  double min_next_asset = 0.0;
  double consumption = 0.0;
  double gov_spending = 0.0;
  double gdp = 0.0;
  double wealth_gini = 0.0;
  double income_gini = 0.0;
  int steps_taken = 0;
};

/// First triggered reason in priority order NumericOverflow > Bankruptcy >
/// ConsumptionExceedsOutput > GiniExceeded > MaxSteps.
[[nodiscard]] std::optional<DoneReason> terminal_check(const StepAggregates& agg,
                                                       const ModelParams& params);

/// The partially observable Markov game between one government and N
/// households. Single-writer: do not call reset/step concurrently on one
/// instance. The per-household map may run on `threads` OpenMP threads;
/// every reduction is sequential in household order, so trajectories are
/// bit-identical for any thread count.
class Environment {
 public:
  explicit Environment(EnvConfig config);

  /// Samples initial assets and stationary productivities from the seed.
  Observation reset(std::uint64_t seed);

  /// Starts an episode from explicit household states (scripted scenarios).
  /// The seed drives subsequent productivity shocks.
  Observation reset_with_households(std::span<const HouseholdState> households,
                                    std::uint64_t seed, double initial_debt = 0.0);

  /// Advances one step. Throws IllegalStateError after done or before reset,
  /// DimensionError when actions.size() != N.
  StepResult step(const GovernmentAction& gov_action, std::span<const HouseholdAction> actions);

  [[nodiscard]] const EnvConfig& config() const { return config_; }
  [[nodiscard]] std::size_t household_count() const { return assets_.size(); }
  [[nodiscard]] int steps_taken() const { return steps_; }
  [[nodiscard]] bool done() const { return done_; }
  [[nodiscard]] const EconomyState& economy() const { return economy_; }
  [[nodiscard]] const Observation& observation() const { return observation_; }

  [[nodiscard]] std::span<const double> assets() const { return assets_; }
  [[nodiscard]] std::span<const double> productivities() const { return productivity_; }
  [[nodiscard]] std::span<const Regime> regimes() const { return regime_; }
  /// Per-household quantities of the most recent step.
  [[nodiscard]] std::span<const double> incomes() const { return income_; }
  [[nodiscard]] std::span<const double> income_taxes() const { return income_tax_; }
  [[nodiscard]] std::span<const double> asset_taxes() const { return asset_tax_; }
  [[nodiscard]] std::span<const double> consumption() const { return consumption_; }

  /// Mean productivity of normal-regime households (1 if there are none).
  [[nodiscard]] double mean_normal_productivity() const;

 private:
  void start_episode(std::uint64_t seed, double initial_debt);
  void build_observation();
  void evolve_productivity();

  EnvConfig config_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};

  // household state a_t, e_t, regime
  std::vector<double> assets_;
  std::vector<double> productivity_;
  std::vector<Regime> regime_;

  // per-step scratch
  std::vector<double> hours_;
  std::vector<double> savings_;
  std::vector<double> hours_fraction_;
  std::vector<double> income_;
  std::vector<double> income_tax_;
  std::vector<double> asset_tax_;
  std::vector<double> post_tax_income_;
  std::vector<double> next_assets_;
  std::vector<double> consumption_;
  std::vector<double> utility_;
  std::vector<double> shock_u_;
  std::vector<double> regime_draw_;
  std::vector<double> sorted_;
  std::vector<std::size_t> order_;

  EconomyState economy_;
  Observation observation_;
  double gdp_prev_ = 0.0;
  double discounted_welfare_ = 0.0;
  int steps_ = 0;
  int clamp_count_ = 0;
  bool started_ = false;
  bool done_ = false;
};

}  // namespace taxai
