#include "config.hpp"

#include <fstream>
#include <set>

#include "taxai/errors.hpp"

namespace taxai::runner {

using nlohmann::json;

namespace {

// Reads known keys of one section and rejects anything else.
class Section {
 public:
  Section(const json& doc, std::string name) : name_(std::move(name)) {
    if (doc.contains(name_)) {
      node_ = &doc.at(name_);
      if (!node_->is_object()) throw ConfigError("config: [" + name_ + "] must be an object");
    }
  }

  template <typename T>
  void get(const char* key, T& dst) {
    known_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) return;
    try {
      dst = node_->at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config: " + name_ + "." + key + ": " + e.what());
    }
  }

  void interval(const char* key, Interval& dst) {
    std::vector<double> v{dst.low, dst.high};
    get(key, v);
    if (v.size() != 2) throw ConfigError("config: " + name_ + "." + key + " must be [low, high]");
    dst = {v[0], v[1]};
  }

  [[nodiscard]] const json* child(const char* key) {
    known_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) return nullptr;
    return &node_->at(key);
  }

  void finish() const {
    if (node_ == nullptr) return;
    for (const auto& [key, value] : node_->items()) {
      if (!known_.count(key)) throw ConfigError("config: unknown key '" + name_ + "." + key + "'");
    }
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> known_;
};

SuperStarReference parse_reference(const std::string& s) {
  if (s == "population_mean") return SuperStarReference::PopulationMean;
  if (s == "unconditional") return SuperStarReference::Unconditional;
  throw ConfigError("config: superstar_reference must be population_mean|unconditional");
}

std::string reference_name(SuperStarReference r) {
  return r == SuperStarReference::PopulationMean ? "population_mean" : "unconditional";
}

bmfac::Activation parse_activation(const std::string& s) {
  if (s == "relu") return bmfac::Activation::ReLU;
  if (s == "tanh") return bmfac::Activation::Tanh;
  throw ConfigError("config: activation must be relu|tanh");
}

}  // namespace

void apply_json(RunConfig& cfg, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> sections{"model", "calibration", "policy", "ga", "bmfac", "run"};
  for (const auto& [key, value] : doc.items()) {
    if (!sections.count(key)) throw ConfigError("config: unknown section '" + key + "'");
  }

  auto& m = cfg.env.model;
  Section model(doc, "model");
  model.get("theta", m.theta);
  model.get("gamma_frisch", m.gamma_frisch);
  model.get("beta", m.beta);
  model.get("alpha", m.alpha);
  model.get("delta", m.delta);
  model.get("r_save", m.r_save);
  model.get("tau_s", m.tau_s);
  model.get("p_super", m.p_super);
  model.get("q_super", m.q_super);
  model.get("rho_e", m.rho_e);
  model.get("sigma_e", m.sigma_e);
  model.get("e_bar", m.e_bar);
  model.get("wealth_income_ratio_target", m.wealth_income_ratio_target);
  model.get("h_max", m.h_max);
  model.get("episode_max_steps", m.episode_max_steps);
  model.get("gini_terminal_threshold", m.gini_terminal_threshold);
  model.get("n_households", m.n_households);
  std::string reference = reference_name(m.superstar_reference);
  model.get("superstar_reference", reference);
  m.superstar_reference = parse_reference(reference);
  model.finish();

  Section cal(doc, "calibration");
  cal.get("distribution", cfg.distribution);
  std::string table = cfg.table_csv.string();
  cal.get("table_csv", table);
  cfg.table_csv = table;
  cal.get("point_value", cfg.env.initial.point_value);
  cal.get("log_mean", cfg.env.initial.log_mean);
  cal.get("log_sd", cfg.env.initial.log_sd);
  cal.get("pareto_scale", cfg.env.initial.pareto_scale);
  cal.get("pareto_shape", cfg.env.initial.pareto_shape);
  cal.get("target_ratio", cfg.target_ratio);
  cal.get("h_low", cfg.bisection.low);
  cal.get("h_high", cfg.bisection.high);
  cal.get("relative_tolerance", cfg.bisection.relative_tolerance);
  cal.get("max_iterations", cfg.bisection.max_iterations);
  cal.get("burn_in_steps", cfg.burn_in.steps);
  cal.finish();

  Section pol(doc, "policy");
  pol.get("government", cfg.gov_policy);
  pol.get("households", cfg.hh_policy);
  std::string ckpt = cfg.checkpoint.string();
  pol.get("checkpoint", ckpt);
  cfg.checkpoint = ckpt;
  const auto gov_default = cfg.fixed_government.to_array();
  std::vector<double> fixed_gov(gov_default.begin(), gov_default.end());
  pol.get("fixed_government", fixed_gov);
  if (fixed_gov.size() != kGovernmentActionDim) {
    throw ConfigError("config: policy.fixed_government needs 5 entries");
  }
  cfg.fixed_government = {fixed_gov[0], fixed_gov[1], fixed_gov[2], fixed_gov[3], fixed_gov[4]};
  std::vector<double> fixed_hh{cfg.fixed_household.savings_ratio, cfg.fixed_household.hours_fraction};
  pol.get("fixed_household", fixed_hh);
  if (fixed_hh.size() != kHouseholdActionDim) {
    throw ConfigError("config: policy.fixed_household needs 2 entries");
  }
  cfg.fixed_household = {fixed_hh[0], fixed_hh[1]};
  pol.get("heathcote_sigma_theta", cfg.heathcote.sigma_theta);
  pol.get("heathcote_consumption_normalizer", cfg.heathcote.consumption_normalizer);
  pol.get("heathcote_hours_scale", cfg.heathcote.hours_scale);
  auto& b = cfg.env.bounds;
  pol.interval("tau_bounds", b.tau);
  pol.interval("xi_bounds", b.xi);
  pol.interval("tau_a_bounds", b.tau_a);
  pol.interval("xi_a_bounds", b.xi_a);
  pol.interval("spending_ratio_bounds", b.spending_ratio);
  pol.get("savings_epsilon", b.savings_epsilon);
  pol.finish();

  Section gas(doc, "ga");
  gas.get("dna_size", cfg.ga.ga.dna_size);
  gas.get("pop_size", cfg.ga.ga.pop_size);
  gas.get("crossover_rate", cfg.ga.ga.crossover_rate);
  gas.get("mutation_rate", cfg.ga.ga.mutation_rate);
  gas.get("max_generations", cfg.ga.ga.max_generations);
  gas.get("elite", cfg.ga.ga.elite);
  gas.get("rollouts", cfg.ga.rollouts);
  gas.finish();

  auto& bm = cfg.bmfac;
  Section bms(doc, "bmfac");
  bms.get("lr_critic", bm.lr_critic);
  bms.get("lr_actor", bm.lr_actor);
  bms.get("gamma", bm.gamma);
  bms.get("batch_size", bm.batch_size);
  bms.get("buffer_capacity", bm.buffer_capacity);
  bms.get("init_exploration_steps", bm.init_exploration_steps);
  bms.get("household_updates", bm.household_updates);
  bms.get("government_updates", bm.government_updates);
  bms.get("tau_soft", bm.tau_soft);
  bms.get("hidden_size", bm.hidden_size);
  bms.get("hidden_layers", bm.hidden_layers);
  std::string act = bm.activation == bmfac::Activation::ReLU ? "relu" : "tanh";
  bms.get("activation", act);
  bm.activation = parse_activation(act);
  bms.get("steps_per_epoch", bm.steps_per_epoch);
  bms.get("value_samples", bm.value_samples);
  bms.get("households_per_sample", bm.households_per_sample);
  bms.get("household_actor_sees_government", bm.household_actor_sees_government);
  bms.get("epochs", cfg.bmfac_epochs);
  bms.get("eval_episodes", cfg.bmfac_eval_episodes);
  bms.finish();

  Section run(doc, "run");
  run.get("seed", cfg.seed);
  run.get("num_seeds", cfg.num_seeds);
  run.get("episodes", cfg.episodes);
  std::string task{task_name(cfg.env.task)};
  run.get("task", task);
  cfg.env.task = parse_task(task);
  run.get("omega1", cfg.env.omega1);
  run.get("omega2", cfg.env.omega2);
  run.get("threads", cfg.env.threads);
  run.get("enforce_terminal", cfg.env.enforce_terminal);
  std::string out = cfg.out.string();
  run.get("out", out);
  cfg.out = out;
  run.get("bench_sizes", cfg.bench_sizes);
  run.get("bench_episodes", cfg.bench_episodes);
  run.get("bench_steps", cfg.bench_steps);
  run.finish();
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  RunConfig cfg;
  apply_json(cfg, doc);
  return cfg;
}

void resolve_distribution(RunConfig& cfg) {
  auto& init = cfg.env.initial;
  if (cfg.distribution == "quantile_table") {
    if (cfg.table_csv.empty()) {
      init = InitialDistribution::quantile_table(synthetic_scf_quantiles());
    } else {
      init = load_quantile_table_csv(cfg.table_csv);
    }
  } else if (cfg.distribution == "point_mass") {
    init = InitialDistribution::point_mass(init.point_value);
  } else if (cfg.distribution == "log_normal") {
    init = InitialDistribution::log_normal(init.log_mean, init.log_sd);
  } else if (cfg.distribution == "pareto") {
    init = InitialDistribution::pareto(init.pareto_scale, init.pareto_shape);
  } else {
    throw ConfigError("config: calibration.distribution must be quantile_table|point_mass|log_normal|pareto");
  }
}

void validate(const RunConfig& cfg) {
  cfg.env.validate();
  cfg.ga.ga.validate();
  cfg.bmfac.validate();
  static const std::set<std::string> gov{"free", "random", "fixed", "ga", "bmfac"};
  static const std::set<std::string> hh{"random", "fixed", "heathcote", "bmfac"};
  if (!gov.count(cfg.gov_policy)) {
    throw ConfigError("unknown government policy '" + cfg.gov_policy + "' (free|random|fixed|ga|bmfac)");
  }
  if (!hh.count(cfg.hh_policy)) {
    throw ConfigError("unknown household policy '" + cfg.hh_policy + "' (random|fixed|heathcote|bmfac)");
  }
  if ((cfg.gov_policy == "bmfac" || cfg.hh_policy == "bmfac") && cfg.checkpoint.empty() &&
      cfg.subcommand == "simulate") {
    throw ConfigError("bmfac policies need policy.checkpoint");
  }
  if (cfg.num_seeds < 1) throw ConfigError("run.num_seeds must be >= 1");
  if (cfg.episodes < 1) throw ConfigError("run.episodes must be >= 1");
  if (cfg.bmfac_epochs < 0 || cfg.bmfac_eval_episodes < 1) {
    throw ConfigError("bmfac.epochs must be >= 0 and bmfac.eval_episodes >= 1");
  }
  if (cfg.bench_sizes.empty() || cfg.bench_episodes < 1 || cfg.bench_steps < 1) {
    throw ConfigError("run.bench_sizes must be nonempty, bench_episodes and bench_steps >= 1");
  }
  for (int n : cfg.bench_sizes) {
    if (n < 1) throw ConfigError("run.bench_sizes entries must be >= 1");
  }
  if (!(cfg.target_ratio > 0.0)) throw ConfigError("calibration.target_ratio must be > 0");
}

json to_json(const RunConfig& cfg) {
  const auto& m = cfg.env.model;
  const auto& b = cfg.env.bounds;
  const auto& bm = cfg.bmfac;
  auto interval = [](const Interval& i) { return json::array({i.low, i.high}); };
  const auto g = cfg.fixed_government.to_array();
  return {
      {"model",
       {{"theta", m.theta},
        {"gamma_frisch", m.gamma_frisch},
        {"beta", m.beta},
        {"alpha", m.alpha},
        {"delta", m.delta},
        {"r_save", m.r_save},
        {"tau_s", m.tau_s},
        {"p_super", m.p_super},
        {"q_super", m.q_super},
        {"rho_e", m.rho_e},
        {"sigma_e", m.sigma_e},
        {"e_bar", m.e_bar},
        {"wealth_income_ratio_target", m.wealth_income_ratio_target},
        {"h_max", m.h_max},
        {"episode_max_steps", m.episode_max_steps},
        {"gini_terminal_threshold", m.gini_terminal_threshold},
        {"n_households", m.n_households},
        {"superstar_reference", reference_name(m.superstar_reference)}}},
      {"calibration",
       {{"distribution", cfg.distribution},
        {"table_csv", cfg.table_csv.string()},
        {"point_value", cfg.env.initial.point_value},
        {"log_mean", cfg.env.initial.log_mean},
        {"log_sd", cfg.env.initial.log_sd},
        {"pareto_scale", cfg.env.initial.pareto_scale},
        {"pareto_shape", cfg.env.initial.pareto_shape},
        {"target_ratio", cfg.target_ratio},
        {"h_low", cfg.bisection.low},
        {"h_high", cfg.bisection.high},
        {"relative_tolerance", cfg.bisection.relative_tolerance},
        {"max_iterations", cfg.bisection.max_iterations},
        {"burn_in_steps", cfg.burn_in.steps}}},
      {"policy",
       {{"government", cfg.gov_policy},
        {"households", cfg.hh_policy},
        {"checkpoint", cfg.checkpoint.string()},
        {"fixed_government", json::array({g[0], g[1], g[2], g[3], g[4]})},
        {"fixed_household",
         json::array({cfg.fixed_household.savings_ratio, cfg.fixed_household.hours_fraction})},
        {"heathcote_sigma_theta", cfg.heathcote.sigma_theta},
        {"heathcote_consumption_normalizer", cfg.heathcote.consumption_normalizer},
        {"heathcote_hours_scale", cfg.heathcote.hours_scale},
        {"tau_bounds", interval(b.tau)},
        {"xi_bounds", interval(b.xi)},
        {"tau_a_bounds", interval(b.tau_a)},
        {"xi_a_bounds", interval(b.xi_a)},
        {"spending_ratio_bounds", interval(b.spending_ratio)},
        {"savings_epsilon", b.savings_epsilon}}},
      {"ga",
       {{"dna_size", cfg.ga.ga.dna_size},
        {"pop_size", cfg.ga.ga.pop_size},
        {"crossover_rate", cfg.ga.ga.crossover_rate},
        {"mutation_rate", cfg.ga.ga.mutation_rate},
        {"max_generations", cfg.ga.ga.max_generations},
        {"elite", cfg.ga.ga.elite},
        {"rollouts", cfg.ga.rollouts}}},
      {"bmfac",
       {{"lr_critic", bm.lr_critic},
        {"lr_actor", bm.lr_actor},
        {"gamma", bm.gamma},
        {"batch_size", bm.batch_size},
        {"buffer_capacity", bm.buffer_capacity},
        {"init_exploration_steps", bm.init_exploration_steps},
        {"household_updates", bm.household_updates},
        {"government_updates", bm.government_updates},
        {"tau_soft", bm.tau_soft},
        {"hidden_size", bm.hidden_size},
        {"hidden_layers", bm.hidden_layers},
        {"activation", bm.activation == bmfac::Activation::ReLU ? "relu" : "tanh"},
        {"steps_per_epoch", bm.steps_per_epoch},
        {"value_samples", bm.value_samples},
        {"households_per_sample", bm.households_per_sample},
        {"household_actor_sees_government", bm.household_actor_sees_government},
        {"epochs", cfg.bmfac_epochs},
        {"eval_episodes", cfg.bmfac_eval_episodes}}},
      {"run",
       {{"seed", cfg.seed},
        {"num_seeds", cfg.num_seeds},
        {"episodes", cfg.episodes},
        {"task", std::string(task_name(cfg.env.task))},
        {"omega1", cfg.env.omega1},
        {"omega2", cfg.env.omega2},
        {"threads", cfg.env.threads},
        {"enforce_terminal", cfg.env.enforce_terminal},
        {"out", cfg.out.string()},
        {"bench_sizes", cfg.bench_sizes},
        {"bench_episodes", cfg.bench_episodes},
        {"bench_steps", cfg.bench_steps}}},
  };
}

}  // namespace taxai::runner
