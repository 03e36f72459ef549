#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include <fmt/core.h>
#include <fmt/ostream.h>
#include <omp.h>

#include "taxai/errors.hpp"
#include "taxai/seed.hpp"

#ifndef TAXAI_VERSION
#define TAXAI_VERSION "unknown"
#endif
#ifndef TAXAI_GIT_REVISION
#define TAXAI_GIT_REVISION "unknown"
#endif

namespace taxai::runner {

namespace fs = std::filesystem;
using nlohmann::json;

GovernmentAction stable_government_action() { return {0.6, 0.6, 0.2, 0.3, 0.1}; }
HouseholdAction stable_household_action() { return {0.9, 0.3}; }

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

std::string reason_or_none(const std::optional<DoneReason>& r) {
  return r ? std::string(done_reason_name(*r)) : std::string("none");
}

// Columns shared by summary.csv and evaluation.csv.
constexpr const char* kSummaryColumns =
    "years,done_reason,mean_social_welfare,per_capita_gdp,wealth_gini,income_gini,total_gdp,"
    "total_government_reward,mean_household_reward,total_household_reward";

std::string summary_fields(const EpisodeSummary& s) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{}", s.years, reason_or_none(s.done_reason),
                     s.mean_social_welfare, s.per_capita_gdp, s.wealth_gini, s.income_gini,
                     s.total_gdp, s.total_government_reward, s.mean_household_reward,
                     s.total_household_reward);
}

}  // namespace

PolicySet make_policies(const RunConfig& cfg) {
  PolicySet set;
  const EnvConfig env = cfg.env;
  const double eps = env.bounds.savings_epsilon;

  if (cfg.gov_policy == "bmfac" || cfg.hh_policy == "bmfac") {
    set.agent = std::make_unique<bmfac::Bmfac>(env, cfg.bmfac, cfg.seed);
    set.agent->load_networks(bmfac::load_checkpoint(cfg.checkpoint));
  }

  if (cfg.gov_policy == "free") {
    set.government = std::make_unique<FixedGovernmentPolicy>(baselines::free_market_action());
  } else if (cfg.gov_policy == "fixed") {
    set.government = std::make_unique<FixedGovernmentPolicy>(cfg.fixed_government);
  } else if (cfg.gov_policy == "random") {
    set.government = std::make_unique<RandomGovernmentPolicy>(env.bounds);
  } else if (cfg.gov_policy == "ga") {
    auto search = cfg.ga;
    search.heathcote = cfg.heathcote;
    search.threads = env.threads;
    const auto result = ga::search_government_policy(env, search, cfg.seed);
    const auto a = result.action;
    fmt::print(stderr, "ga: best fitness {} -> tau={} xi={} tau_a={} xi_a={} r_g={}\n",
               result.ga.best_fitness, a.tau, a.xi, a.tau_a, a.xi_a, a.spending_ratio);
    set.government = std::make_unique<FixedGovernmentPolicy>(a);
  } else if (cfg.gov_policy == "bmfac") {
    set.government = std::make_unique<bmfac::BmfacGovernmentPolicy>(*set.agent);
  } else {
    throw ConfigError("unknown government policy '" + cfg.gov_policy + "'");
  }

  if (cfg.hh_policy == "random") {
    set.households = std::make_unique<RandomHouseholdPolicy>(eps);
  } else if (cfg.hh_policy == "fixed") {
    set.households = std::make_unique<FixedHouseholdPolicy>(cfg.fixed_household);
  } else if (cfg.hh_policy == "heathcote") {
    set.households = std::make_unique<HeathcoteHouseholdPolicy>(env.model, cfg.heathcote, eps);
  } else if (cfg.hh_policy == "bmfac") {
    set.households = std::make_unique<bmfac::BmfacHouseholdPolicy>(*set.agent);
  } else {
    throw ConfigError("unknown household policy '" + cfg.hh_policy + "'");
  }
  return set;
}

Throughput measure_throughput(EnvConfig env, std::size_t households, int episodes, int steps,
                              std::uint64_t seed) {
  env.model.n_households = static_cast<int>(households);
  Environment sim(env);
  const GovernmentAction gov = stable_government_action();
  const std::vector<HouseholdAction> actions(households, stable_household_action());

  Throughput t;
  t.households = households;
  for (int e = 0; e < episodes; ++e) {
    std::uint64_t resets = 0;
    sim.reset(derive_seed(seed, static_cast<std::uint64_t>(e)));
    std::chrono::steady_clock::duration elapsed{};
    for (int s = 0; s < steps; ++s) {
      if (sim.done()) sim.reset(derive_seed(seed, 1'000'000 + (++resets)));
      const auto start = std::chrono::steady_clock::now();
      (void)sim.step(gov, actions);
      elapsed += std::chrono::steady_clock::now() - start;
    }
    const double seconds = std::chrono::duration<double>(elapsed).count();
    t.per_episode.push_back(static_cast<double>(steps) / seconds);
  }
  const auto m = moments(t.per_episode);
  t.mean = m.mean;
  t.sd = m.sd;
  return t;
}

json hardware_info() {
  std::string model = "unknown";
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) model = line.substr(colon + 2);
      break;
    }
  }
  return {{"cpu_model", model},
          {"logical_cores", std::thread::hardware_concurrency()},
          {"omp_max_threads", omp_get_max_threads()},
          {"compiler", __VERSION__}};
}

void write_manifest(const RunConfig& cfg, const fs::path& dir) {
  json manifest{{"version", TAXAI_VERSION},
                {"git_revision", TAXAI_GIT_REVISION},
                {"subcommand", cfg.subcommand},
                {"seed", cfg.seed},
                {"config", to_json(cfg)},
                {"hardware", hardware_info()}};
  auto out = open_out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

void run_simulate(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  write_manifest(cfg, cfg.out);
  Environment env(cfg.env);
  auto policies = make_policies(cfg);

  auto summary = open_out(cfg.out / "summary.csv");
  fmt::print(summary, "seed,episode,{}\n", kSummaryColumns);
  std::vector<EpisodeSummary> all;

  for (int k = 0; k < cfg.num_seeds; ++k) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(k);
    for (int e = 0; e < cfg.episodes; ++e) {
      auto csv = open_out(cfg.out / fmt::format("metrics_seed{}_ep{}.csv", seed, e));
      csv << metrics::metrics_csv_header() << '\n';
      const auto s = run_episode(
          env, *policies.government, *policies.households,
          derive_seed(seed, static_cast<std::uint64_t>(e)),
          [&csv](const StepResult& r) { metrics::write_metrics_csv_row(csv, r.metrics); });
      fmt::print(summary, "{},{},{}\n", seed, e, summary_fields(s));
      fmt::print(stderr, "seed {} episode {}: {} years, {}\n", seed, e, s.years,
                 reason_or_none(s.done_reason));
      all.push_back(s);
    }
  }

  auto stats = open_out(cfg.out / "summary_stats.csv");
  stats << "metric,mean,std,n\n";
  auto column = [&](const char* name, auto get) {
    std::vector<double> v;
    for (const auto& s : all) v.push_back(static_cast<double>(get(s)));
    const auto m = moments(v);
    fmt::print(stats, "{},{},{},{}\n", name, m.mean, m.sd, v.size());
    fmt::print("{:<24} {:.6g} +- {:.3g}\n", name, m.mean, m.sd);
  };
  column("years", [](const EpisodeSummary& s) { return s.years; });
  column("mean_social_welfare", [](const EpisodeSummary& s) { return s.mean_social_welfare; });
  column("per_capita_gdp", [](const EpisodeSummary& s) { return s.per_capita_gdp; });
  column("wealth_gini", [](const EpisodeSummary& s) { return s.wealth_gini; });
  column("income_gini", [](const EpisodeSummary& s) { return s.income_gini; });
  column("total_gdp", [](const EpisodeSummary& s) { return s.total_gdp; });
  column("total_government_reward", [](const EpisodeSummary& s) { return s.total_government_reward; });
  column("mean_household_reward", [](const EpisodeSummary& s) { return s.mean_household_reward; });
  column("total_household_reward", [](const EpisodeSummary& s) { return s.total_household_reward; });
}

void run_train_bmfac(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  write_manifest(cfg, cfg.out);
  const EnvConfig env_cfg = cfg.env;
  Environment env(env_cfg);
  bmfac::Bmfac agent(env_cfg, cfg.bmfac, cfg.seed);

  auto train_csv = open_out(cfg.out / "train.csv");
  bmfac::write_epoch_csv_header(train_csv);
  agent.train(env, cfg.bmfac_epochs, [&](const bmfac::EpochMetrics& m) {
    bmfac::write_epoch_csv_row(train_csv, m);
    train_csv.flush();
    fmt::print(stderr, "epoch {:>4}  steps {:>7}  gov reward {:.4g}  hh reward {:.4g}\n", m.epoch,
               m.env_steps, m.government_reward, m.household_reward);
  });
  bmfac::save_checkpoint(cfg.out / "bmfac.ckpt", agent.networks());

  const auto eval = agent.evaluate(cfg.bmfac_eval_episodes, cfg.seed);
  auto out = open_out(cfg.out / "evaluation.csv");
  fmt::print(out, "households,{}\n", kSummaryColumns);
  fmt::print(out, "bmfac,{}\n", summary_fields(eval.trained));
  fmt::print(out, "random,{}\n", summary_fields(eval.random));
  fmt::print("households bmfac: welfare {:.6g}, years {}\n", eval.trained.mean_social_welfare,
             eval.trained.years);
  fmt::print("households random: welfare {:.6g}, years {}\n", eval.random.mean_social_welfare,
             eval.random.years);
}

void run_calibrate(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  write_manifest(cfg, cfg.out);
  const auto r = calibration::calibrate_hmax(cfg.env.model, cfg.env.initial, cfg.target_ratio,
                                             cfg.seed, cfg.bisection, cfg.burn_in);
  json doc{{"h_max", r.h_max},
           {"ratio", r.ratio},
           {"target_ratio", cfg.target_ratio},
           {"iterations", r.iterations},
           {"seed", cfg.seed}};
  auto out = open_out(cfg.out / "calibration.json");
  out << doc.dump(2) << '\n';
  fmt::print("h_max = {} (wealth/income {} after {} iterations)\n", r.h_max, r.ratio,
             r.iterations);
}

void run_bench(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  write_manifest(cfg, cfg.out);
  auto csv = open_out(cfg.out / "bench.csv");
  csv << "households,threads,episodes,steps,steps_per_sec_mean,steps_per_sec_sd\n";
  const auto hw = hardware_info();
  fmt::print("{} ({} logical cores, {} threads)\n", hw["cpu_model"].get<std::string>(),
             hw["logical_cores"].get<unsigned>(), cfg.env.threads);
  for (int n : cfg.bench_sizes) {
    const auto t = measure_throughput(cfg.env, static_cast<std::size_t>(n), cfg.bench_episodes,
                                      cfg.bench_steps, cfg.seed);
    fmt::print(csv, "{},{},{},{},{},{}\n", n, cfg.env.threads, cfg.bench_episodes, cfg.bench_steps,
               t.mean, t.sd);
    fmt::print("N={:<6} {:>12.1f} +- {:.1f} steps/sec\n", n, t.mean, t.sd);
  }
}

void run(const RunConfig& cfg) {
  if (cfg.subcommand == "simulate") return run_simulate(cfg);
  if (cfg.subcommand == "train-bmfac") return run_train_bmfac(cfg);
  if (cfg.subcommand == "calibrate") return run_calibrate(cfg);
  if (cfg.subcommand == "bench") return run_bench(cfg);
  throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
}

}  // namespace taxai::runner
