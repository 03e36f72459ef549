#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "runner/runner.hpp"
#include "taxai/errors.hpp"

namespace {

// Command-line values; unset options leave the config file's value alone.
struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<std::string> task;
  std::optional<std::string> gov_policy;
  std::optional<std::string> hh_policy;
  std::optional<int> episodes;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<int> num_seeds;
  std::optional<int> epochs;
  std::optional<double> h_max;
  std::optional<std::string> checkpoint;
};

taxai::runner::RunConfig resolve(const Overrides& o, const std::string& subcommand) {
  using namespace taxai;
  runner::RunConfig cfg = o.config.empty() ? runner::RunConfig{} : runner::load_config_file(o.config);
  cfg.subcommand = subcommand;
  if (o.seed) cfg.seed = *o.seed;
  if (o.n) cfg.env.model.n_households = *o.n;
  if (o.task) cfg.env.task = parse_task(*o.task);
  if (o.gov_policy) cfg.gov_policy = *o.gov_policy;
  if (o.hh_policy) cfg.hh_policy = *o.hh_policy;
  if (o.episodes) cfg.episodes = *o.episodes;
  if (o.out) cfg.out = *o.out;
  if (o.threads) cfg.env.threads = *o.threads;
  if (o.num_seeds) cfg.num_seeds = *o.num_seeds;
  if (o.epochs) cfg.bmfac_epochs = *o.epochs;
  if (o.h_max) cfg.env.model.h_max = *o.h_max;
  if (o.checkpoint) cfg.checkpoint = *o.checkpoint;
  runner::resolve_distribution(cfg);
  runner::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous-agent tax policy simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "base seed");
  app.add_option("--n", o.n, "number of households");
  app.add_option("--task", o.task, "government objective: gdp|gini|welfare|multi");
  app.add_option("--gov-policy", o.gov_policy, "free|random|fixed|ga|bmfac");
  app.add_option("--hh-policy", o.hh_policy, "random|fixed|heathcote|bmfac");
  app.add_option("--episodes", o.episodes, "episodes per seed");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--threads", o.threads, "OpenMP threads for the household map");
  app.add_option("--num-seeds", o.num_seeds, "consecutive seeds starting at --seed");
  app.add_option("--epochs", o.epochs, "BMFAC training epochs");
  app.add_option("--h-max", o.h_max, "maximum working hours per step");
  app.add_option("--checkpoint", o.checkpoint, "BMFAC checkpoint to load");

  app.add_subcommand("simulate", "play episodes and write per-step metrics");
  app.add_subcommand("train-bmfac", "train BMFAC policies and evaluate them");
  app.add_subcommand("calibrate", "fit h_max to the wealth-to-income target");
  app.add_subcommand("bench", "measure environment steps per second");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const auto cfg = resolve(o, app.get_subcommands().front()->get_name());
    taxai::runner::run(cfg);
  } catch (const taxai::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
