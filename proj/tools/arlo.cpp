#include <CLI11.hpp>

#include <iostream>

#include "arlo/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"arlo: automatic reinforcement-learning pipelines"};
  app.require_subcommand(1);

  arlo::RunArgs run_args;
  std::uint64_t seed = 0;
  std::string out;
  auto* run = app.add_subcommand("run", "validate and execute a pipeline configuration");
  run->add_option("--config", run_args.config_path, "configuration file (JSON)")->required();
  auto* seed_opt = run->add_option("--seed", seed, "global seed (overrides the config's seed)");
  auto* out_opt = run->add_option("--out", out, "output directory (overrides the config's output)");
  run->add_option("--set", run_args.overrides, "override a config value: dotted.path=value")->take_all();

  std::string oracle_config;
  std::size_t oracle_episodes = 10000;
  std::uint64_t oracle_seed = 0;
  auto* oracle = app.add_subcommand("oracle", "print the reference solution of an LQG or finite environment");
  oracle->add_option("--config", oracle_config, "configuration or environment file (JSON)")->required();
  oracle->add_option("--episodes", oracle_episodes, "Monte-Carlo episodes for LQG")->capture_default_str();
  oracle->add_option("--mc-seed", oracle_seed, "Monte-Carlo seed for LQG")->capture_default_str();

  std::string run_dir;
  auto* report = app.add_subcommand("report", "derive CSV tables and a summary from a run directory");
  report->add_option("--run", run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : arlo::kExitInvalid;
  }

  if (*run) {
    if (*seed_opt) run_args.seed = seed;
    if (*out_opt) run_args.out = out;
    return arlo::cmd_run(run_args, std::cout, std::cerr);
  }
  if (*oracle) return arlo::cmd_oracle(oracle_config, oracle_episodes, oracle_seed, std::cout, std::cerr);
  return arlo::cmd_report(run_dir, std::cout, std::cerr);
}
