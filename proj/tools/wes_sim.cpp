// wes_sim: single entry point for graph generation, script runs, RL
// training, mechanism optimization, co-evolution, and A/B social tests.

#include <optional>

#include "CLI11.hpp"
#include "wes/commands.hpp"
#include "wes/version.hpp"

namespace {

void add_common(CLI::App* cmd, wes::cli::GlobalOptions& options,
                std::optional<std::uint64_t>& seed_flag) {
  cmd->add_option("--config", options.config_path, "Config file (strict JSON)")
      ->required();
  cmd->add_option("--out", options.out_dir, "Output directory")->required();
  cmd->add_option("--seed", seed_flag, "Master seed override");
  cmd->add_option("--workers", options.workers,
                  "Episode worker pool size (default: WES_SIM_WORKERS or hardware)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale web-enabled simulation framework"};
  app.set_version_flag("--version", wes::kToolVersion);
  app.require_subcommand(1);

  struct SubState {
    wes::cli::GlobalOptions options;
    std::optional<std::uint64_t> seed;
  };
  SubState gen, run, train, optimize, coevolve, abtest;
  std::optional<std::uint32_t> train_episodes;

  add_common(app.add_subcommand("gen-graph", "Generate a synthetic world snapshot"),
             gen.options, gen.seed);
  add_common(app.add_subcommand("run", "Run one scripted episode"), run.options,
             run.seed);
  auto* train_cmd =
      app.add_subcommand("train", "Train an RL bot policy on a scenario");
  add_common(train_cmd, train.options, train.seed);
  train_cmd->add_option("--episodes", train_episodes, "Training episode count override");
  add_common(app.add_subcommand("optimize", "NSGA-II mechanism search"),
             optimize.options, optimize.seed);
  add_common(app.add_subcommand("coevolve", "Mechanism/bad-actor arms race"),
             coevolve.options, coevolve.seed);
  add_common(app.add_subcommand("abtest", "Mechanism A/B test with metric oracles"),
             abtest.options, abtest.seed);

  CLI11_PARSE(app, argc, argv);

  auto finish = [](SubState& state) {
    state.options.seed = state.seed;
    return state.options;
  };

  if (app.got_subcommand("gen-graph")) {
    return wes::cli::cmd_gen_graph(finish(gen));
  }
  if (app.got_subcommand("run")) {
    return wes::cli::cmd_run(finish(run));
  }
  if (app.got_subcommand("train")) {
    return wes::cli::cmd_train(finish(train), train_episodes);
  }
  if (app.got_subcommand("optimize")) {
    return wes::cli::cmd_optimize(finish(optimize));
  }
  if (app.got_subcommand("coevolve")) {
    return wes::cli::cmd_coevolve(finish(coevolve));
  }
  if (app.got_subcommand("abtest")) {
    return wes::cli::cmd_abtest(finish(abtest));
  }
  return 2;
}
