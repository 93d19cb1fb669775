#pragma once
// Strict JSON configuration for the CLI: single documents with an explicit
// schema_version, rejected on unknown fields so experiments stay auditable.
// Parsing happens from strings; no JSON types leak into this interface.

#include <optional>
#include <string>

#include "wes/coevolve.hpp"
#include "wes/script.hpp"
#include "wes/socialtest.hpp"
#include "wes/training.hpp"

namespace wes::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

// --- Per-subcommand documents -------------------------------------------------

struct GenGraphConfig {
  graphgen::GraphSpec graph;
};

struct RunConfig {
  runner::Script script;
};

struct TrainFileConfig {
  runner::Script script;
  platform::UserId trainee = 0;
  runner::TrainConfig train;
};

struct OptimizeConfig {
  runner::Script script;
  platform::UserId scammer = 0;
  std::uint32_t generations = 20;
  std::uint32_t population = 16;
  std::uint32_t seeds_per_eval = 5;
  std::uint32_t pretrain_episodes = 300;
  std::optional<std::string> policy_snapshot;
  std::string f2_metric = "utility_loss";
};

struct CoevolveFileConfig {
  runner::Script script;
  platform::UserId scammer = 0;
  optimize::CoevolutionConfig coevolution;
  std::uint32_t pretrain_episodes = 300;
  std::optional<std::string> policy_snapshot;
};

struct AbtestConfig {
  runner::Script script;
  std::uint32_t n_seeds = 20;
  socialtest::ArmSpec arm_a;
  socialtest::ArmSpec arm_b;
  std::vector<socialtest::OracleSpec> oracles;
};

GenGraphConfig parse_gen_graph(const std::string& text);
RunConfig parse_run(const std::string& text);
TrainFileConfig parse_train(const std::string& text);
OptimizeConfig parse_optimize(const std::string& text);
CoevolveFileConfig parse_coevolve(const std::string& text);
AbtestConfig parse_abtest(const std::string& text);

// Canonical re-serializations, embedded in run manifests so a run can be
// reproduced from the manifest alone.
std::string script_to_json(const runner::Script& script);
std::string graph_to_json(const graphgen::GraphSpec& spec);
std::string mechanism_to_json(const mechanism::MechanismParams& params);

// World snapshot document (gen-graph output).
std::string world_to_json(const platform::WorldState& world);

}  // namespace wes::config
