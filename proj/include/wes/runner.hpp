#pragma once
// The ScriptRunner loop: build the environment, advance the virtual clock,
// execute the next bot through the mechanism and the platform, observe and
// log, stop on the objective. Deterministic given (script, seed); wall-clock
// time never enters simulation semantics.

#include <map>
#include <memory>
#include <span>

#include "wes/monitor.hpp"
#include "wes/script.hpp"

namespace wes::runner {

struct EpisodeResult {
  std::uint64_t seed = 0;
  std::uint64_t final_world_hash = 0;
  platform::Tick ticks_elapsed = 0;
  bool objective_reached = false;
  std::uint64_t steps = 0;  // roster bot action attempts
  std::map<UserId, double> rewards;
  std::map<UserId, double> utilities;  // normal-role bots
  std::map<std::string, double> metric_finals;

  // Heavy artifacts; null when the script ran with keep_artifacts = false.
  std::shared_ptr<const platform::WorldState> initial_world;
  std::shared_ptr<const platform::WorldState> final_world;
  std::shared_ptr<const Monitor> monitor;

  EpisodeTrace trace() const;
};

// External policy wiring for RL bots, used by the training loop and the
// optimizer to carry Q-tables across episodes.
struct PolicySlot {
  const agents::QTable* initial = nullptr;  // copied in at setup
  agents::QTable* out = nullptr;            // final table copied out
  std::optional<double> epsilon;            // overrides the spec value
  std::optional<bool> train;
};

using PolicySlots = std::map<UserId, PolicySlot>;

EpisodeResult run_script(const Script& script, std::uint64_t seed);
EpisodeResult run_script(const Script& script, std::uint64_t seed,
                         const PolicySlots& slots);

// Independent episodes fanned out over a worker pool; results are assembled
// by index so the output is identical for any worker count. workers <= 1 is
// the serial reference path.
std::vector<EpisodeResult> run_batch(const Script& script,
                                     std::span<const std::uint64_t> seeds,
                                     int workers);

}  // namespace wes::runner
