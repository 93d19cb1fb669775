#pragma once
// Script / Objective: the episode description and its stopping criterion.

#include <optional>
#include <string>
#include <vector>

#include "wes/agents.hpp"
#include "wes/graphgen.hpp"
#include "wes/mechanism.hpp"
#include "wes/monitor.hpp"
#include "wes/platform.hpp"
#include "wes/rewards.hpp"

namespace wes::runner {

enum class ObjectiveKind : std::uint8_t { Time, Steps, Episodes, Results };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::Time;
  std::uint64_t value = 0;       // ticks / steps / episodes / threshold
  std::string predicate;         // Results: metric id

  static Objective time(std::uint64_t ticks);
  static Objective steps(std::uint64_t count);
  static Objective episodes(std::uint64_t count);
  static Objective results(std::string predicate, std::uint64_t threshold);
};

struct ScriptInvalid : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnknownPredicate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Script {
  graphgen::GraphSpec graph;
  // Protected replay population appended after the synthetic graph; these
  // users are driven by scripted replay agents tagged origin=RealUser.
  std::uint32_t protected_users = 0;
  std::uint32_t protected_message_interval = 4;  // replay cadence, ticks

  std::vector<agents::BotSpec> roster;

  // Global mechanism. nullopt = mechanism-free run (always allow, unit
  // costs). Per-bot overrides in BotSpec take precedence when set.
  std::optional<mechanism::MechanismParams> mechanism;

  Objective objective;
  std::vector<std::string> metrics;  // series to record; empty = all built-ins
  platform::Tick max_ticks = 1000;
  std::uint64_t master_seed = 0;
  // Re-derive the graph seed from the episode seed, so every episode gets its
  // own world instead of the one pinned by graph.seed.
  bool world_per_episode = false;
  std::uint32_t observations_per_turn = 3;
  platform::FaultConfig faults;
  double denial_penalty = agents::kDefaultDenialPenalty;

  // Drop per-episode world/monitor artifacts to keep large batches light.
  bool keep_artifacts = true;
};

// Checks roster/user-id/objective invariants. Throws ScriptInvalid.
void validate(const Script& script);

// First user id of the protected replay range for this script.
platform::UserId protected_base(const Script& script);

// First user id available for fresh bot test users.
platform::UserId bot_user_base(const Script& script);

}  // namespace wes::runner
