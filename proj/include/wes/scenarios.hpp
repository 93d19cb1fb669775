#pragma once
// Scenario presets: the scam funnel, the messenger community, and the
// privacy/data probing setups used across training, optimization, A/B tests
// and the acceptance suite.

#include "wes/script.hpp"

namespace wes::scenarios {

// One RL scammer (fresh test user), `targets` vulnerable rule-based target
// bots bound to generated users, and `normals` rule-based normal users.
// Identity mechanism unless overridden later. The scammer's reward funnel is
// search -> friend request -> accept -> message.
runner::Script scam_scenario(std::uint32_t n_users, std::uint32_t targets,
                             std::uint32_t normals, std::uint64_t graph_seed,
                             platform::Tick episode_ticks);

platform::UserId scam_scenario_scammer(const runner::Script& script);

// A community of normal messenger users on an Erdos-Renyi world; worlds vary
// per episode. The baseline for metric oracles and fault injection.
runner::Script messenger_scenario(std::uint32_t n_users, std::uint32_t bots,
                                  std::uint64_t graph_seed,
                                  platform::Tick episode_ticks);

// Read-only privacy-breaker probing a world where normal bots post with
// mixed visibility. The breaker's reward counts policy-checker violations.
runner::Script privacy_scenario(std::uint32_t n_users, std::uint32_t posters,
                                std::uint64_t graph_seed,
                                platform::Tick episode_ticks);

platform::UserId privacy_scenario_breaker(const runner::Script& script);

// Read-only data acquirer sweeping profiles/posts.
runner::Script data_acquisition_scenario(std::uint32_t n_users,
                                         std::uint64_t graph_seed,
                                         platform::Tick episode_ticks);

}  // namespace wes::scenarios
