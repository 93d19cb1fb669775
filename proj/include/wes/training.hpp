#pragma once
// Episode-loop RL training for one roster bot. The Q-table persists across
// episodes; exploration decays on a fixed schedule so the tail of the reward
// curve reflects the learned policy.

#include "wes/runner.hpp"

namespace wes::runner {

struct TrainConfig {
  std::uint32_t episodes = 500;
  double epsilon_start = 0.5;
  double epsilon_decay = 0.99;
  double epsilon_min = 0.02;
};

struct TrainResult {
  agents::QTable policy;
  std::vector<double> episode_rewards;  // trainee reward per episode
};

// Trains the RL bot `trainee` on the scenario. Episode e runs with seed
// split_seed(seed, "train-ep", e) and epsilon max(eps_min, eps0 * decay^e).
// warm_start, when given, initializes the Q-table.
TrainResult train_policy(const Script& scenario, UserId trainee,
                         const TrainConfig& config, std::uint64_t seed,
                         const agents::QTable* warm_start = nullptr);

}  // namespace wes::runner
