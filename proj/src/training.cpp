#include "wes/training.hpp"

#include <algorithm>
#include <cmath>

namespace wes::runner {

TrainResult train_policy(const Script& scenario, UserId trainee,
                         const TrainConfig& config, std::uint64_t seed,
                         const agents::QTable* warm_start) {
  const bool trainee_present = std::any_of(
      scenario.roster.begin(), scenario.roster.end(), [&](const agents::BotSpec& b) {
        return b.user == trainee && b.policy == agents::PolicyKind::Rl;
      });
  if (!trainee_present) {
    throw ScriptInvalid("train_policy: trainee is not an RL bot in the roster");
  }

  TrainResult result;
  if (warm_start != nullptr) {
    result.policy = *warm_start;
  }
  result.episode_rewards.reserve(config.episodes);

  Script script = scenario;
  script.keep_artifacts = false;

  double epsilon = config.epsilon_start;
  for (std::uint32_t episode = 0; episode < config.episodes; ++episode) {
    PolicySlots slots;
    PolicySlot slot;
    slot.initial = &result.policy;
    slot.out = &result.policy;
    slot.epsilon = std::max(config.epsilon_min, epsilon);
    slot.train = true;
    slots[trainee] = slot;

    const std::uint64_t episode_seed = split_seed(seed, "train-ep", episode);
    const EpisodeResult episode_result = run_script(script, episode_seed, slots);
    result.episode_rewards.push_back(episode_result.rewards.at(trainee));

    epsilon *= config.epsilon_decay;
  }
  return result;
}

}  // namespace wes::runner
