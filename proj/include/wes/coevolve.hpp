#pragma once
// Co-evolutionary arms race: mechanisms evolve against frozen bad-actor
// policies, then the bad actors retrain against the deployed (knee-point)
// mechanism, round after round.

#include "wes/evaluate.hpp"
#include "wes/training.hpp"

namespace wes::optimize {

struct CoevolutionConfig {
  std::uint32_t rounds = 3;
  std::uint32_t mech_generations = 6;
  std::uint32_t retrain_episodes = 120;
  std::uint32_t population = 12;
  std::uint32_t seeds_per_eval = 3;
  runner::TrainConfig retrain{120, 0.3, 0.98, 0.02};
};

struct RoundRecord {
  std::uint32_t round = 0;
  double f1_frozen = 0.0;     // knee mechanism vs the policy it was tuned against
  double f1_retrained = 0.0;  // same mechanism vs the retrained policy
  double f2 = 0.0;
  Genome knee_genome;
};

struct CoevolveResult {
  std::vector<RoundRecord> history;
  agents::QTable final_policy;
  std::vector<Individual> final_front;
  std::vector<std::uint64_t> final_eval_seeds;
};

// Alternates (a) NSGA-II over mechanisms against the frozen scammer policy
// and (b) RL retraining of the scammer against the round's knee mechanism.
CoevolveResult coevolve(const CoevolutionConfig& config, const runner::Script& scenario,
                        runner::UserId scammer, const agents::QTable& initial_policy,
                        std::uint64_t seed, int workers);

}  // namespace wes::optimize
