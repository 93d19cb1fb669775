#include "wes/coevolve.hpp"

#include <stdexcept>

namespace wes::optimize {

CoevolveResult coevolve(const CoevolutionConfig& config, const runner::Script& scenario,
                        runner::UserId scammer, const agents::QTable& initial_policy,
                        std::uint64_t seed, int workers) {
  if (config.rounds == 0 || config.population == 0 || config.seeds_per_eval == 0 ||
      config.mech_generations == 0 || config.retrain_episodes == 0) {
    throw std::invalid_argument("coevolve: all config counts must be positive");
  }

  CoevolveResult result;
  agents::QTable frozen = initial_policy;

  for (std::uint32_t round = 0; round < config.rounds; ++round) {
    // Fixed common seed set for every evaluation this round.
    std::vector<std::uint64_t> eval_seeds;
    eval_seeds.reserve(config.seeds_per_eval);
    for (std::uint32_t i = 0; i < config.seeds_per_eval; ++i) {
      eval_seeds.push_back(split_seed(seed, "coevolve-eval",
                                      static_cast<std::uint64_t>(round) * 1000 + i));
    }

    EvalContext ctx;
    ctx.scenario = scenario;
    ctx.scammer = scammer;
    ctx.scammer_policy = frozen;
    ctx.seeds = eval_seeds;
    ctx.workers = workers;

    SearchConfig search;
    search.generations = config.mech_generations;
    search.nsga.population = config.population;
    search.seed = split_seed(seed, "coevolve-nsga", round);

    const SearchResult searched = search_mechanisms(search, ctx);
    const std::size_t knee = knee_point(searched.front);
    const Individual& deployed = searched.front[knee];
    const mechanism::MechanismParams knee_params = ctx.decode_genome(deployed.genome);

    // Retrain the scammer against the deployed mechanism.
    runner::Script hardened = scenario;
    hardened.mechanism = knee_params;
    runner::TrainConfig retrain = config.retrain;
    retrain.episodes = config.retrain_episodes;
    const runner::TrainResult retrained = runner::train_policy(
        hardened, scammer, retrain, split_seed(seed, "coevolve-retrain", round),
        &frozen);

    EvalContext retrained_ctx = ctx;
    retrained_ctx.scammer_policy = retrained.policy;
    const std::vector<double> vs_retrained =
        evaluate_mechanism(knee_params, retrained_ctx);

    RoundRecord record;
    record.round = round;
    record.f1_frozen = deployed.objectives[0];
    record.f1_retrained = vs_retrained[0];
    record.f2 = deployed.objectives[1];
    record.knee_genome = deployed.genome;
    result.history.push_back(std::move(record));

    frozen = retrained.policy;
    if (round + 1 == config.rounds) {
      result.final_front = searched.front;
      result.final_eval_seeds = eval_seeds;
    }
  }

  result.final_policy = frozen;
  return result;
}

}  // namespace wes::optimize
