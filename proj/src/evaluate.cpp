#include "wes/evaluate.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "wes/parallel.hpp"

namespace wes::optimize {

using runner::EpisodeResult;
using runner::PolicySlot;
using runner::PolicySlots;

namespace {

double seed_f1(const EpisodeResult& result, runner::UserId scammer) {
  auto it = result.rewards.find(scammer);
  const double reward = it == result.rewards.end() ? 0.0 : it->second;
  return std::max(0.0, reward);
}

double seed_utility_loss(const EpisodeResult& result) {
  if (result.utilities.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (const auto& [_, utility] : result.utilities) {
    sum += utility;
  }
  const double mean = sum / static_cast<double>(result.utilities.size());
  return std::clamp(1.0 - mean, 0.0, 1.0);
}

}  // namespace

std::vector<double> evaluate_mechanism(const mechanism::MechanismParams& params,
                                       const EvalContext& ctx) {
  if (ctx.seeds.empty()) {
    throw std::invalid_argument("evaluate_mechanism: at least one seed required");
  }
  const bool metric_mode = ctx.f2_metric != "utility_loss";
  if (metric_mode && ctx.f2_identity_baseline.size() != ctx.seeds.size()) {
    throw std::invalid_argument(
        "evaluate_mechanism: metric mode needs one identity baseline per seed");
  }

  runner::Script script = ctx.scenario;
  script.mechanism = params;
  script.keep_artifacts = false;

  PolicySlots slots;
  PolicySlot slot;
  slot.initial = &ctx.scammer_policy;
  slot.epsilon = 0.0;
  slot.train = false;
  slots[ctx.scammer] = slot;

  std::vector<EpisodeResult> results(ctx.seeds.size());
  parallel::for_each_index(ctx.seeds.size(), ctx.workers, [&](std::size_t i) {
    results[i] = runner::run_script(script, ctx.seeds[i], slots);
  });

  double f1 = 0.0;
  double f2 = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    f1 += seed_f1(results[i], ctx.scammer);
    if (metric_mode) {
      const double baseline = ctx.f2_identity_baseline[i];
      const double value = results[i].metric_finals.at(ctx.f2_metric);
      f2 += baseline > 0.0 ? std::clamp(1.0 - value / baseline, 0.0, 1.0) : 0.0;
    } else {
      f2 += seed_utility_loss(results[i]);
    }
  }
  const double n = static_cast<double>(results.size());
  return {f1 / n, f2 / n};
}

std::vector<double> evaluate_genome(const Genome& genome, const EvalContext& ctx) {
  if (!mechanism::within_bounds(genome, ctx.effective_bounds())) {
    throw mechanism::OutOfBounds("evaluate_genome: genome outside bounds");
  }
  return evaluate_mechanism(ctx.decode_genome(genome), ctx);
}

SearchResult search_mechanisms(const SearchConfig& config, const EvalContext& ctx) {
  std::map<Genome, std::vector<double>> cache;
  FitnessFn fitness = [&](const Genome& genome) {
    auto it = cache.find(genome);
    if (it != cache.end()) {
      return it->second;
    }
    const std::vector<double> objectives = evaluate_genome(genome, ctx);
    cache.emplace(genome, objectives);
    return objectives;
  };

  Rng rng(split_seed(config.seed, "nsga2"));
  std::vector<Individual> population =
      init_population(config.nsga, ctx.effective_bounds(), fitness, rng);
  for (std::uint32_t gen = 0; gen < config.generations; ++gen) {
    nsga2_step(population, ctx.effective_bounds(), config.nsga, fitness, rng);
  }

  SearchResult result;
  result.front = pareto_front(population);
  result.population = std::move(population);
  result.evaluations = cache.size();
  return result;
}

}  // namespace wes::optimize
