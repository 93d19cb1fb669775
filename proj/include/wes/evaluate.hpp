#pragma once
// Episode-based fitness for mechanism search. f1 = mean scammer success,
// f2 = mean normal-user utility loss; both minimized, evaluated over a fixed
// common seed set so dominance comparisons are meaningful.

#include "wes/nsga2.hpp"
#include "wes/runner.hpp"

namespace wes::optimize {

struct EvalContext {
  runner::Script scenario;
  runner::UserId scammer = 0;          // the RL bad-actor bot
  agents::QTable scammer_policy;       // frozen snapshot, evaluated greedily
  std::vector<std::uint64_t> seeds;    // common random numbers
  int workers = 1;

  // f2 source: "utility_loss" (default) or a built-in metric id measured as
  // relative drop against per-seed identity baselines.
  std::string f2_metric = "utility_loss";
  std::vector<double> f2_identity_baseline;  // per seed, metric mode only

  // Genome search space; empty bounds mean the standard mechanism genome.
  std::vector<GeneBound> bounds;
  std::function<mechanism::MechanismParams(const Genome&)> decoder;

  const std::vector<GeneBound>& effective_bounds() const {
    return bounds.empty() ? mechanism::standard_bounds() : bounds;
  }
  mechanism::MechanismParams decode_genome(const Genome& genome) const {
    return decoder ? decoder(genome) : mechanism::decode(genome);
  }
};

// Runs one episode per seed with the mechanism installed globally. Per seed,
// scammer success is the episode reward clipped at zero and utility loss is
// 1 - mean normal-bot utility; the returned vector is the per-seed mean.
std::vector<double> evaluate_mechanism(const mechanism::MechanismParams& params,
                                       const EvalContext& ctx);

std::vector<double> evaluate_genome(const Genome& genome, const EvalContext& ctx);

struct SearchConfig {
  std::uint32_t generations = 20;
  Nsga2Config nsga;
  std::uint64_t seed = 0;
};

struct SearchResult {
  std::vector<Individual> population;
  std::vector<Individual> front;
  std::size_t evaluations = 0;  // distinct genomes evaluated
};

// NSGA-II driver with genome-level memoization (fitness is deterministic for
// fixed seeds, so repeated genomes are served from cache).
SearchResult search_mechanisms(const SearchConfig& config, const EvalContext& ctx);

}  // namespace wes::optimize
