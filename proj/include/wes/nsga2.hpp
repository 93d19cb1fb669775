#pragma once
// NSGA-II over bounded genomes: fast non-dominated sorting, crowding
// distance, binary tournament on (rank, crowding), uniform crossover,
// per-gene uniform-redraw mutation, mu+lambda environmental selection.
// Objectives are minimized.

#include <functional>
#include <span>
#include <vector>

#include "wes/mechanism.hpp"
#include "wes/rng.hpp"

namespace wes::optimize {

using mechanism::GeneBound;
using mechanism::Genome;

struct Individual {
  Genome genome;
  std::vector<double> objectives;
  int rank = 0;
  double crowding = 0.0;
};

// a dominates b: <= in all objectives, < in at least one.
bool dominates(std::span<const double> a, std::span<const double> b);

// Front index per individual; rank 0 is non-dominated.
std::vector<int> non_dominated_sort(const std::vector<std::vector<double>>& objectives);

// Crowding distances for one front. Boundary points per objective get
// infinity; interior points sum normalized neighbor gaps over objectives.
std::vector<double> crowding_distance(const std::vector<std::vector<double>>& front);

using FitnessFn = std::function<std::vector<double>(const Genome&)>;

struct Nsga2Config {
  std::size_t population = 16;
  bool crossover = true;
  double crossover_swap_prob = 0.5;
  // Per-gene mutation probability; negative means 1/genome_length.
  double mutation_rate = -1.0;
};

Genome random_genome(const std::vector<GeneBound>& bounds, Rng& rng);

// Seeded initial population (random genomes, evaluated).
std::vector<Individual> init_population(const Nsga2Config& config,
                                        const std::vector<GeneBound>& bounds,
                                        const FitnessFn& fitness, Rng& rng);

// One generation: tournament selection, variation, evaluation, mu+lambda
// truncation back to the configured population size. Updates ranks and
// crowding on the survivors.
void nsga2_step(std::vector<Individual>& population,
                const std::vector<GeneBound>& bounds, const Nsga2Config& config,
                const FitnessFn& fitness, Rng& rng);

// Rank-0 members with duplicate genomes removed.
std::vector<Individual> pareto_front(const std::vector<Individual>& population);

// Index of the front member minimizing the sum of per-objective normalized
// values (the knee point).
std::size_t knee_point(const std::vector<Individual>& front);

}  // namespace wes::optimize
