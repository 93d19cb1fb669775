#include "wes/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace wes::optimize {

bool dominates(std::span<const double> a, std::span<const double> b) {
  bool strictly_better = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) {
      return false;
    }
    if (a[i] < b[i]) {
      strictly_better = true;
    }
  }
  return strictly_better;
}

std::vector<int> non_dominated_sort(const std::vector<std::vector<double>>& objectives) {
  const std::size_t n = objectives.size();
  std::vector<int> rank(n, -1);
  std::vector<int> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> dominated(n);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(objectives[i], objectives[j])) {
        dominated[i].push_back(j);
        domination_count[j] += 1;
      } else if (dominates(objectives[j], objectives[i])) {
        dominated[j].push_back(i);
        domination_count[i] += 1;
      }
    }
  }

  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i) {
    if (domination_count[i] == 0) {
      rank[i] = 0;
      current.push_back(i);
    }
  }
  int front = 0;
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : current) {
      for (std::size_t j : dominated[i]) {
        if (--domination_count[j] == 0) {
          rank[j] = front + 1;
          next.push_back(j);
        }
      }
    }
    front += 1;
    current = std::move(next);
  }
  return rank;
}

std::vector<double> crowding_distance(const std::vector<std::vector<double>>& front) {
  const std::size_t n = front.size();
  std::vector<double> distance(n, 0.0);
  if (n == 0) {
    return distance;
  }
  const std::size_t m = front.front().size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (n <= 2) {
    std::fill(distance.begin(), distance.end(), inf);
    return distance;
  }
  std::vector<std::size_t> order(n);
  for (std::size_t obj = 0; obj < m; ++obj) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return front[a][obj] < front[b][obj];
    });
    distance[order.front()] = inf;
    distance[order.back()] = inf;
    const double span = front[order.back()][obj] - front[order.front()][obj];
    if (span <= 0.0) {
      continue;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (distance[order[k]] == inf) {
        continue;
      }
      distance[order[k]] +=
          (front[order[k + 1]][obj] - front[order[k - 1]][obj]) / span;
    }
  }
  return distance;
}

Genome random_genome(const std::vector<GeneBound>& bounds, Rng& rng) {
  Genome genome;
  genome.reserve(bounds.size());
  for (const GeneBound& bound : bounds) {
    if (bound.integer) {
      const auto span = static_cast<std::uint64_t>(bound.hi - bound.lo) + 1;
      genome.push_back(bound.lo + static_cast<double>(rng.uniform_index(span)));
    } else {
      genome.push_back(rng.uniform_real(bound.lo, bound.hi));
    }
  }
  return genome;
}

namespace {

void assign_ranks_and_crowding(std::vector<Individual>& population) {
  std::vector<std::vector<double>> objectives;
  objectives.reserve(population.size());
  for (const Individual& ind : population) {
    objectives.push_back(ind.objectives);
  }
  const std::vector<int> ranks = non_dominated_sort(objectives);
  int max_rank = 0;
  for (std::size_t i = 0; i < population.size(); ++i) {
    population[i].rank = ranks[i];
    max_rank = std::max(max_rank, ranks[i]);
  }
  for (int r = 0; r <= max_rank; ++r) {
    std::vector<std::size_t> members;
    std::vector<std::vector<double>> front;
    for (std::size_t i = 0; i < population.size(); ++i) {
      if (population[i].rank == r) {
        members.push_back(i);
        front.push_back(population[i].objectives);
      }
    }
    const std::vector<double> dist = crowding_distance(front);
    for (std::size_t k = 0; k < members.size(); ++k) {
      population[members[k]].crowding = dist[k];
    }
  }
}

// Lower rank wins; equal rank prefers larger crowding.
bool tournament_better(const Individual& a, const Individual& b) {
  if (a.rank != b.rank) {
    return a.rank < b.rank;
  }
  return a.crowding > b.crowding;
}

void mutate(Genome& genome, const std::vector<GeneBound>& bounds, double rate,
            Rng& rng) {
  for (std::size_t g = 0; g < genome.size(); ++g) {
    if (rng.uniform_real() < rate) {
      const GeneBound& bound = bounds[g];
      if (bound.integer) {
        const auto span = static_cast<std::uint64_t>(bound.hi - bound.lo) + 1;
        genome[g] = bound.lo + static_cast<double>(rng.uniform_index(span));
      } else {
        genome[g] = rng.uniform_real(bound.lo, bound.hi);
      }
    }
  }
}

}  // namespace

std::vector<Individual> init_population(const Nsga2Config& config,
                                        const std::vector<GeneBound>& bounds,
                                        const FitnessFn& fitness, Rng& rng) {
  if (config.population == 0 || config.population % 2 != 0) {
    throw std::invalid_argument("population size must be positive and even");
  }
  std::vector<Individual> population(config.population);
  for (Individual& ind : population) {
    ind.genome = random_genome(bounds, rng);
    ind.objectives = fitness(ind.genome);
  }
  assign_ranks_and_crowding(population);
  return population;
}

void nsga2_step(std::vector<Individual>& population,
                const std::vector<GeneBound>& bounds, const Nsga2Config& config,
                const FitnessFn& fitness, Rng& rng) {
  if (population.empty() || population.size() % 2 != 0) {
    throw std::invalid_argument("population size must be positive and even");
  }
  const std::size_t n = population.size();
  const double mutation_rate = config.mutation_rate >= 0.0
                                   ? config.mutation_rate
                                   : 1.0 / static_cast<double>(bounds.size());
  assign_ranks_and_crowding(population);

  auto pick_parent = [&]() -> const Individual& {
    const Individual& a = population[rng.uniform_index(n)];
    const Individual& b = population[rng.uniform_index(n)];
    return tournament_better(a, b) ? a : b;
  };

  std::vector<Individual> offspring;
  offspring.reserve(n);
  while (offspring.size() < n) {
    Genome child_a = pick_parent().genome;
    Genome child_b = pick_parent().genome;
    if (config.crossover) {
      for (std::size_t g = 0; g < child_a.size(); ++g) {
        if (rng.uniform_real() < config.crossover_swap_prob) {
          std::swap(child_a[g], child_b[g]);
        }
      }
    }
    mutate(child_a, bounds, mutation_rate, rng);
    mutate(child_b, bounds, mutation_rate, rng);
    Individual a;
    a.genome = std::move(child_a);
    a.objectives = fitness(a.genome);
    offspring.push_back(std::move(a));
    if (offspring.size() < n) {
      Individual b;
      b.genome = std::move(child_b);
      b.objectives = fitness(b.genome);
      offspring.push_back(std::move(b));
    }
  }

  // mu + lambda environmental selection.
  std::vector<Individual> combined = population;
  combined.insert(combined.end(), offspring.begin(), offspring.end());
  assign_ranks_and_crowding(combined);

  std::vector<std::size_t> order(combined.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return tournament_better(combined[a], combined[b]);
  });
  std::vector<Individual> survivors;
  survivors.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    survivors.push_back(combined[order[i]]);
  }
  assign_ranks_and_crowding(survivors);
  population = std::move(survivors);
}

std::vector<Individual> pareto_front(const std::vector<Individual>& population) {
  std::vector<std::vector<double>> objectives;
  objectives.reserve(population.size());
  for (const Individual& ind : population) {
    objectives.push_back(ind.objectives);
  }
  const std::vector<int> ranks = non_dominated_sort(objectives);
  std::vector<Individual> front;
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (ranks[i] != 0) {
      continue;
    }
    const bool duplicate =
        std::any_of(front.begin(), front.end(), [&](const Individual& f) {
          return f.genome == population[i].genome;
        });
    if (!duplicate) {
      front.push_back(population[i]);
    }
  }
  std::sort(front.begin(), front.end(), [](const Individual& a, const Individual& b) {
    return a.genome < b.genome;
  });
  return front;
}

std::size_t knee_point(const std::vector<Individual>& front) {
  if (front.empty()) {
    throw std::invalid_argument("knee_point: empty front");
  }
  const std::size_t m = front.front().objectives.size();
  std::vector<double> lo(m, std::numeric_limits<double>::infinity());
  std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
  for (const Individual& ind : front) {
    for (std::size_t k = 0; k < m; ++k) {
      lo[k] = std::min(lo[k], ind.objectives[k]);
      hi[k] = std::max(hi[k], ind.objectives[k]);
    }
  }
  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < front.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double span = hi[k] - lo[k];
      sum += span > 0.0 ? (front[i].objectives[k] - lo[k]) / span
                        : 0.0;
    }
    if (sum < best_sum) {
      best_sum = sum;
      best = i;
    }
  }
  return best;
}

}  // namespace wes::optimize
