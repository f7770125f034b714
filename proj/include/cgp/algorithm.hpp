#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "cgp/config.hpp"
#include "cgp/decoder.hpp"
#include "cgp/genome.hpp"
#include "cgp/variation.hpp"

namespace cgp {

// Fitness is minimized.
template <class Gene, class Fitness = double>
struct Individual {
  Genotype<Gene> genotype;
  Fitness fitness{};
  bool evaluated = false;
  bool operator==(const Individual&) const = default;
};

// (1+lambda): index 0 is the parent. (mu+lambda): the first mu are the parents.
// The remaining slots hold the most recently bred offspring.
template <class Gene, class Fitness = double>
struct Population {
  std::vector<Individual<Gene, Fitness>> individuals;
  std::uint64_t generation = 0;
  std::uint64_t evaluations = 0;
  bool operator==(const Population&) const = default;
};

template <class Fitness>
bool neutral(Fitness candidate, Fitness parent, double epsilon) {
  if (epsilon == 0.0) return candidate == parent;
  const double scale = std::max(1.0, std::abs(static_cast<double>(parent)));
  return std::abs(static_cast<double>(candidate) - static_cast<double>(parent)) <= epsilon * scale;
}

// Selection with neutral genetic drift. Returns the index of the chosen
// offspring, or nullopt when the parent is retained:
//   any offspring strictly better -> one of them uniformly at random
//   (BetterChoice::best: uniformly among the best of them);
//   else any offspring neutral to the parent -> one of them uniformly at random;
//   else the parent.
template <class Fitness, class URBG>
std::optional<std::size_t> ngd_select(Fitness parent, std::span<const Fitness> offspring,
                                      double epsilon, URBG& rng,
                                      BetterChoice choice = BetterChoice::uniform) {
  if (offspring.empty()) throw ContractError("ngd_select needs at least one offspring");
  std::vector<std::size_t> better;
  std::vector<std::size_t> equal;
  for (std::size_t i = 0; i < offspring.size(); ++i) {
    if (offspring[i] < parent) {
      better.push_back(i);
    } else if (neutral(offspring[i], parent, epsilon)) {
      equal.push_back(i);
    }
  }
  if (!better.empty()) {
    if (choice == BetterChoice::best) {
      Fitness top = offspring[better.front()];
      for (auto i : better) top = std::min(top, offspring[i]);
      std::erase_if(better, [&](std::size_t i) { return offspring[i] != top; });
    }
    return better[uniform_index(rng, better.size())];
  }
  if (!equal.empty()) return equal[uniform_index(rng, equal.size())];
  return std::nullopt;
}

template <class Gene, class Fitness, class URBG>
std::optional<std::size_t> ngd_select(const Individual<Gene, Fitness>& parent,
                                      std::span<const Individual<Gene, Fitness>> offspring,
                                      double epsilon, URBG& rng,
                                      BetterChoice choice = BetterChoice::uniform) {
  std::vector<Fitness> values;
  values.reserve(offspring.size());
  for (const auto& o : offspring) {
    if (!o.evaluated) throw ContractError("ngd_select on an unevaluated offspring");
    values.push_back(o.fitness);
  }
  if (!parent.evaluated) throw ContractError("ngd_select on an unevaluated parent");
  return ngd_select<Fitness>(parent.fitness, values, epsilon, rng, choice);
}

// Everything a generation step needs besides the population and the rng.
struct Breeding {
  const Layout& layout;
  const MutationPipeline& pipeline;
  CrossoverKind crossover = CrossoverKind::discrete;
  double crossover_rate = 0.0;
  std::size_t block_size = 1;
  double epsilon = 0.0;
  BetterChoice better = BetterChoice::uniform;
};

// One generation of the (1+lambda)-EA: lambda mutants of the parent are
// evaluated and the next parent is picked by ngd_select.
template <class Gene, class Fitness, class Evaluate, class URBG>
void step_one_plus_lambda(Population<Gene, Fitness>& pop, std::size_t lambda,
                          const Breeding& breeding, Evaluate&& evaluate, URBG& rng) {
  if (lambda < 1) throw ContractError("lambda must be >= 1");
  auto& ind = pop.individuals;
  if (ind.empty() || !ind[0].evaluated) throw ContractError("parent must be evaluated");
  ind.resize(1 + lambda);
  for (std::size_t i = 1; i <= lambda; ++i) {
    ind[i].genotype = apply_pipeline(ind[0].genotype, breeding.layout, breeding.pipeline, rng);
    ind[i].evaluated = false;
  }
  std::span<Individual<Gene, Fitness>> offspring(ind.data() + 1, lambda);
  evaluate(offspring);
  pop.evaluations += lambda;
  const auto chosen = ngd_select<Gene, Fitness>(
      ind[0], std::span<const Individual<Gene, Fitness>>(offspring), breeding.epsilon, rng,
      breeding.better);
  if (chosen) ind[0] = offspring[*chosen];
  ++pop.generation;
}

// One generation of the (mu+lambda)-EA: uniform parent choice, optional
// crossover, mutation, then truncation to the mu best of parents and offspring
// (ties prefer offspring, then the lower index).
template <class Gene, class Fitness, class Evaluate, class URBG>
void step_mu_plus_lambda(Population<Gene, Fitness>& pop, std::size_t mu, std::size_t lambda,
                         const Breeding& breeding, Evaluate&& evaluate, URBG& rng) {
  if (mu < 1 || lambda < 1) throw ContractError("mu and lambda must be >= 1");
  auto& ind = pop.individuals;
  if (ind.size() < mu) throw ContractError("population smaller than mu");
  for (std::size_t i = 0; i < mu; ++i) {
    if (!ind[i].evaluated) throw ContractError("parents must be evaluated");
  }

  std::vector<Individual<Gene, Fitness>> offspring(lambda);
  for (auto& child : offspring) {
    const auto& a = ind[uniform_index(rng, mu)].genotype;
    const auto& b = ind[uniform_index(rng, mu)].genotype;
    Genotype<Gene> g;
    if (coin(rng, breeding.crossover_rate)) {
      g = breeding.crossover == CrossoverKind::discrete
              ? discrete_crossover(a, b, breeding.layout, rng)
              : block_crossover(a, b, breeding.layout, breeding.block_size, rng).first;
    } else {
      g = a;
    }
    child.genotype = apply_pipeline(std::move(g), breeding.layout, breeding.pipeline, rng);
  }
  evaluate(std::span<Individual<Gene, Fitness>>(offspring));
  pop.evaluations += lambda;

  // Offspring first so that a stable sort prefers them on ties.
  std::vector<const Individual<Gene, Fitness>*> pool;
  for (const auto& o : offspring) pool.push_back(&o);
  for (std::size_t i = 0; i < mu; ++i) pool.push_back(&ind[i]);
  std::stable_sort(pool.begin(), pool.end(),
                   [](const auto* x, const auto* y) { return x->fitness < y->fitness; });

  std::vector<Individual<Gene, Fitness>> next;
  next.reserve(mu + lambda);
  for (std::size_t i = 0; i < mu; ++i) next.push_back(*pool[i]);
  for (auto& o : offspring) next.push_back(std::move(o));
  ind = std::move(next);
  ++pop.generation;
}

// Zero budgets are unbounded; at least one should be set.
struct Termination {
  double ideal_fitness = 0.0;
  std::uint64_t max_generations = 0;
  std::uint64_t max_evaluations = 0;
};

struct HistoryEntry {
  std::uint64_t generation = 0;
  double best_fitness = 0.0;
  std::size_t active_nodes = 0;
  bool operator==(const HistoryEntry&) const = default;
};

template <class Gene, class Fitness = double>
struct RunResult {
  Individual<Gene, Fitness> best;
  std::uint64_t generations = 0;
  std::uint64_t evaluations = 0;
  std::vector<HistoryEntry> history;
  bool solved = false;
};

template <class Gene, class Fitness>
bool update_best(Individual<Gene, Fitness>& best, const Population<Gene, Fitness>& pop) {
  bool changed = false;
  for (const auto& i : pop.individuals) {
    if (i.evaluated && (!best.evaluated || i.fitness < best.fitness)) {
      best = i;
      changed = true;
    }
  }
  return changed;
}

template <class Gene, class Fitness>
bool terminated(const Population<Gene, Fitness>& pop, const Individual<Gene, Fitness>& best,
                const Termination& t) {
  if (best.evaluated && static_cast<double>(best.fitness) <= t.ideal_fitness) return true;
  if (t.max_generations > 0 && pop.generation >= t.max_generations) return true;
  if (t.max_evaluations > 0 && pop.evaluations >= t.max_evaluations) return true;
  return false;
}

// Steps until the best-ever individual reaches the ideal fitness or a budget
// is spent. `best` carries the best-ever individual in and out (so a resumed
// run continues from the stored one). `observe(pop, best, entry)` runs after
// every step.
template <class Gene, class Fitness, class StepFn, class Observer>
RunResult<Gene, Fitness> run(Population<Gene, Fitness>& pop, Individual<Gene, Fitness>& best,
                             const Layout& layout, const Termination& termination, StepFn&& step,
                             Observer&& observe) {
  update_best(best, pop);
  RunResult<Gene, Fitness> result;
  while (!terminated(pop, best, termination)) {
    step(pop);
    update_best(best, pop);
    HistoryEntry entry{pop.generation, static_cast<double>(best.fitness),
                       active_nodes(best.genotype, layout).size()};
    result.history.push_back(entry);
    observe(pop, best, entry);
  }
  result.best = best;
  result.generations = pop.generation;
  result.evaluations = pop.evaluations;
  result.solved = best.evaluated && static_cast<double>(best.fitness) <= termination.ideal_fitness;
  return result;
}

template <class Gene, class Fitness, class StepFn>
RunResult<Gene, Fitness> run(Population<Gene, Fitness>& pop, Individual<Gene, Fitness>& best,
                             const Layout& layout, const Termination& termination, StepFn&& step) {
  return run(pop, best, layout, termination, std::forward<StepFn>(step),
             [](const auto&, const auto&, const auto&) {});
}

}  // namespace cgp
