#pragma once

// Integer-encoded genetic algorithm over RB -> UE assignments.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "ofdma/error.hpp"
#include "ofdma/fitness.hpp"
#include "ofdma/rng.hpp"

namespace ofdma {

struct GaConfig {
  std::size_t population_size = 100;
  std::size_t max_generations = 200;
  double crossover_rate = 0.9;
  std::optional<double> mutation_rate;  // per gene; unset means 1/N
  std::size_t tournament_size = 2;
  std::size_t elite_count = 2;
  std::size_t stall_limit = 30;
  std::uint64_t seed = 1;

  void validate() const {
    if (population_size < 2) throw InvalidInput("GA population size must be >= 2");
    if (max_generations < 1) throw InvalidInput("GA generation limit must be >= 1");
    if (crossover_rate < 0.0 || crossover_rate > 1.0)
      throw InvalidInput("crossover rate must lie in [0, 1]");
    if (mutation_rate && (*mutation_rate < 0.0 || *mutation_rate > 1.0))
      throw InvalidInput("mutation rate must lie in [0, 1]");
    if (tournament_size < 1) throw InvalidInput("tournament size must be >= 1");
    if (elite_count >= population_size) throw InvalidInput("elite count must be < population size");
  }

  double mutation_rate_for(std::size_t rbs) const {
    return mutation_rate ? *mutation_rate : 1.0 / static_cast<double>(rbs);
  }
};

struct GaResult {
  AllocationPattern best_pattern;
  FitnessBreakdown best_fitness;
  std::size_t generations_used = 0;
  // Entry 0 is the initial population; entry g the best after generation g.
  std::vector<double> fitness_trace;
};

using Population = std::vector<AllocationPattern>;

inline AllocationPattern random_pattern(std::size_t ues, std::size_t rbs, Rng& rng) {
  AllocationPattern p;
  p.genes.resize(rbs);
  for (auto& g : p.genes) g = static_cast<UeIndex>(rng.uniform_index(ues));
  return p;
}

/// Per-gene uniform resample over [0, ues) with probability `rate`.
inline AllocationPattern mutate(AllocationPattern pattern, double rate, std::size_t ues, Rng& rng) {
  for (auto& g : pattern.genes)
    if (rng.bernoulli(rate)) g = static_cast<UeIndex>(rng.uniform_index(ues));
  return pattern;
}

inline constexpr double kSeedLineageResample = 0.1;

/// Seeds verbatim, then mutated copies of them up to ceil(L/2) members,
/// then uniform-random patterns up to L.
inline Population init_population(std::size_t size, std::size_t ues, std::size_t rbs, Rng& rng,
                                  const std::vector<AllocationPattern>& seeds = {}) {
  if (size < 2) throw InvalidInput("population size must be >= 2");
  for (const auto& s : seeds)
    if (!is_valid(s, ues, rbs))
      throw InvalidInput("seed pattern does not match the scenario dimensions");

  Population pop;
  pop.reserve(size);
  if (!seeds.empty()) {
    const std::size_t lineage = std::max<std::size_t>((size + 1) / 2, std::min(seeds.size(), size));
    for (std::size_t i = 0; i < seeds.size() && pop.size() < size; ++i) pop.push_back(seeds[i]);
    for (std::size_t i = 0; pop.size() < lineage; ++i)
      pop.push_back(mutate(seeds[i % seeds.size()], kSeedLineageResample, ues, rng));
  }
  while (pop.size() < size) pop.push_back(random_pattern(ues, rbs, rng));
  return pop;
}

inline Population init_population(std::size_t size, std::size_t ues, std::size_t rbs,
                                  std::uint64_t seed,
                                  const std::vector<AllocationPattern>& seeds = {}) {
  Rng rng(seed);
  return init_population(size, ues, rbs, rng, seeds);
}

/// Best of k uniform draws (with replacement); ties go to the lower index.
inline std::size_t tournament_select(const std::vector<double>& fitness, std::size_t k, Rng& rng) {
  std::size_t best = rng.uniform_index(fitness.size());
  for (std::size_t i = 1; i < k; ++i) {
    const std::size_t c = rng.uniform_index(fitness.size());
    if (fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best)) best = c;
  }
  return best;
}

/// Uniform crossover applied with probability `rate`.
inline std::pair<AllocationPattern, AllocationPattern> crossover(const AllocationPattern& a,
                                                                 const AllocationPattern& b,
                                                                 double rate, Rng& rng) {
  if (a.size() != b.size()) throw InvalidInput("crossover parents differ in length");
  std::pair<AllocationPattern, AllocationPattern> kids{a, b};
  if (!rng.bernoulli(rate)) return kids;
  for (std::size_t n = 0; n < a.size(); ++n)
    if ((rng.next_u64() >> 63) != 0) std::swap(kids.first.genes[n], kids.second.genes[n]);
  return kids;
}

namespace detail {

// Indices of the `count` fittest members, best first, ties by index.
inline std::vector<std::size_t> top_indices(const std::vector<double>& fitness, std::size_t count) {
  std::vector<std::size_t> idx(fitness.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  count = std::min(count, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(),
                    [&](std::size_t l, std::size_t r) {
                      return fitness[l] > fitness[r] || (fitness[l] == fitness[r] && l < r);
                    });
  idx.resize(count);
  return idx;
}

}  // namespace detail

/// Generational GA with elitism and a stall-based early stop. The result
/// carries the best pattern ever evaluated.
inline GaResult evolve(const GaConfig& config, const FitnessContext& context,
                       const std::vector<AllocationPattern>& initial_seeds = {}) {
  config.validate();
  const std::size_t ues = context.ues();
  const std::size_t rbs = context.rbs();
  const double mutation_rate = config.mutation_rate_for(rbs);
  Rng rng(config.seed);

  Population pop = init_population(config.population_size, ues, rbs, rng, initial_seeds);
  std::vector<double> fitness(pop.size());
  auto evaluate_all = [&] {
    // Evaluations are independent; consumption below is in index order.
    for (std::size_t i = 0; i < pop.size(); ++i) fitness[i] = context.combined(pop[i]);
  };
  evaluate_all();

  GaResult result;
  std::size_t best = detail::top_indices(fitness, 1).front();
  result.best_pattern = pop[best];
  double best_fitness = fitness[best];
  result.fitness_trace.push_back(best_fitness);

  std::size_t stall = 0;
  Population next;
  next.reserve(pop.size());
  for (std::size_t gen = 1; gen <= config.max_generations; ++gen) {
    next.clear();
    for (std::size_t e : detail::top_indices(fitness, config.elite_count)) next.push_back(pop[e]);
    while (next.size() < pop.size()) {
      const auto& pa = pop[tournament_select(fitness, config.tournament_size, rng)];
      const auto& pb = pop[tournament_select(fitness, config.tournament_size, rng)];
      auto [ca, cb] = crossover(pa, pb, config.crossover_rate, rng);
      next.push_back(mutate(std::move(ca), mutation_rate, ues, rng));
      if (next.size() < pop.size()) next.push_back(mutate(std::move(cb), mutation_rate, ues, rng));
    }
    std::swap(pop, next);
    evaluate_all();

    best = detail::top_indices(fitness, 1).front();
    if (fitness[best] > best_fitness) {
      best_fitness = fitness[best];
      result.best_pattern = pop[best];
      stall = 0;
    } else {
      ++stall;
    }
    result.fitness_trace.push_back(best_fitness);
    result.generations_used = gen;
    if (stall >= config.stall_limit) break;
  }

  result.best_fitness = context.evaluate(result.best_pattern);
  return result;
}

/// First trace index whose value reaches `threshold`; trace.size() if never.
inline std::size_t generations_to_reach(const std::vector<double>& trace, double threshold) {
  for (std::size_t g = 0; g < trace.size(); ++g)
    if (trace[g] >= threshold) return g;
  return trace.size();
}

}  // namespace ofdma
