#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "monas/genotype.hpp"
#include "monas/individual.hpp"

namespace monas {

struct VariationConfig {
  double crossover_prob = 1.0;  // per-block swap probability
  double mutation_prob = 0.025; // per-slot mutation probability
  double rmp = 1.0;             // random mating probability across tasks
};

// Block-based crossover: each of the 10 blocks is swapped atomically (all 4
// slots) between the offspring with probability pc, independently per block.
template <class URBG>
std::pair<Genotype, Genotype> block_crossover(const Genotype& p1,
                                              const Genotype& p2, double pc,
                                              URBG& rng) {
  std::pair<Genotype, Genotype> out{p1, p2};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int b = 0; b < kCells * kBlocksPerCell; ++b) {
    if (unit(rng) < pc) {
      for (int k = 0; k < kSlotsPerBlock; ++k) {
        std::swap(out.first[b * kSlotsPerBlock + k],
                  out.second[b * kSlotsPerBlock + k]);
      }
    }
  }
  return out;
}

// Bit-based mutation: each slot mutates with probability pm; a mutated slot
// is redrawn uniformly from its legal range excluding the current value, so
// pm=1 guarantees a change wherever the range allows one.
template <class URBG>
Genotype bit_mutation(const Genotype& g, double pm, URBG& rng) {
  Genotype out = g;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < kGenotypeSlots; ++i) {
    if (unit(rng) >= pm) continue;
    const int hi = slot_max_value(i);
    if (hi == 0) continue;  // single legal value
    int v = std::uniform_int_distribution<int>(0, hi - 1)(rng);
    if (v >= out[i]) ++v;
    out[i] = v;
  }
  return out;
}

// Uniformly shuffles the population and pairs adjacent individuals. Returns
// index pairs into the input; every individual appears in exactly one pair.
template <class URBG>
std::vector<std::pair<std::size_t, std::size_t>> mate_selection(
    const std::vector<Individual>& population, URBG& rng) {
  if (population.size() < 2 || population.size() % 2 != 0) {
    throw std::invalid_argument("mate_selection requires an even population of >= 2, got " +
                                std::to_string(population.size()));
  }
  std::vector<std::size_t> perm(population.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(population.size() / 2);
  for (std::size_t i = 0; i + 1 < perm.size(); i += 2) {
    pairs.emplace_back(perm[i], perm[i + 1]);
  }
  return pairs;
}

// Offspring generation with RMP-gated cross-task transfer:
//  1. same task: crossover + mutation, children keep the task;
//  2. different tasks, with probability rmp: crossover + mutation, each
//     child's task drawn uniformly from the two parents' tasks;
//  3. different tasks, otherwise: mutation only, each child inherits its
//     own parent's task.
template <class URBG>
std::pair<Individual, Individual> generate_offspring(const Individual& p1,
                                                     const Individual& p2,
                                                     const VariationConfig& cfg,
                                                     URBG& rng) {
  std::pair<Individual, Individual> children;
  children.first.task = p1.task;
  children.second.task = p2.task;

  bool crossed = p1.task == p2.task;
  if (!crossed) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    crossed = unit(rng) < cfg.rmp;
  }

  if (crossed) {
    auto [g1, g2] = block_crossover(p1.genotype, p2.genotype, cfg.crossover_prob, rng);
    children.first.genotype = bit_mutation(g1, cfg.mutation_prob, rng);
    children.second.genotype = bit_mutation(g2, cfg.mutation_prob, rng);
    if (p1.task != p2.task) {
      std::uniform_int_distribution<int> coin(0, 1);
      children.first.task = coin(rng) == 0 ? p1.task : p2.task;
      children.second.task = coin(rng) == 0 ? p1.task : p2.task;
    }
  } else {
    children.first.genotype = bit_mutation(p1.genotype, cfg.mutation_prob, rng);
    children.second.genotype = bit_mutation(p2.genotype, cfg.mutation_prob, rng);
  }
  return children;
}

}  // namespace monas
