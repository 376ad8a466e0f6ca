#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "monas/genotype.hpp"
#include "monas/individual.hpp"
#include "monas/rng.hpp"

namespace monas {

// Constants of the simulated supernet. Defaults are chosen so the
// small-model-trap precondition holds (small architectures validate better
// while shared training counters are low) and full runs finish in seconds.
struct SimulatorConfig {
  double untrained_error = 0.9;  // validation error at zero training
  double error_floor = 0.05;     // best reachable asymptotic error
  double quality_weight = 0.35;  // asymptotic penalty for ill-suited operators
  double capacity_weight = 0.10; // asymptotic penalty for small capacity
  double tau0 = 150.0;           // convergence scale of a zero-capacity model
  double size_slowdown = 3.0;    // tau(g) = tau0 * (1 + size_slowdown * capacity)
  double noise_scale = 0.005;    // centered uniform validation noise
  double eval_delay_ms = 0.0;    // artificial per-validation delay (timing studies)
  std::int64_t total_iterations = 0;  // per-generation budget; 0 = 10 * population_size
};

// One (cell, block, op slot, operator) training counter per key.
inline constexpr int kCounterTableSize =
    kCells * kBlocksPerCell * 2 * kOperatorCount;

inline constexpr int counter_index(CellKind cell, int block, int op_slot, int op) {
  return ((static_cast<int>(cell) * kBlocksPerCell + block) * 2 + op_slot) *
             kOperatorCount +
         op;
}

// One task's simulated weight-sharing supernet. Each task owns its counters
// and RNG stream exclusively; nothing here is shared across tasks.
struct TaskState {
  int task = 0;
  std::array<double, kOperatorCount> preference{};  // per-operator quality in [0,1]
  std::array<double, kCounterTableSize> counters{}; // accumulated training iterations
  double noise_scale = 0.005;
  std::mt19937_64 rng;
};

inline double preference_cosine(const std::array<double, kOperatorCount>& a,
                                const std::array<double, kOperatorCount>& b) {
  double dot = 0, na = 0, nb = 0;
  for (int i = 0; i < kOperatorCount; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / std::sqrt(na * nb);
}

namespace detail {

// Preference vectors are a blend lam*base + (1-lam)*contrast. The base is a
// shared quality profile over the operators; the contrast gives each task a
// private operator axis. All axes share one base value, so every pairwise
// cosine is identical and rises continuously from 0 at lam=0 to 1 at lam=1;
// lam is then solved by bisection to meet the similarity target.
struct PreferenceBlend {
  std::array<double, kOperatorCount> base{};
  std::vector<int> axis_ops;  // axis_ops[t] = private operator of task t
  static constexpr double kAxisBase = 0.3;
  static constexpr double kAxisBump = 0.9;

  std::array<double, kOperatorCount> vector_for(int task, double lam) const {
    std::array<double, kOperatorCount> v{};
    for (int i = 0; i < kOperatorCount; ++i) v[i] = lam * base[i];
    v[static_cast<std::size_t>(axis_ops[static_cast<std::size_t>(task)])] +=
        (1.0 - lam) * kAxisBump;
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    return v;
  }

  double pair_cosine(double lam) const {
    return preference_cosine(vector_for(0, lam), vector_for(1, lam));
  }
};

inline PreferenceBlend make_blend(int n_tasks, std::mt19937_64& rng) {
  // The shared profile keeps the separable conv at the top of the quality
  // ranking, the dilated conv second, pooling mid, identity low; task axes
  // are spilled onto the low-cost operators first so the error-size
  // trade-off never degenerates.
  static constexpr std::array<int, kOperatorCount> kAxisOrder = {
      static_cast<int>(Operator::kMaxPool3x3), static_cast<int>(Operator::kAvgPool3x3),
      static_cast<int>(Operator::kIdentity), static_cast<int>(Operator::kDilConv3x3),
      static_cast<int>(Operator::kSepConv3x3)};
  static constexpr std::array<double, kOperatorCount> kBaseValue = {0.9, 0.45, 0.45,
                                                                    0.45, 0.15};
  PreferenceBlend blend;
  blend.axis_ops.assign(kAxisOrder.begin(), kAxisOrder.begin() + n_tasks);
  std::shuffle(blend.axis_ops.begin(), blend.axis_ops.end(), rng);

  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  auto is_axis = [&](int op) {
    return std::find(blend.axis_ops.begin(), blend.axis_ops.end(), op) !=
           blend.axis_ops.end();
  };
  for (int op = 0; op < kOperatorCount; ++op) {
    if (!is_axis(op)) {
      blend.base[static_cast<std::size_t>(op)] =
          kBaseValue[static_cast<std::size_t>(op)] * (1.0 + jitter(rng));
    }
  }
  for (int t = 0; t < n_tasks; ++t) {
    blend.base[static_cast<std::size_t>(blend.axis_ops[static_cast<std::size_t>(t)])] =
        PreferenceBlend::kAxisBase;
  }
  return blend;
}

// High-similarity two-task divergence: both tasks keep the same operator
// ranking (the premise of transferring architectures between related tasks)
// and differ only in how sharply quality pays off, by boosting one task's
// leading conv and cutting the other's. Reaches cosines in roughly
// [0.88, 1], everything below falls back to the axis construction.
struct CalibrationPair {
  std::array<double, kOperatorCount> base{};
  bool swap_roles = false;
  static constexpr double kBoost = 0.9;
  static constexpr double kCut = 0.6;

  std::array<double, kOperatorCount> vector_for(int task, double lam) const {
    std::array<double, kOperatorCount> v{};
    for (int i = 0; i < kOperatorCount; ++i) v[i] = lam * base[i];
    const bool boosted = (task == 0) != swap_roles;
    const auto sep = static_cast<std::size_t>(Operator::kSepConv3x3);
    v[sep] += (1.0 - lam) * (boosted ? kBoost : -kCut);
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    return v;
  }

  double pair_cosine(double lam) const {
    return preference_cosine(vector_for(0, lam), vector_for(1, lam));
  }
};

inline CalibrationPair make_calibration_pair(std::mt19937_64& rng) {
  CalibrationPair pair;
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  static constexpr std::array<double, kOperatorCount> kBaseValue = {0.9, 0.45, 0.45,
                                                                    0.45, 0.15};
  for (int op = 0; op < kOperatorCount; ++op) {
    pair.base[static_cast<std::size_t>(op)] =
        kBaseValue[static_cast<std::size_t>(op)] * (1.0 + jitter(rng));
  }
  pair.swap_roles = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  return pair;
}

inline constexpr double kCalibrationSimilarityFloor = 0.88;

}  // namespace detail

// Builds n task preference vectors whose pairwise cosine similarity matches
// the target within 1e-9 (the construction keeps every pair at the same
// angle). Requires 1 <= n <= kOperatorCount and target in [0,1].
inline std::vector<std::array<double, kOperatorCount>> make_preferences(
    int n_tasks, double similarity, std::uint64_t seed) {
  if (n_tasks < 1 || n_tasks > kOperatorCount) {
    throw std::invalid_argument("make_preferences: task count must be in [1," +
                                std::to_string(kOperatorCount) + "], got " +
                                std::to_string(n_tasks));
  }
  if (similarity < 0.0 || similarity > 1.0) {
    throw std::invalid_argument("make_preferences: similarity target must be in [0,1]");
  }
  auto rng = make_engine(seed, Stream::kPreference);
  std::vector<std::array<double, kOperatorCount>> prefs;
  prefs.reserve(static_cast<std::size_t>(n_tasks));

  if (n_tasks == 2 && similarity >= detail::kCalibrationSimilarityFloor) {
    auto pair = detail::make_calibration_pair(rng);
    double lo = 0.5, hi = 1.0, lam = 1.0;
    for (int it = 0; it < 80; ++it) {
      lam = 0.5 * (lo + hi);
      (pair.pair_cosine(lam) < similarity ? lo : hi) = lam;
    }
    lam = 0.5 * (lo + hi);
    prefs.push_back(pair.vector_for(0, lam));
    prefs.push_back(pair.vector_for(1, lam));
    return prefs;
  }

  auto blend = detail::make_blend(n_tasks, rng);

  // A single task has no similarity constraint; a fixed high lam keeps the
  // shared profile (convolutions on top) dominant over the private axis.
  double lam = 0.8;
  if (n_tasks > 1) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
      lam = 0.5 * (lo + hi);
      (blend.pair_cosine(lam) < similarity ? lo : hi) = lam;
    }
    lam = 0.5 * (lo + hi);
  }

  for (int t = 0; t < n_tasks; ++t) prefs.push_back(blend.vector_for(t, lam));
  return prefs;
}

// Per-individual training iterations from the per-generation budget; the
// remainder is dropped.
inline std::int64_t split_budget(std::int64_t total_iterations,
                                 std::int64_t n_individuals) {
  if (n_individuals <= 0) {
    throw std::invalid_argument("split_budget: individual count must be positive");
  }
  if (total_iterations < 0) {
    throw std::invalid_argument("split_budget: negative iteration budget");
  }
  return total_iterations / n_individuals;
}

// Mean preference quality of the operators a genotype uses: q(g).
inline double mean_quality(const TaskState& state, const Genotype& g) {
  double sum = 0;
  int n = 0;
  for (int i = 0; i < kGenotypeSlots; ++i) {
    if (!slot_is_op(i)) continue;
    sum += state.preference[static_cast<std::size_t>(g[i])];
    ++n;
  }
  return sum / n;
}

// Capacity c(g): parameter count over the size model's fixed maximum.
inline double capacity(const Genotype& g, const SizeModel& m) {
  return static_cast<double>(count_params(g, m)) /
         static_cast<double>(max_params(m));
}

// Mean accumulated training count over the operator slots of g: p(g).
inline double mean_train_count(const TaskState& state, const Genotype& g) {
  double sum = 0;
  int n = 0;
  for (int i = 0; i < kGenotypeSlots; ++i) {
    if (!slot_is_op(i)) continue;
    const int op_slot = i % kSlotsPerBlock - 2;
    sum += state.counters[static_cast<std::size_t>(
        counter_index(slot_cell(i), slot_block(i), op_slot, g[i]))];
    ++n;
  }
  return sum / n;
}

// Asymptotic validation error e_final(g): well-suited, high-capacity
// architectures converge lower.
inline double asymptotic_error(const TaskState& state, const Genotype& g,
                               const SizeModel& m, const SimulatorConfig& sim) {
  return sim.error_floor + sim.quality_weight * (1.0 - mean_quality(state, g)) +
         sim.capacity_weight * (1.0 - capacity(g, m));
}

// Trains each genotype for train_n iterations: every (position, operator)
// key a genotype uses gains train_n counter increments, so overlapping
// architectures genuinely share training progress.
inline void train(TaskState& state, std::span<const Genotype> genotypes,
                  std::int64_t train_n) {
  if (train_n < 0) throw std::invalid_argument("train: negative iteration count");
  for (const Genotype& g : genotypes) {
    for (int i = 0; i < kGenotypeSlots; ++i) {
      if (!slot_is_op(i)) continue;
      const int op_slot = i % kSlotsPerBlock - 2;
      state.counters[static_cast<std::size_t>(counter_index(
          slot_cell(i), slot_block(i), op_slot, g[i]))] +=
          static_cast<double>(train_n);
    }
  }
}

// Simulated supernet validation:
//   error = clamp01( e_f + (e0 - e_f) * exp(-p/tau) + noise )
// with e_f the asymptotic error, p the mean shared training count and
// tau = tau0 * (1 + size_slowdown * capacity): larger models converge
// slower, which is the root of the small-model trap.
inline double validate(TaskState& state, const Genotype& g, const SizeModel& m,
                       const SimulatorConfig& sim) {
  if (sim.eval_delay_ms > 0) {
    std::this_thread::sleep_for(
        std::chrono::duration<double, std::milli>(sim.eval_delay_ms));
  }
  const double e_final = asymptotic_error(state, g, m, sim);
  const double tau = sim.tau0 * (1.0 + sim.size_slowdown * capacity(g, m));
  const double p = mean_train_count(state, g);
  // convex form of e_final + (e0 - e_final) * decay; exact at both limits
  const double decay = std::exp(-p / tau);
  double error = e_final * (1.0 - decay) + sim.untrained_error * decay;
  if (state.noise_scale > 0) {
    error += std::uniform_real_distribution<double>(-state.noise_scale,
                                                    state.noise_scale)(state.rng);
  }
  return std::clamp(error, 0.0, 1.0);
}

namespace detail {

inline void evaluate_task(TaskState& state, std::span<Individual*> members,
                          std::int64_t total_iterations, const SizeModel& m,
                          const SimulatorConfig& sim) {
  std::vector<Genotype> genotypes;
  genotypes.reserve(members.size());
  for (Individual* ind : members) {
    if (int bad = first_invalid_slot(ind->genotype); bad >= 0) {
      throw std::invalid_argument("genotype slot " + std::to_string(bad) +
                                  " out of range");
    }
    genotypes.push_back(ind->genotype);
  }
  const std::int64_t train_n =
      split_budget(total_iterations, static_cast<std::int64_t>(members.size()));
  train(state, genotypes, train_n);
  for (Individual* ind : members) {
    ObjectiveVector o;
    o.error = validate(state, ind->genotype, m, sim);
    o.params_raw = count_params(ind->genotype, m);
    o.macs_raw = count_macs(ind->genotype, m);
    ind->objectives = o;
  }
}

}  // namespace detail

// Evaluates one generation: the population is split by task, each task
// independently splits its budget, trains its own supernet on its members
// (in population order) and validates them. Tasks run on up to `workers`
// threads; since every task owns its state and RNG stream, results are
// bitwise identical for any worker count. A task failure is rethrown with
// its task id attached.
inline void evaluate_generation(std::vector<TaskState>& states,
                                std::span<Individual> population,
                                std::int64_t total_iterations,
                                const SizeModel& m, const SimulatorConfig& sim,
                                int workers = 0) {
  std::vector<std::vector<Individual*>> buckets(states.size());
  for (Individual& ind : population) {
    std::size_t s = 0;
    while (s < states.size() && states[s].task != ind.task) ++s;
    if (s == states.size()) {
      throw std::invalid_argument("evaluate_generation: no task state for task " +
                                  std::to_string(ind.task));
    }
    buckets[s].push_back(&ind);
  }

  const int n_tasks = static_cast<int>(states.size());
  if (workers <= 0) {
    workers = std::min<int>(n_tasks,
                            std::max(1u, std::thread::hardware_concurrency()));
  }
  workers = std::min(workers, n_tasks);

  std::vector<std::exception_ptr> failures(states.size());
  auto run_task = [&](std::size_t s) {
    try {
      if (!buckets[s].empty()) {
        detail::evaluate_task(states[s], buckets[s], total_iterations, m, sim);
      }
    } catch (...) {
      failures[s] = std::current_exception();
    }
  };

  if (workers <= 1) {
    for (std::size_t s = 0; s < states.size(); ++s) run_task(s);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t s = next.fetch_add(1); s < states.size();
             s = next.fetch_add(1)) {
          run_task(s);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  for (std::size_t s = 0; s < states.size(); ++s) {
    if (!failures[s]) continue;
    try {
      std::rethrow_exception(failures[s]);
    } catch (const std::exception& e) {
      throw std::runtime_error("task " + std::to_string(states[s].task) +
                               ": " + e.what());
    }
  }
}

}  // namespace monas
