#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "monas/evaluation.hpp"
#include "monas/genotype.hpp"
#include "monas/individual.hpp"

namespace monas {

inline ObjectiveSet objective_set_from_string(const std::string& s) {
  if (s == "two") return ObjectiveSet::kTwo;
  if (s == "three") return ObjectiveSet::kThree;
  if (s == "macs-three") return ObjectiveSet::kMacsThree;
  if (s == "cars-dual") return ObjectiveSet::kCarsDual;
  throw std::invalid_argument(
      "objective_set: expected one of two|three|macs-three|cars-dual, got \"" + s + "\"");
}

inline std::string to_string(ObjectiveSet set) {
  switch (set) {
    case ObjectiveSet::kTwo: return "two";
    case ObjectiveSet::kThree: return "three";
    case ObjectiveSet::kMacsThree: return "macs-three";
    case ObjectiveSet::kCarsDual: return "cars-dual";
  }
  return "three";
}

// Full run configuration. Tasks are drawn from a "universe" of generated
// task definitions so that a single-task baseline run can address exactly
// the same task as one slot of a multi-task run: preference vectors depend
// only on (seed, task_universe, similarity).
struct RunConfig {
  int n_tasks = 2;
  std::vector<int> active_tasks;  // universe ids; empty = 0..n_tasks-1
  int task_universe = 0;          // 0 = derived from active tasks
  double similarity = 0.9;        // pairwise preference cosine target

  int population_size = 80;
  int generations = 100;
  double rmp = 1.0;
  double crossover_prob = 1.0;
  double mutation_prob = 0.025;
  int representatives_per_task = 4;
  ObjectiveSet objective_set = ObjectiveSet::kThree;

  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string run_name = "run";
  int workers = 0;  // 0 = one per task, capped by hardware concurrency
  bool write_generation_logs = true;

  SizeModel size_model;
  SimulatorConfig simulator;

  std::vector<int> resolved_active_tasks() const {
    if (!active_tasks.empty()) return active_tasks;
    std::vector<int> ids;
    for (int t = 0; t < n_tasks; ++t) ids.push_back(t);
    return ids;
  }

  int resolved_task_universe() const {
    int hi = 0;
    for (int t : resolved_active_tasks()) hi = std::max(hi, t + 1);
    return std::max(task_universe, hi);
  }

  std::int64_t resolved_total_iterations() const {
    return simulator.total_iterations > 0
               ? simulator.total_iterations
               : static_cast<std::int64_t>(10) * population_size;
  }
};

// Validates all config invariants; throws with one field-level message per
// violation, joined by "; ".
inline void validate_config(const RunConfig& cfg) {
  std::vector<std::string> bad;
  auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (cfg.n_tasks < 1) bad.push_back("n_tasks: must be >= 1");
  const auto active = cfg.resolved_active_tasks();
  if (static_cast<int>(active.size()) != cfg.n_tasks) {
    bad.push_back("active_tasks: size must equal n_tasks");
  }
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i] < 0) bad.push_back("active_tasks: negative task id");
    for (std::size_t j = i + 1; j < active.size(); ++j) {
      if (active[i] == active[j]) bad.push_back("active_tasks: duplicate task id");
    }
  }
  if (cfg.resolved_task_universe() > kOperatorCount) {
    bad.push_back("task_universe: at most " + std::to_string(kOperatorCount) +
                  " tasks are supported");
  }
  if (cfg.population_size < 2) bad.push_back("population_size: must be >= 2");
  if (cfg.population_size % 2 != 0) bad.push_back("population_size: must be even");
  if (cfg.n_tasks >= 1 && cfg.population_size % cfg.n_tasks != 0) {
    bad.push_back("population_size: must be divisible by n_tasks");
  }
  if (cfg.generations < 0) bad.push_back("generations: must be >= 0");
  if (!prob_ok(cfg.rmp)) bad.push_back("rmp: must be in [0,1]");
  if (!prob_ok(cfg.crossover_prob)) bad.push_back("crossover_prob: must be in [0,1]");
  if (!prob_ok(cfg.mutation_prob)) bad.push_back("mutation_prob: must be in [0,1]");
  if (!prob_ok(cfg.similarity)) bad.push_back("similarity: must be in [0,1]");
  if (cfg.representatives_per_task < 1) {
    bad.push_back("representatives_per_task: must be >= 1");
  }
  if (cfg.size_model.initial_channels < 1) {
    bad.push_back("size_model.initial_channels: must be >= 1");
  }
  if (cfg.size_model.cell_repetitions < 1) {
    bad.push_back("size_model.cell_repetitions: must be >= 1");
  }
  if (cfg.simulator.noise_scale < 0) bad.push_back("simulator.noise_scale: must be >= 0");
  if (cfg.simulator.eval_delay_ms < 0) bad.push_back("simulator.eval_delay_ms: must be >= 0");
  if (cfg.simulator.tau0 <= 0) bad.push_back("simulator.tau0: must be > 0");
  if (cfg.simulator.total_iterations < 0) {
    bad.push_back("simulator.total_iterations: must be >= 0 (0 = auto)");
  }
  if (cfg.workers < 0) bad.push_back("workers: must be >= 0 (0 = auto)");
  if (!bad.empty()) {
    std::string msg = "invalid configuration: " + bad[0];
    for (std::size_t i = 1; i < bad.size(); ++i) msg += "; " + bad[i];
    throw std::invalid_argument(msg);
  }
}

namespace detail {

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  detail::read_field(j, "n_tasks", cfg.n_tasks);
  detail::read_field(j, "active_tasks", cfg.active_tasks);
  detail::read_field(j, "task_universe", cfg.task_universe);
  detail::read_field(j, "similarity", cfg.similarity);
  detail::read_field(j, "population_size", cfg.population_size);
  detail::read_field(j, "generations", cfg.generations);
  detail::read_field(j, "rmp", cfg.rmp);
  detail::read_field(j, "crossover_prob", cfg.crossover_prob);
  detail::read_field(j, "mutation_prob", cfg.mutation_prob);
  detail::read_field(j, "representatives_per_task", cfg.representatives_per_task);
  if (j.contains("objective_set")) {
    cfg.objective_set = objective_set_from_string(j.at("objective_set").get<std::string>());
  }
  detail::read_field(j, "seed", cfg.seed);
  detail::read_field(j, "out_dir", cfg.out_dir);
  detail::read_field(j, "run_name", cfg.run_name);
  detail::read_field(j, "workers", cfg.workers);
  detail::read_field(j, "write_generation_logs", cfg.write_generation_logs);
  if (j.contains("size_model")) {
    const auto& s = j.at("size_model");
    detail::read_field(s, "initial_channels", cfg.size_model.initial_channels);
    detail::read_field(s, "cell_repetitions", cfg.size_model.cell_repetitions);
  }
  if (j.contains("simulator")) {
    const auto& s = j.at("simulator");
    detail::read_field(s, "untrained_error", cfg.simulator.untrained_error);
    detail::read_field(s, "error_floor", cfg.simulator.error_floor);
    detail::read_field(s, "quality_weight", cfg.simulator.quality_weight);
    detail::read_field(s, "capacity_weight", cfg.simulator.capacity_weight);
    detail::read_field(s, "tau0", cfg.simulator.tau0);
    detail::read_field(s, "size_slowdown", cfg.simulator.size_slowdown);
    detail::read_field(s, "noise_scale", cfg.simulator.noise_scale);
    detail::read_field(s, "eval_delay_ms", cfg.simulator.eval_delay_ms);
    detail::read_field(s, "total_iterations", cfg.simulator.total_iterations);
  }
  return cfg;
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
  return nlohmann::json{
      {"n_tasks", cfg.n_tasks},
      {"active_tasks", cfg.resolved_active_tasks()},
      {"task_universe", cfg.resolved_task_universe()},
      {"similarity", cfg.similarity},
      {"population_size", cfg.population_size},
      {"generations", cfg.generations},
      {"rmp", cfg.rmp},
      {"crossover_prob", cfg.crossover_prob},
      {"mutation_prob", cfg.mutation_prob},
      {"representatives_per_task", cfg.representatives_per_task},
      {"objective_set", to_string(cfg.objective_set)},
      {"seed", cfg.seed},
      {"out_dir", cfg.out_dir},
      {"run_name", cfg.run_name},
      {"workers", cfg.workers},
      {"write_generation_logs", cfg.write_generation_logs},
      {"size_model",
       {{"initial_channels", cfg.size_model.initial_channels},
        {"cell_repetitions", cfg.size_model.cell_repetitions}}},
      {"simulator",
       {{"untrained_error", cfg.simulator.untrained_error},
        {"error_floor", cfg.simulator.error_floor},
        {"quality_weight", cfg.simulator.quality_weight},
        {"capacity_weight", cfg.simulator.capacity_weight},
        {"tau0", cfg.simulator.tau0},
        {"size_slowdown", cfg.simulator.size_slowdown},
        {"noise_scale", cfg.simulator.noise_scale},
        {"eval_delay_ms", cfg.simulator.eval_delay_ms},
        {"total_iterations", cfg.simulator.total_iterations}}}};
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

}  // namespace monas
