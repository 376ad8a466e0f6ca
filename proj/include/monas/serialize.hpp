#pragma once

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "monas/evaluation.hpp"
#include "monas/genotype.hpp"
#include "monas/individual.hpp"
#include "monas/metrics.hpp"

namespace monas {

inline nlohmann::json genotype_to_json(const Genotype& g) {
  return nlohmann::json(std::vector<int>(g.slots.begin(), g.slots.end()));
}

inline Genotype genotype_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<int>>();
  if (values.size() != kGenotypeSlots) {
    throw std::invalid_argument("genotype json must hold exactly " +
                                std::to_string(kGenotypeSlots) + " integers, got " +
                                std::to_string(values.size()));
  }
  Genotype g;
  std::copy(values.begin(), values.end(), g.slots.begin());
  if (int bad = first_invalid_slot(g); bad >= 0) {
    throw std::invalid_argument("genotype json slot " + std::to_string(bad) +
                                " out of range");
  }
  return g;
}

// Checkpoint form of a task's supernet state; the engine state round-trips
// through its stream representation so a resumed run continues the exact
// noise sequence.
inline nlohmann::json task_state_to_json(const TaskState& state) {
  std::ostringstream rng_state;
  rng_state << state.rng;
  return nlohmann::json{
      {"task", state.task},
      {"preference", std::vector<double>(state.preference.begin(), state.preference.end())},
      {"counters", std::vector<double>(state.counters.begin(), state.counters.end())},
      {"noise_scale", state.noise_scale},
      {"rng", rng_state.str()},
  };
}

inline TaskState task_state_from_json(const nlohmann::json& j) {
  TaskState state;
  state.task = j.at("task").get<int>();
  const auto pref = j.at("preference").get<std::vector<double>>();
  const auto counters = j.at("counters").get<std::vector<double>>();
  if (pref.size() != state.preference.size() || counters.size() != state.counters.size()) {
    throw std::invalid_argument("task state json has wrong table sizes");
  }
  std::copy(pref.begin(), pref.end(), state.preference.begin());
  std::copy(counters.begin(), counters.end(), state.counters.begin());
  state.noise_scale = j.at("noise_scale").get<double>();
  std::istringstream rng_state(j.at("rng").get<std::string>());
  rng_state >> state.rng;
  if (!rng_state) throw std::invalid_argument("task state json: bad rng state");
  return state;
}

inline nlohmann::json front_to_json(int task, const std::vector<Individual>& front) {
  nlohmann::json points = nlohmann::json::array();
  for (const Individual& ind : front) {
    points.push_back({{"genotype", genotype_to_json(ind.genotype)},
                      {"genotype_str", to_compact_string(ind.genotype)},
                      {"error", ind.objectives->error},
                      {"params", ind.objectives->params_raw}});
  }
  return nlohmann::json{{"task", task}, {"points", points}};
}

inline nlohmann::json representatives_to_json(int task,
                                              const std::vector<Representative>& reps) {
  nlohmann::json out = nlohmann::json::array();
  for (const Representative& r : reps) {
    out.push_back({{"task", task},
                   {"group", r.group},
                   {"genotype", genotype_to_json(r.individual.genotype)},
                   {"genotype_str", to_compact_string(r.individual.genotype)},
                   {"error", r.individual.objectives->error},
                   {"params", r.individual.objectives->params_raw}});
  }
  return out;
}

}  // namespace monas
