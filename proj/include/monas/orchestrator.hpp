#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "monas/config.hpp"
#include "monas/evaluation.hpp"
#include "monas/metrics.hpp"
#include "monas/rng.hpp"
#include "monas/selection.hpp"
#include "monas/serialize.hpp"
#include "monas/svg.hpp"
#include "monas/variation.hpp"

namespace monas {

struct HvRow {
  int task = 0;
  std::string run;
  std::uint64_t seed = 0;
  double hv = 0.0;
};

struct HvSummary {
  int task = 0;
  std::string run;
  double mean = 0.0;
  double stddev = 0.0;
};

struct RunResult {
  RunConfig config;
  std::vector<Individual> final_population;
  // Per task: one population snapshot per generation (index 0 = initial).
  std::map<int, std::vector<FrontSnapshot>> snapshots;
  // Per task: final non-dominated front under (error, params), by size.
  std::map<int, std::vector<Individual>> fronts;
  std::map<int, std::vector<Representative>> representatives;
  std::vector<HvRow> hv;  // reference point from this run's own fronts
  std::vector<TaskState> states;
};

struct Initialized {
  std::vector<Individual> population;
  std::vector<TaskState> states;
};

// Random initial population and fresh task states. Each active task gets
// exactly population_size / n_tasks individuals: the round-robin task
// labels are shuffled, not the per-task counts.
inline Initialized initialize(const RunConfig& cfg) {
  validate_config(cfg);
  Initialized out;
  const auto active = cfg.resolved_active_tasks();
  const auto prefs = make_preferences(cfg.resolved_task_universe(), cfg.similarity,
                                      cfg.seed);
  for (int t : active) {
    TaskState state;
    state.task = t;
    state.preference = prefs[static_cast<std::size_t>(t)];
    state.noise_scale = cfg.simulator.noise_scale;
    state.rng = make_engine(cfg.seed, Stream::kTaskNoise, static_cast<std::uint64_t>(t));
    out.states.push_back(std::move(state));
  }

  std::vector<int> labels(static_cast<std::size_t>(cfg.population_size));
  for (int i = 0; i < cfg.population_size; ++i) {
    labels[static_cast<std::size_t>(i)] = active[static_cast<std::size_t>(i % cfg.n_tasks)];
  }
  auto assign_rng = make_engine(cfg.seed, Stream::kTaskAssignment);
  std::shuffle(labels.begin(), labels.end(), assign_rng);

  auto init_rng = make_engine(cfg.seed, Stream::kInitPopulation);
  out.population.reserve(static_cast<std::size_t>(cfg.population_size));
  for (int i = 0; i < cfg.population_size; ++i) {
    Individual ind;
    ind.genotype = random_genotype(init_rng);
    ind.task = labels[static_cast<std::size_t>(i)];
    out.population.push_back(std::move(ind));
  }
  return out;
}

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

inline std::string generation_csv(const std::vector<Individual>& population) {
  std::string csv = "task,genotype,error,params_raw,params_norm,f_aux,rank,crowding\n";
  for (const Individual& ind : population) {
    const ObjectiveVector& o = *ind.objectives;
    csv += std::to_string(ind.task) + ',' + to_compact_string(ind.genotype) + ',' +
           format_double(o.error) + ',' + std::to_string(o.params_raw) + ',' +
           format_double(o.params_norm) + ',' + format_double(o.f_aux) + ',' +
           std::to_string(ind.rank) + ',' + format_double(ind.crowding) + '\n';
  }
  return csv;
}

inline std::string hv_csv(const std::vector<HvRow>& rows) {
  std::string csv = "task,run,seed,hv\n";
  for (const HvRow& r : rows) {
    csv += std::to_string(r.task) + ',' + r.run + ',' + std::to_string(r.seed) + ',' +
           format_double(r.hv) + '\n';
  }
  return csv;
}

inline std::vector<ParetoPoint> to_points(const std::vector<Individual>& members) {
  std::vector<ParetoPoint> pts;
  pts.reserve(members.size());
  for (const Individual& ind : members) {
    pts.push_back({ind.objectives->error,
                   static_cast<double>(ind.objectives->params_raw)});
  }
  return pts;
}

// Fig-3 style generation subset: initial, 2nd, 4th, 6th, 8th and final.
inline std::vector<FrontSnapshot> plot_snapshots(const std::vector<FrontSnapshot>& all) {
  std::vector<FrontSnapshot> picked;
  const int last = all.empty() ? 0 : all.back().generation;
  for (const FrontSnapshot& snap : all) {
    const int g = snap.generation;
    if (g == last || (g <= 8 && g % 2 == 0)) picked.push_back(snap);
  }
  return picked;
}

}  // namespace detail

// Executes the full search loop:
//   mate selection -> RMP-gated offspring -> parallel per-task evaluation of
//   parents+offspring -> per-task normalization and auxiliary objective ->
//   per-task environmental selection at quota population_size/n_tasks,
// then extracts fronts, representatives and HV, and writes all outputs
// under cfg.out_dir (pass an empty out_dir to skip file output).
inline RunResult run(const RunConfig& cfg) {
  auto [population, states] = initialize(cfg);
  const auto active = cfg.resolved_active_tasks();
  const std::size_t quota =
      static_cast<std::size_t>(cfg.population_size / cfg.n_tasks);
  const std::int64_t budget = cfg.resolved_total_iterations();
  const VariationConfig vcfg{cfg.crossover_prob, cfg.mutation_prob, cfg.rmp};

  RunResult result;
  result.config = cfg;

  const bool with_files = !cfg.out_dir.empty();
  const std::filesystem::path out_dir(cfg.out_dir);
  if (with_files) std::filesystem::create_directories(out_dir);

  // Splits evaluated individuals per task (stable order), normalizes the
  // per-task pool, applies the auxiliary objective and selects the
  // survivors; at generation 0 there are no offspring and every individual
  // survives, only rank/crowding metadata is assigned.
  auto select_next = [&](const std::vector<Individual>& parents,
                         const std::vector<Individual>& offspring) {
    std::vector<Individual> next;
    next.reserve(static_cast<std::size_t>(cfg.population_size));
    for (int t : active) {
      std::vector<Individual> pool;
      std::size_t n_parents = 0;
      for (const Individual& ind : parents) {
        if (ind.task == t) {
          pool.push_back(ind);
          ++n_parents;
        }
      }
      for (const Individual& ind : offspring) {
        if (ind.task == t) pool.push_back(ind);
      }
      normalize(pool);
      apply_aux_objective(pool);
      std::vector<Individual> survivors;
      if (offspring.empty()) {
        auto fronts = fast_nondominated_sort(pool, cfg.objective_set);
        for (const auto& front : fronts) {
          crowding_distance(pool, front, cfg.objective_set);
        }
        survivors = std::move(pool);
      } else {
        std::vector<Individual> par(pool.begin(),
                                    pool.begin() + static_cast<std::ptrdiff_t>(n_parents));
        std::vector<Individual> off(pool.begin() + static_cast<std::ptrdiff_t>(n_parents),
                                    pool.end());
        survivors = environmental_selection(par, off, quota, cfg.objective_set);
      }
      result.snapshots[t].push_back(
          {static_cast<int>(result.snapshots[t].size()), detail::to_points(survivors)});
      next.insert(next.end(), survivors.begin(), survivors.end());
    }
    return next;
  };

  evaluate_generation(states, population, budget, cfg.size_model, cfg.simulator,
                      cfg.workers);
  population = select_next(population, {});
  if (with_files && cfg.write_generation_logs) {
    detail::write_text_file(out_dir / "gen_0.csv", detail::generation_csv(population));
  }

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    auto mate_rng = make_engine(cfg.seed, Stream::kMateShuffle,
                                static_cast<std::uint64_t>(gen));
    const auto pairs = mate_selection(population, mate_rng);

    std::vector<Individual> offspring;
    offspring.reserve(population.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      auto pair_rng = make_engine(cfg.seed, Stream::kOffspringPair,
                                  static_cast<std::uint64_t>(gen), k);
      auto [c1, c2] = generate_offspring(population[pairs[k].first],
                                         population[pairs[k].second], vcfg, pair_rng);
      offspring.push_back(std::move(c1));
      offspring.push_back(std::move(c2));
    }

    std::vector<Individual> combined = population;
    combined.insert(combined.end(), offspring.begin(), offspring.end());
    evaluate_generation(states, combined, budget, cfg.size_model, cfg.simulator,
                        cfg.workers);
    std::vector<Individual> parents(combined.begin(),
                                    combined.begin() + static_cast<std::ptrdiff_t>(population.size()));
    std::vector<Individual> evaluated_offspring(
        combined.begin() + static_cast<std::ptrdiff_t>(population.size()), combined.end());

    population = select_next(parents, evaluated_offspring);
    if (with_files && cfg.write_generation_logs) {
      detail::write_text_file(out_dir / ("gen_" + std::to_string(gen) + ".csv"),
                              detail::generation_csv(population));
    }
  }

  result.final_population = population;
  result.states = states;

  for (int t : active) {
    std::vector<Individual> members;
    for (const Individual& ind : population) {
      if (ind.task == t) members.push_back(ind);
    }
    auto fronts = fast_nondominated_sort(members, ObjectiveSet::kTwo);
    std::vector<Individual> front;
    for (std::size_t i : fronts.front()) front.push_back(members[i]);
    std::sort(front.begin(), front.end(), [](const Individual& a, const Individual& b) {
      return std::pair(a.objectives->params_raw, a.objectives->error) <
             std::pair(b.objectives->params_raw, b.objectives->error);
    });
    result.fronts[t] = front;
    result.representatives[t] =
        select_representatives(members, cfg.representatives_per_task);
    const double hv = hv_report({detail::to_points(front)}).front();
    result.hv.push_back({t, cfg.run_name, cfg.seed, hv});
  }

  if (with_files) {
    detail::write_text_file(out_dir / "config.json", config_to_json(cfg).dump(2) + "\n");
    detail::write_text_file(out_dir / "hv.csv", detail::hv_csv(result.hv));
    for (int t : active) {
      detail::write_text_file(out_dir / ("front_task" + std::to_string(t) + ".json"),
                              front_to_json(t, result.fronts[t]).dump(2) + "\n");
      detail::write_text_file(
          out_dir / ("representatives_task" + std::to_string(t) + ".json"),
          representatives_to_json(t, result.representatives[t]).dump(2) + "\n");
      for (const TaskState& state : states) {
        if (state.task == t) {
          detail::write_text_file(out_dir / ("states_task" + std::to_string(t) + ".json"),
                                  task_state_to_json(state).dump(2) + "\n");
        }
      }
      detail::write_text_file(
          out_dir / ("scatter_task" + std::to_string(t) + ".svg"),
          scatter_svg("task " + std::to_string(t) + " (" + cfg.run_name + ")",
                      detail::plot_snapshots(result.snapshots[t])));
    }
  }
  return result;
}

struct NamedConfig {
  std::string name;
  RunConfig config;
};

struct CompareResult {
  std::vector<HvRow> rows;
  std::vector<HvSummary> summary;
};

namespace detail {

inline void check_same_task_definition(const RunConfig& a, const RunConfig& b,
                                       const std::string& name) {
  const auto& sa = a.simulator;
  const auto& sb = b.simulator;
  const bool same = a.resolved_task_universe() == b.resolved_task_universe() &&
                    a.similarity == b.similarity &&
                    a.size_model.initial_channels == b.size_model.initial_channels &&
                    a.size_model.cell_repetitions == b.size_model.cell_repetitions &&
                    sa.untrained_error == sb.untrained_error &&
                    sa.error_floor == sb.error_floor &&
                    sa.quality_weight == sb.quality_weight &&
                    sa.capacity_weight == sb.capacity_weight &&
                    sa.tau0 == sb.tau0 && sa.size_slowdown == sb.size_slowdown &&
                    sa.noise_scale == sb.noise_scale;
  if (!same) {
    throw std::invalid_argument("compare: variant \"" + name +
                                "\" has a mismatched task definition");
  }
}

}  // namespace detail

// Runs every variant over the shared seed list and reports per-task HV.
// For each (task, seed) the reference point is built from the union of all
// variants' final fronts on that task, so HV values are comparable across
// the variants of one comparison.
inline CompareResult compare(const std::vector<NamedConfig>& variants,
                             const std::vector<std::uint64_t>& seeds,
                             const std::string& out_dir = "") {
  if (variants.size() < 2) {
    throw std::invalid_argument("compare: need at least two variants");
  }
  if (seeds.empty()) throw std::invalid_argument("compare: need at least one seed");
  for (const NamedConfig& v : variants) {
    validate_config(v.config);
    detail::check_same_task_definition(variants.front().config, v.config, v.name);
  }

  // fronts[variant][seed][task]
  std::vector<std::vector<std::map<int, std::vector<ParetoPoint>>>> fronts(
      variants.size(), std::vector<std::map<int, std::vector<ParetoPoint>>>(seeds.size()));
  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      RunConfig cfg = variants[v].config;
      cfg.seed = seeds[s];
      cfg.run_name = variants[v].name;
      cfg.out_dir = out_dir.empty()
                        ? ""
                        : out_dir + "/" + variants[v].name + "/seed_" +
                              std::to_string(seeds[s]);
      RunResult res = run(cfg);
      for (const auto& [task, front] : res.fronts) {
        fronts[v][s][task] = detail::to_points(front);
      }
    }
  }

  std::vector<int> tasks;
  for (const auto& per_seed : fronts) {
    for (const auto& by_task : per_seed) {
      for (const auto& [task, _] : by_task) {
        if (std::find(tasks.begin(), tasks.end(), task) == tasks.end()) {
          tasks.push_back(task);
        }
      }
    }
  }
  std::sort(tasks.begin(), tasks.end());

  CompareResult result;
  for (int task : tasks) {
    for (std::size_t v = 0; v < variants.size(); ++v) {
      std::vector<double> values;
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        if (!fronts[v][s].count(task)) continue;
        // Gather every variant's front for this (task, seed) group; the
        // variant under report is placed first.
        std::vector<std::vector<ParetoPoint>> group{fronts[v][s][task]};
        for (std::size_t u = 0; u < variants.size(); ++u) {
          if (u != v && fronts[u][s].count(task)) group.push_back(fronts[u][s][task]);
        }
        const double hv = hv_report(group).front();
        result.rows.push_back({task, variants[v].name, seeds[s], hv});
        values.push_back(hv);
      }
      if (values.empty()) continue;
      double mean = 0;
      for (double x : values) mean += x;
      mean /= static_cast<double>(values.size());
      double var = 0;
      for (double x : values) var += (x - mean) * (x - mean);
      const double stddev =
          values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
      result.summary.push_back({task, variants[v].name, mean, stddev});
    }
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    detail::write_text_file(std::filesystem::path(out_dir) / "hv.csv",
                            detail::hv_csv(result.rows));
    std::string csv = "task,run,mean_hv,std_hv\n";
    for (const HvSummary& s : result.summary) {
      csv += std::to_string(s.task) + ',' + s.run + ',' + format_double(s.mean) + ',' +
             format_double(s.stddev) + '\n';
    }
    detail::write_text_file(std::filesystem::path(out_dir) / "hv_summary.csv", csv);
  }
  return result;
}

}  // namespace monas
