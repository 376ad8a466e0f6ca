#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <random>

#include "monas/evaluation.hpp"
#include "monas/rng.hpp"
#include "monas/serialize.hpp"

using namespace monas;

namespace {

Genotype genotype_with_ops(std::initializer_list<std::pair<int, Operator>> ops) {
  Genotype g{};
  for (int i = 0; i < kGenotypeSlots; ++i) {
    if (slot_is_op(i)) g[i] = static_cast<int>(Operator::kIdentity);
  }
  for (auto [slot, op] : ops) g[slot] = static_cast<int>(op);
  return g;
}

TaskState uniform_state(double preference, double noise = 0.0) {
  TaskState state;
  state.preference.fill(preference);
  state.noise_scale = noise;
  state.rng = make_engine(1, Stream::kTaskNoise);
  return state;
}

void set_used_counters(TaskState& state, const Genotype& g, double value) {
  for (int i = 0; i < kGenotypeSlots; ++i) {
    if (!slot_is_op(i)) continue;
    state.counters[static_cast<std::size_t>(counter_index(
        slot_cell(i), slot_block(i), i % kSlotsPerBlock - 2, g[i]))] = value;
  }
}

// genotype with roughly the requested capacity using dilated convs
Genotype genotype_with_capacity(double target, const SizeModel& m) {
  Genotype g = genotype_with_ops({});
  const int dil_slots = static_cast<int>(std::lround(target * 20));
  int placed = 0;
  for (int i = 0; i < kGenotypeSlots && placed < dil_slots; ++i) {
    if (slot_is_op(i)) {
      g[i] = static_cast<int>(Operator::kDilConv3x3);
      ++placed;
    }
  }
  (void)m;
  return g;
}

}  // namespace

TEST_CASE("preference vectors meet the similarity target", "[evaluation]") {
  for (int n : {2, 3, 4, 5}) {
    for (double target : {0.0, 0.3, 0.5, 0.7, 0.9, 1.0}) {
      for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto prefs = make_preferences(n, target, seed);
        REQUIRE(prefs.size() == static_cast<std::size_t>(n));
        for (const auto& p : prefs) {
          for (double v : p) {
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
          }
        }
        for (int a = 0; a < n; ++a) {
          for (int b = a + 1; b < n; ++b) {
            const double cos = preference_cosine(prefs[static_cast<std::size_t>(a)],
                                                 prefs[static_cast<std::size_t>(b)]);
            INFO("n=" << n << " target=" << target << " seed=" << seed);
            CHECK(cos == Catch::Approx(target).margin(0.02));
          }
        }
      }
    }
  }
  CHECK_THROWS_AS(make_preferences(0, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_preferences(6, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_preferences(2, 1.5, 1), std::invalid_argument);
}

TEST_CASE("preference generation is deterministic in the seed", "[evaluation]") {
  CHECK(make_preferences(3, 0.8, 42) == make_preferences(3, 0.8, 42));
  CHECK(make_preferences(3, 0.8, 42) != make_preferences(3, 0.8, 43));
}

TEST_CASE("budget split", "[evaluation]") {
  CHECK(split_budget(400, 80) == 5);
  CHECK(split_budget(79, 80) == 0);
  CHECK(split_budget(391, 80) == 4);
  CHECK_THROWS_AS(split_budget(100, 0), std::invalid_argument);
  CHECK_THROWS_AS(split_budget(-1, 10), std::invalid_argument);
}

TEST_CASE("training accumulates per used key", "[evaluation]") {
  TaskState state = uniform_state(0.5);
  const Genotype g = genotype_with_ops({{2, Operator::kSepConv3x3}});

  std::vector<Genotype> none{g};
  train(state, none, 0);
  for (double c : state.counters) CHECK(c == 0.0);

  std::vector<Genotype> twice{g, g};
  train(state, twice, 3);
  CHECK(state.counters[static_cast<std::size_t>(counter_index(
            CellKind::kNormal, 0, 0, static_cast<int>(Operator::kSepConv3x3)))] == 6.0);

  CHECK_THROWS_AS(train(state, twice, -1), std::invalid_argument);
}

TEST_CASE("training is order independent", "[evaluation]") {
  auto rng = make_engine(31, Stream::kInitPopulation);
  const Genotype a = random_genotype(rng);
  const Genotype b = random_genotype(rng);
  TaskState s1 = uniform_state(0.5);
  TaskState s2 = uniform_state(0.5);
  std::vector<Genotype> ab{a, b}, ba{b, a};
  train(s1, ab, 4);
  train(s2, ba, 4);
  CHECK(s1.counters == s2.counters);
}

TEST_CASE("counters never decrease", "[evaluation]") {
  auto rng = make_engine(32, Stream::kInitPopulation);
  TaskState state = uniform_state(0.5);
  auto before = state.counters;
  for (int round = 0; round < 50; ++round) {
    std::vector<Genotype> batch{random_genotype(rng), random_genotype(rng)};
    train(state, batch, static_cast<std::int64_t>(rng() % 7));
    for (std::size_t k = 0; k < state.counters.size(); ++k) {
      REQUIRE(state.counters[k] >= before[k]);
    }
    before = state.counters;
  }
}

TEST_CASE("validation limits with the stated constants", "[evaluation]") {
  const SizeModel m{20, 1};
  SimulatorConfig sim;
  sim.tau0 = 20.0;  // constants of the documented closed form
  sim.noise_scale = 0.0;

  TaskState state = uniform_state(0.5, 0.0);
  const Genotype g = genotype_with_capacity(0.4, m);

  // untrained: the exponential factor is 1 and the asymptotic part cancels
  CHECK(validate(state, g, m, sim) == 0.9);

  // fully trained: error converges to the asymptotic error
  set_used_counters(state, g, 1e9);
  CHECK(validate(state, g, m, sim) ==
        Catch::Approx(asymptotic_error(state, g, m, sim)).margin(1e-9));
}

TEST_CASE("early training favors small models, late training large ones",
          "[evaluation]") {
  // equal quality via a uniform preference vector; c1 < c2
  const SizeModel m{20, 1};
  SimulatorConfig sim;
  sim.tau0 = 20.0;
  const Genotype small = genotype_with_capacity(0.1, m);
  const Genotype large = genotype_with_capacity(0.9, m);
  REQUIRE(capacity(small, m) == Catch::Approx(0.1));
  REQUIRE(capacity(large, m) == Catch::Approx(0.9));

  auto error_at = [&](const Genotype& g, double p) {
    TaskState state = uniform_state(0.5, 0.0);
    set_used_counters(state, g, p);
    return validate(state, g, m, sim);
  };

  // independent evaluation of the closed form
  auto closed_form = [&](double c, double p) {
    const double e_final = 0.05 + 0.35 * 0.5 + 0.10 * (1.0 - c);
    const double tau = 20.0 * (1.0 + 3.0 * c);
    return e_final + (0.9 - e_final) * std::exp(-p / tau);
  };

  CHECK(error_at(small, 5.0) == Catch::Approx(closed_form(0.1, 5.0)).margin(1e-12));
  CHECK(error_at(large, 5.0) == Catch::Approx(closed_form(0.9, 5.0)).margin(1e-12));
  CHECK(error_at(small, 5.0) < error_at(large, 5.0));
  CHECK(error_at(small, 1e4) > error_at(large, 1e4));
}

TEST_CASE("trap precondition holds at the shipped defaults", "[evaluation]") {
  const SizeModel m{20, 1};
  SimulatorConfig sim;  // default constants
  const Genotype small = genotype_with_capacity(0.1, m);
  const Genotype large = genotype_with_capacity(0.9, m);
  TaskState s1 = uniform_state(0.5, 0.0);
  TaskState s2 = uniform_state(0.5, 0.0);
  set_used_counters(s1, small, 5.0);
  set_used_counters(s2, large, 5.0);
  CHECK(validate(s1, small, m, sim) < validate(s2, large, m, sim));
}

TEST_CASE("validation error never increases with training", "[evaluation]") {
  const SizeModel m{20, 1};
  SimulatorConfig sim;
  auto rng = make_engine(33, Stream::kInitPopulation);
  for (int trial = 0; trial < 50; ++trial) {
    const Genotype g = random_genotype(rng);
    double previous = 1.0;
    for (double p : {0.0, 1.0, 5.0, 20.0, 100.0, 1e3, 1e5}) {
      TaskState state = uniform_state(0.6, 0.0);
      set_used_counters(state, g, p);
      const double error = validate(state, g, m, sim);
      REQUIRE(error <= previous + 1e-12);
      previous = error;
    }
  }
}

TEST_CASE("evaluate_generation matches direct train+validate", "[evaluation]") {
  const SizeModel m{20, 1};
  SimulatorConfig sim;
  auto rng = make_engine(34, Stream::kInitPopulation);
  const Genotype g = random_genotype(rng);

  std::vector<TaskState> states{uniform_state(0.5, 0.005)};
  states[0].task = 0;
  std::vector<Individual> pop(1);
  pop[0].genotype = g;
  pop[0].task = 0;
  evaluate_generation(states, pop, 400, m, sim, 1);

  TaskState reference = uniform_state(0.5, 0.005);
  std::vector<Genotype> batch{g};
  train(reference, batch, split_budget(400, 1));
  const double expected = validate(reference, g, m, sim);

  REQUIRE(pop[0].objectives.has_value());
  CHECK(pop[0].objectives->error == expected);
  CHECK(pop[0].objectives->params_raw == count_params(g, m));
  CHECK(pop[0].objectives->macs_raw == count_macs(g, m));
  CHECK(states[0].counters == reference.counters);
}

TEST_CASE("tasks are isolated during evaluation", "[evaluation]") {
  const SizeModel m{20, 1};
  SimulatorConfig sim;
  auto rng = make_engine(35, Stream::kInitPopulation);

  std::vector<TaskState> states(2);
  states[0] = uniform_state(0.5);
  states[0].task = 0;
  states[1] = uniform_state(0.5);
  states[1].task = 1;
  const auto task1_counters = states[1].counters;
  const auto task1_rng = states[1].rng;

  std::vector<Individual> pop(4);
  for (auto& ind : pop) {
    ind.genotype = random_genotype(rng);
    ind.task = 0;
  }
  evaluate_generation(states, pop, 400, m, sim, 2);

  CHECK(states[1].counters == task1_counters);
  CHECK(states[1].rng == task1_rng);
}

TEST_CASE("evaluation is deterministic across worker counts", "[evaluation]") {
  const SizeModel m{20, 1};
  SimulatorConfig sim;
  auto make_pop = [&] {
    auto rng = make_engine(36, Stream::kInitPopulation);
    std::vector<Individual> pop(40);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      pop[i].genotype = random_genotype(rng);
      pop[i].task = static_cast<int>(i % 4);
    }
    return pop;
  };
  auto make_states = [] {
    std::vector<TaskState> states(4);
    for (int t = 0; t < 4; ++t) {
      states[static_cast<std::size_t>(t)] = uniform_state(0.5, 0.005);
      states[static_cast<std::size_t>(t)].task = t;
      states[static_cast<std::size_t>(t)].rng =
          make_engine(9, Stream::kTaskNoise, static_cast<std::uint64_t>(t));
    }
    return states;
  };

  auto pop1 = make_pop();
  auto states1 = make_states();
  evaluate_generation(states1, pop1, 400, m, sim, 1);
  auto pop4 = make_pop();
  auto states4 = make_states();
  evaluate_generation(states4, pop4, 400, m, sim, 4);

  for (std::size_t i = 0; i < pop1.size(); ++i) {
    CHECK(pop1[i].objectives->error == pop4[i].objectives->error);
    CHECK(pop1[i].objectives->params_raw == pop4[i].objectives->params_raw);
  }
  for (std::size_t t = 0; t < states1.size(); ++t) {
    CHECK(states1[t].counters == states4[t].counters);
  }
}

TEST_CASE("two delayed tasks evaluate in parallel", "[evaluation][timing]") {
  const SizeModel m{20, 1};
  SimulatorConfig sim;
  sim.eval_delay_ms = 5.0;
  auto rng = make_engine(37, Stream::kInitPopulation);

  auto run_once = [&](int workers) {
    std::vector<TaskState> states(2);
    for (int t = 0; t < 2; ++t) {
      states[static_cast<std::size_t>(t)] = uniform_state(0.5);
      states[static_cast<std::size_t>(t)].task = t;
    }
    std::vector<Individual> pop(40);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      pop[i].genotype = random_genotype(rng);
      pop[i].task = static_cast<int>(i % 2);
    }
    const auto start = std::chrono::steady_clock::now();
    evaluate_generation(states, pop, 400, m, sim, workers);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };

  const double sequential = run_once(1);
  const double parallel = run_once(2);
  CHECK(parallel <= 0.6 * sequential);
}

TEST_CASE("task failures carry the task id", "[evaluation]") {
  const SizeModel m{20, 1};
  SimulatorConfig sim;
  std::vector<TaskState> states{uniform_state(0.5)};
  states[0].task = 3;
  std::vector<Individual> pop(1);
  pop[0].task = 3;
  pop[0].genotype.slots.fill(9);  // invalid
  CHECK_THROWS_WITH(evaluate_generation(states, pop, 100, m, sim, 1),
                    Catch::Matchers::StartsWith("task 3:"));

  pop[0].task = 7;  // no state for task 7
  CHECK_THROWS_AS(evaluate_generation(states, pop, 100, m, sim, 1),
                  std::invalid_argument);
}

TEST_CASE("task state round-trips through json", "[evaluation]") {
  auto rng = make_engine(38, Stream::kInitPopulation);
  TaskState state = uniform_state(0.7, 0.01);
  state.task = 2;
  std::vector<Genotype> batch{random_genotype(rng)};
  train(state, batch, 6);
  state.rng();  // advance the stream

  TaskState restored = task_state_from_json(task_state_to_json(state));
  CHECK(restored.task == state.task);
  CHECK(restored.preference == state.preference);
  CHECK(restored.counters == state.counters);
  CHECK(restored.noise_scale == state.noise_scale);
  // the noise stream continues exactly where it left off
  CHECK(restored.rng == state.rng);
  CHECK(restored.rng() == state.rng());
}
