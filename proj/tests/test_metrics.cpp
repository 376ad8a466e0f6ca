#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "monas/metrics.hpp"
#include "monas/rng.hpp"
#include "monas/svg.hpp"

using namespace monas;

namespace {

Individual make_ind(double error, std::int64_t params) {
  Individual ind;
  ObjectiveVector o;
  o.error = error;
  o.params_raw = params;
  ind.objectives = o;
  return ind;
}

// Monte-Carlo hypervolume oracle: fraction of uniform samples in the
// [0, ref] box dominated by at least one point.
double mc_hypervolume(const std::vector<ParetoPoint>& pts, ParetoPoint ref,
                      long samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(0.0, ref.error), uy(0.0, ref.params);
  long hit = 0;
  for (long s = 0; s < samples; ++s) {
    const double x = ux(rng), y = uy(rng);
    for (const ParetoPoint& p : pts) {
      if (p.error <= x && p.params <= y) {
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(samples) * ref.error *
         ref.params;
}

}  // namespace

TEST_CASE("reference point is the coordinate-wise maximum", "[metrics]") {
  std::vector<std::vector<ParetoPoint>> sets{{{0.1, 0.9}, {0.5, 0.2}}};
  const ParetoPoint ref = reference_point(sets);
  CHECK(ref.error == 0.5);
  CHECK(ref.params == 0.9);

  std::vector<std::vector<ParetoPoint>> single{{{0.3, 0.4}}};
  CHECK(reference_point(single) == ParetoPoint{0.3, 0.4});

  std::vector<std::vector<ParetoPoint>> empty{{}, {}};
  CHECK_THROWS_AS(reference_point(empty), std::invalid_argument);
}

TEST_CASE("reference point of a union equals the max of reference points", "[metrics]") {
  auto rng = make_engine(41, Stream::kInitPopulation);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ParetoPoint> a, b;
    for (int i = 0; i < 8; ++i) a.push_back({unit(rng), unit(rng)});
    for (int i = 0; i < 8; ++i) b.push_back({unit(rng), unit(rng)});
    std::vector<std::vector<ParetoPoint>> both{a, b};
    const ParetoPoint joint = reference_point(both);
    std::vector<std::vector<ParetoPoint>> only_a{a}, only_b{b};
    const ParetoPoint ra = reference_point(only_a);
    const ParetoPoint rb = reference_point(only_b);
    CHECK(joint.error == std::max(ra.error, rb.error));
    CHECK(joint.params == std::max(ra.params, rb.params));
  }
}

TEST_CASE("hypervolume worked examples", "[metrics]") {
  const ParetoPoint ref{1.0, 1.0};
  std::vector<ParetoPoint> one{{0.2, 0.2}};
  CHECK(hypervolume_2d(one, ref) == Catch::Approx(0.64).epsilon(0.0).margin(1e-12));

  std::vector<ParetoPoint> two{{0.2, 0.6}, {0.6, 0.2}};
  CHECK(hypervolume_2d(two, ref) == Catch::Approx(0.48).epsilon(0.0).margin(1e-12));

  two.push_back({0.7, 0.7});  // dominated, contributes nothing
  CHECK(hypervolume_2d(two, ref) == Catch::Approx(0.48).epsilon(0.0).margin(1e-12));

  std::vector<ParetoPoint> empty;
  CHECK(hypervolume_2d(empty, ref) == 0.0);
  std::vector<ParetoPoint> outside{{1.0, 0.2}, {1.3, 0.1}};
  CHECK(hypervolume_2d(outside, ref) == 0.0);
}

TEST_CASE("hypervolume is monotone and permutation/duplication invariant",
          "[metrics]") {
  auto rng = make_engine(42, Stream::kInitPopulation);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ParetoPoint ref{1.0, 1.0};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ParetoPoint> pts;
    for (int i = 0; i < 12; ++i) pts.push_back({unit(rng), unit(rng)});
    const double base = hypervolume_2d(pts, ref);

    std::vector<ParetoPoint> more = pts;
    more.push_back({unit(rng), unit(rng)});
    CHECK(hypervolume_2d(more, ref) >= base - 1e-15);

    std::vector<ParetoPoint> shuffled = pts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(hypervolume_2d(shuffled, ref) == Catch::Approx(base).margin(1e-12));

    std::vector<ParetoPoint> doubled = pts;
    doubled.insert(doubled.end(), pts.begin(), pts.end());
    CHECK(hypervolume_2d(doubled, ref) == Catch::Approx(base).margin(1e-12));
  }
}

TEST_CASE("hypervolume matches a Monte-Carlo oracle", "[metrics]") {
  auto rng = make_engine(43, Stream::kInitPopulation);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ParetoPoint> pts;
    for (int i = 0; i < 10; ++i) pts.push_back({unit(rng), unit(rng)});
    const ParetoPoint ref{1.0, 1.0};
    const double exact = hypervolume_2d(pts, ref);
    const double sampled = mc_hypervolume(pts, ref, 1'000'000, rng);
    CHECK(exact == Catch::Approx(sampled).margin(1e-2));
  }
}

TEST_CASE("hv report normalizes by the joint reference point", "[metrics]") {
  // a front equal to the reference point has zero hypervolume
  std::vector<std::vector<ParetoPoint>> self{{{0.4, 0.6}}};
  CHECK(hv_report(self).front() == 0.0);

  // a front containing the ideal point dominates the whole unit box
  std::vector<std::vector<ParetoPoint>> ideal{{{0.0, 0.0}}, {{0.4, 0.6}}};
  const auto values = hv_report(ideal);
  CHECK(values[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(values[1] == 0.0);

  for (double v : values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  std::vector<std::vector<ParetoPoint>> with_empty{{{0.1, 0.1}}, {}};
  CHECK_THROWS_AS(hv_report(with_empty), std::invalid_argument);
}

TEST_CASE("size group index", "[metrics]") {
  CHECK(size_group_index(0.0, 0.0, 100.0, 4) == 0);
  CHECK(size_group_index(24.9, 0.0, 100.0, 4) == 0);
  CHECK(size_group_index(25.1, 0.0, 100.0, 4) == 1);
  CHECK(size_group_index(100.0, 0.0, 100.0, 4) == 3);
  CHECK(size_group_index(120.0, 0.0, 100.0, 4) == 3);  // clamped
  CHECK(size_group_index(-5.0, 0.0, 100.0, 4) == 0);
  CHECK(size_group_index(7.0, 3.0, 3.0, 4) == 0);  // degenerate range
  CHECK_THROWS_AS(size_group_index(1.0, 0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("representative selection basics", "[metrics]") {
  // one individual per size group: everyone represents itself
  std::vector<Individual> spread{make_ind(0.4, 0), make_ind(0.3, 30),
                                 make_ind(0.2, 60), make_ind(0.1, 100)};
  auto reps = select_representatives(spread, 4);
  REQUIRE(reps.size() == 4);
  for (int g = 0; g < 4; ++g) {
    CHECK(reps[static_cast<std::size_t>(g)].group == g);
    CHECK(reps[static_cast<std::size_t>(g)].individual.objectives->params_raw ==
          spread[static_cast<std::size_t>(g)].objectives->params_raw);
  }

  // an all-equal-size population collapses into one group
  std::vector<Individual> same{make_ind(0.4, 50), make_ind(0.2, 50),
                               make_ind(0.3, 50)};
  reps = select_representatives(same, 4);
  REQUIRE(reps.size() == 1);
  CHECK(reps[0].individual.objectives->error == 0.2);

  std::vector<Individual> none;
  CHECK_THROWS_AS(select_representatives(none, 4), std::invalid_argument);
}

TEST_CASE("representative ties prefer smaller params then input order", "[metrics]") {
  std::vector<Individual> pop{make_ind(0.2, 80), make_ind(0.2, 60),
                              make_ind(0.2, 60), make_ind(0.5, 0)};
  auto reps = select_representatives(pop, 1);
  REQUIRE(reps.size() == 1);
  CHECK(reps[0].individual.objectives->params_raw == 60);
}

TEST_CASE("representatives match a brute-force regrouping oracle", "[metrics]") {
  auto rng = make_engine(44, Stream::kInitPopulation);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> params(0, 50'000);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Individual> pop;
    for (int i = 0; i < 80; ++i) pop.push_back(make_ind(unit(rng), params(rng)));
    const auto reps = select_representatives(pop, 4);

    std::int64_t lo = pop[0].objectives->params_raw, hi = lo;
    for (const Individual& ind : pop) {
      lo = std::min(lo, ind.objectives->params_raw);
      hi = std::max(hi, ind.objectives->params_raw);
    }
    for (const Representative& rep : reps) {
      // every representative weakly minimizes error within its size group
      for (const Individual& ind : pop) {
        if (size_group_index(static_cast<double>(ind.objectives->params_raw),
                             static_cast<double>(lo), static_cast<double>(hi),
                             4) == rep.group) {
          CHECK(rep.individual.objectives->error <= ind.objectives->error);
        }
      }
    }
    // groups that contain individuals must be represented
    std::set<int> occupied, represented;
    for (const Individual& ind : pop) {
      occupied.insert(size_group_index(static_cast<double>(ind.objectives->params_raw),
                                       static_cast<double>(lo),
                                       static_cast<double>(hi), 4));
    }
    for (const Representative& rep : reps) represented.insert(rep.group);
    CHECK(occupied == represented);
  }
}

TEST_CASE("scatter svg renders snapshots", "[metrics]") {
  std::vector<FrontSnapshot> snaps{{0, {{0.9, 100.0}, {0.8, 200.0}}},
                                   {8, {{0.4, 150.0}}}};
  const std::string svg = scatter_svg("task 0", snaps);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("generation 0") != std::string::npos);
  CHECK(svg.find("generation 8") != std::string::npos);
  CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
  // double formatting used by the csv/svg writers
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}
