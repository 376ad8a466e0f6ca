#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "monas/individual.hpp"

namespace monas {

// Auxiliary objective (1-params)*exp(-(1-params)*(1-error)) on normalized
// inputs. At equal error a larger model gets a smaller (better) value, which
// is what keeps large architectures alive under non-dominated sorting.
inline double aux_objective(double params_norm, double error_norm) {
  constexpr double kTol = 1e-12;
  if (params_norm < -kTol || params_norm > 1.0 + kTol || error_norm < -kTol ||
      error_norm > 1.0 + kTol) {
    throw std::invalid_argument("aux_objective inputs must lie in [0,1]: params_norm=" +
                                std::to_string(params_norm) + " error_norm=" +
                                std::to_string(error_norm));
  }
  const double p = std::clamp(params_norm, 0.0, 1.0);
  const double e = std::clamp(error_norm, 0.0, 1.0);
  return (1.0 - p) * std::exp(-(1.0 - p) * (1.0 - e));
}

// Min-max normalization of error and params over one task's combined
// parent+offspring pool of the current generation. A degenerate quantity
// (max == min) maps to 0.5 everywhere.
inline void normalize(std::span<Individual> subpop) {
  if (subpop.empty()) return;
  double emin = std::numeric_limits<double>::infinity(), emax = -emin;
  std::int64_t pmin = std::numeric_limits<std::int64_t>::max(), pmax = std::numeric_limits<std::int64_t>::min();
  for (const Individual& ind : subpop) {
    if (!ind.objectives) {
      throw std::invalid_argument("normalize: individual without objectives");
    }
    emin = std::min(emin, ind.objectives->error);
    emax = std::max(emax, ind.objectives->error);
    pmin = std::min(pmin, ind.objectives->params_raw);
    pmax = std::max(pmax, ind.objectives->params_raw);
  }
  for (Individual& ind : subpop) {
    ObjectiveVector& o = *ind.objectives;
    o.error_norm = emax > emin ? (o.error - emin) / (emax - emin) : 0.5;
    o.params_norm = pmax > pmin
                        ? static_cast<double>(o.params_raw - pmin) /
                              static_cast<double>(pmax - pmin)
                        : 0.5;
  }
}

// Fills f_aux from the normalized fields; normalize() must have run.
inline void apply_aux_objective(std::span<Individual> subpop) {
  for (Individual& ind : subpop) {
    ObjectiveVector& o = *ind.objectives;
    o.f_aux = aux_objective(o.params_norm, o.error_norm);
  }
}

inline int objective_count(ObjectiveSet set) {
  return set == ObjectiveSet::kThree || set == ObjectiveSet::kMacsThree ? 3 : 2;
}

// Objective extraction for dominance and crowding. Raw error/params are
// used for the first two coordinates: dominance is invariant under the
// min-max rescaling and crowding normalizes per front anyway. kCarsDual
// extracts its primary relation (error, params) here.
inline std::array<double, 3> objective_values(const ObjectiveVector& o,
                                              ObjectiveSet set) {
  std::array<double, 3> v{o.error, static_cast<double>(o.params_raw), 0.0};
  if (set == ObjectiveSet::kThree) {
    v[2] = o.f_aux;
  } else if (set == ObjectiveSet::kMacsThree) {
    v[2] = static_cast<double>(o.macs_raw);
  }
  return v;
}

// Secondary relation of the CARS-style dual sorting: error paired with the
// reciprocal of the parameter count ("accuracy speed"), shifted by one to
// stay finite for parameter-free genotypes.
inline std::array<double, 3> cars_secondary_values(const ObjectiveVector& o) {
  return {o.error, 1.0 / (1.0 + static_cast<double>(o.params_raw)), 0.0};
}

namespace detail {

inline bool dominates_values(const std::array<double, 3>& a,
                             const std::array<double, 3>& b, int m) {
  bool strict = false;
  for (int i = 0; i < m; ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

}  // namespace detail

// Pareto dominance: a is no worse than b in every selected objective and
// strictly better in at least one (minimization).
inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b,
                      ObjectiveSet set) {
  return detail::dominates_values(objective_values(a, set),
                                  objective_values(b, set),
                                  objective_count(set));
}

namespace detail {

// Deb's fast non-dominated sort over precomputed objective tuples; returns
// fronts as index lists in stable input order.
inline std::vector<std::vector<std::size_t>> sort_fronts(
    const std::vector<std::array<double, 3>>& vals, int m) {
  const std::size_t n = vals.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> dom_count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates_values(vals[i], vals[j], m)) {
        dominated[i].push_back(j);
        ++dom_count[j];
      } else if (dominates_values(vals[j], vals[i], m)) {
        dominated[j].push_back(i);
        ++dom_count[i];
      }
    }
  }
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i) {
    if (dom_count[i] == 0) current.push_back(i);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : current) {
      for (std::size_t j : dominated[i]) {
        if (--dom_count[j] == 0) next.push_back(j);
      }
    }
    std::sort(current.begin(), current.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

inline std::vector<std::array<double, 3>> collect_values(
    std::span<const Individual> pop, ObjectiveSet set, bool cars_secondary) {
  std::vector<std::array<double, 3>> vals;
  vals.reserve(pop.size());
  for (const Individual& ind : pop) {
    if (!ind.objectives) {
      throw std::invalid_argument("selection: individual without objectives");
    }
    vals.push_back(cars_secondary ? cars_secondary_values(*ind.objectives)
                                  : objective_values(*ind.objectives, set));
  }
  return vals;
}

}  // namespace detail

// Non-dominated sorting; assigns each individual its front index as rank
// and returns the fronts (index lists into pop, ascending within a front).
inline std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    std::span<Individual> pop, ObjectiveSet set) {
  auto vals = detail::collect_values(pop, set, false);
  auto fronts = detail::sort_fronts(vals, objective_count(set));
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    for (std::size_t i : fronts[r]) pop[i].rank = static_cast<int>(r);
  }
  return fronts;
}

namespace detail {

inline std::vector<double> crowding_from_values(
    const std::vector<std::array<double, 3>>& vals,
    std::span<const std::size_t> front, int m) {
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n == 0) return dist;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(n);
  for (int obj = 0; obj < m; ++obj) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return vals[front[a]][obj] < vals[front[b]][obj];
    });
    const double lo = vals[front[order.front()]][obj];
    const double hi = vals[front[order.back()]][obj];
    dist[order.front()] = kInf;
    dist[order.back()] = kInf;
    if (hi <= lo) continue;  // degenerate objective contributes nothing
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (dist[order[k]] == kInf) continue;
      dist[order[k]] += (vals[front[order[k + 1]]][obj] -
                         vals[front[order[k - 1]]][obj]) /
                        (hi - lo);
    }
  }
  return dist;
}

}  // namespace detail

// Crowding distance within one front: per objective, boundary individuals
// get +infinity and interior ones accumulate the normalized neighbor gap.
// Distances are written back to the individuals and returned in front order.
inline std::vector<double> crowding_distance(std::span<Individual> pop,
                                             std::span<const std::size_t> front,
                                             ObjectiveSet set) {
  auto vals = detail::collect_values({pop.data(), pop.size()}, set, false);
  auto dist = detail::crowding_from_values(vals, front, objective_count(set));
  for (std::size_t k = 0; k < front.size(); ++k) pop[front[k]].crowding = dist[k];
  return dist;
}

namespace detail {

// NSGA-II environmental step on a combined pool under one dominance
// relation: whole fronts by ascending rank, last front truncated by
// descending crowding distance with stable-order tie-break. Returns the
// selected indices front-major, ascending within each front; rank/crowding
// are written back to the pool.
inline std::vector<std::size_t> nsga2_select(std::vector<Individual>& pool,
                                             std::size_t quota, ObjectiveSet set,
                                             bool cars_secondary) {
  auto vals = collect_values(pool, set, cars_secondary);
  const int m = cars_secondary ? 2 : objective_count(set);
  auto fronts = sort_fronts(vals, m);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    auto dist = crowding_from_values(vals, fronts[r], m);
    for (std::size_t k = 0; k < fronts[r].size(); ++k) {
      pool[fronts[r][k]].rank = static_cast<int>(r);
      pool[fronts[r][k]].crowding = dist[k];
    }
  }
  std::vector<std::size_t> picked;
  picked.reserve(quota);
  for (const auto& front : fronts) {
    if (picked.size() == quota) break;
    if (picked.size() + front.size() <= quota) {
      picked.insert(picked.end(), front.begin(), front.end());
      continue;
    }
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pool[front[a]].crowding > pool[front[b]].crowding;
    });
    std::vector<std::size_t> tail;
    for (std::size_t k = 0; picked.size() + tail.size() < quota; ++k) {
      tail.push_back(front[order[k]]);
    }
    std::sort(tail.begin(), tail.end());
    picked.insert(picked.end(), tail.begin(), tail.end());
    break;
  }
  return picked;
}

}  // namespace detail

// Per-task environmental selection on the combined parent+offspring pool.
// The pool keeps parents before offspring, which is the documented stable
// tie-break order. normalize() and apply_aux_objective() must already have
// run on the same pool. Under kCarsDual the quota is filled by two sorting
// passes: half under (error, params), the rest under (error, 1/params) from
// the remaining individuals.
inline std::vector<Individual> environmental_selection(
    const std::vector<Individual>& parents,
    const std::vector<Individual>& offspring, std::size_t quota,
    ObjectiveSet set) {
  std::vector<Individual> pool = parents;
  pool.insert(pool.end(), offspring.begin(), offspring.end());
  if (quota > pool.size()) {
    throw std::invalid_argument("environmental_selection: quota " + std::to_string(quota) +
                                " exceeds combined population " + std::to_string(pool.size()));
  }

  std::vector<std::size_t> picked;
  if (set == ObjectiveSet::kCarsDual) {
    const std::size_t first = (quota + 1) / 2;
    picked = detail::nsga2_select(pool, first, set, false);
    std::vector<std::size_t> remaining_idx;
    std::vector<Individual> remaining;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (std::find(picked.begin(), picked.end(), i) == picked.end()) {
        remaining_idx.push_back(i);
        remaining.push_back(pool[i]);
      }
    }
    auto second = detail::nsga2_select(remaining, quota - first, set, true);
    for (std::size_t k : second) {
      pool[remaining_idx[k]] = remaining[k];
      picked.push_back(remaining_idx[k]);
    }
    std::sort(picked.begin(), picked.end());
  } else {
    picked = detail::nsga2_select(pool, quota, set, false);
  }

  std::vector<Individual> survivors;
  survivors.reserve(quota);
  for (std::size_t i : picked) survivors.push_back(pool[i]);
  return survivors;
}

}  // namespace monas
