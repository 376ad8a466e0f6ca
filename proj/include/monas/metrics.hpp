#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "monas/individual.hpp"

namespace monas {

// One point of the 2-D reporting objective space (both minimized).
struct ParetoPoint {
  double error = 0.0;
  double params = 0.0;

  friend bool operator==(const ParetoPoint&, const ParetoPoint&) = default;
};

// Population snapshot of one task at one generation, for trajectory plots.
struct FrontSnapshot {
  int generation = 0;
  std::vector<ParetoPoint> points;
};

// Coordinate-wise maximum over the union of all provided solution sets.
inline ParetoPoint reference_point(std::span<const std::vector<ParetoPoint>> sets) {
  ParetoPoint ref{-std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  bool any = false;
  for (const auto& set : sets) {
    for (const ParetoPoint& p : set) {
      ref.error = std::max(ref.error, p.error);
      ref.params = std::max(ref.params, p.params);
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("reference_point: no solutions given");
  return ref;
}

// Exact 2-D hypervolume (minimization): Lebesgue measure of the union of
// rectangles [p, ref], by sort-and-sweep. Points with any coordinate >= the
// reference contribute nothing; dominated points change nothing.
inline double hypervolume_2d(std::span<const ParetoPoint> points, ParetoPoint ref) {
  std::vector<ParetoPoint> pts;
  pts.reserve(points.size());
  for (const ParetoPoint& p : points) {
    if (p.error < ref.error && p.params < ref.params) pts.push_back(p);
  }
  if (pts.empty()) return 0.0;
  std::sort(pts.begin(), pts.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    return a.error < b.error || (a.error == b.error && a.params < b.params);
  });
  // Staircase sweep over ascending error; only points improving the best
  // params seen so far extend the dominated region.
  double hv = 0.0;
  double best_params = std::numeric_limits<double>::infinity();
  std::vector<ParetoPoint> stairs;
  for (const ParetoPoint& p : pts) {
    if (p.params < best_params) {
      stairs.push_back(p);
      best_params = p.params;
    }
  }
  for (std::size_t i = 0; i < stairs.size(); ++i) {
    const double next_error = i + 1 < stairs.size() ? stairs[i + 1].error : ref.error;
    hv += (next_error - stairs[i].error) * (ref.params - stairs[i].params);
  }
  return hv;
}

// HV report over the final fronts of several compared runs for one task:
// the reference point is the coordinate-wise maximum over all runs, every
// coordinate is normalized by it, and each run's HV is computed against
// (1,1), so values land in [0,1] and are comparable across runs.
inline std::vector<double> hv_report(
    const std::vector<std::vector<ParetoPoint>>& fronts_per_run) {
  for (const auto& front : fronts_per_run) {
    if (front.empty()) throw std::invalid_argument("hv_report: empty front");
  }
  const ParetoPoint ref = reference_point(fronts_per_run);
  auto scale = [&](const ParetoPoint& p) {
    return ParetoPoint{ref.error > 0 ? p.error / ref.error : 0.0,
                       ref.params > 0 ? p.params / ref.params : 0.0};
  };
  std::vector<double> out;
  out.reserve(fronts_per_run.size());
  for (const auto& front : fronts_per_run) {
    std::vector<ParetoPoint> scaled;
    scaled.reserve(front.size());
    for (const ParetoPoint& p : front) scaled.push_back(scale(p));
    out.push_back(hypervolume_2d(scaled, ParetoPoint{1.0, 1.0}));
  }
  return out;
}

// Equal-width size-group index over [lo, hi], clamped into [0, groups).
inline int size_group_index(double params, double lo, double hi, int groups) {
  if (groups < 1) throw std::invalid_argument("size_group_index: groups must be >= 1");
  if (hi <= lo) return 0;
  const double w = (hi - lo) / groups;
  const int idx = static_cast<int>(std::floor((params - lo) / w));
  return std::clamp(idx, 0, groups - 1);
}

struct Representative {
  int group = 0;  // size-group index, 0 = smallest models
  Individual individual;
};

// Final-population representative extraction: the observed size range is
// split into equal-width groups and each non-empty group contributes its
// minimum-error individual (ties: smaller params, then earlier position).
inline std::vector<Representative> select_representatives(
    std::span<const Individual> population, int groups = 4) {
  if (population.empty()) {
    throw std::invalid_argument("select_representatives: empty population");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Individual& ind : population) {
    if (!ind.objectives) {
      throw std::invalid_argument("select_representatives: individual without objectives");
    }
    lo = std::min(lo, static_cast<double>(ind.objectives->params_raw));
    hi = std::max(hi, static_cast<double>(ind.objectives->params_raw));
  }
  std::vector<const Individual*> best(static_cast<std::size_t>(groups), nullptr);
  for (const Individual& ind : population) {
    const int g = size_group_index(static_cast<double>(ind.objectives->params_raw),
                                   lo, hi, groups);
    const Individual*& cur = best[static_cast<std::size_t>(g)];
    if (cur == nullptr) {
      cur = &ind;
      continue;
    }
    const auto key = [](const Individual& i) {
      return std::pair<double, std::int64_t>(i.objectives->error,
                                             i.objectives->params_raw);
    };
    if (key(ind) < key(*cur)) cur = &ind;
  }
  std::vector<Representative> out;
  for (int g = 0; g < groups; ++g) {
    if (best[static_cast<std::size_t>(g)] != nullptr) {
      out.push_back({g, *best[static_cast<std::size_t>(g)]});
    }
  }
  return out;
}

}  // namespace monas
