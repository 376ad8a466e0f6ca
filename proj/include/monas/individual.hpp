#pragma once

#include <cstdint>
#include <optional>

#include "monas/genotype.hpp"

namespace monas {

// Which objectives drive dominance and environmental selection.
//   kTwo       (error, params)
//   kThree     (error, params, f_aux)            -- the default
//   kMacsThree (error, params, macs)
//   kCarsDual  two sorting passes: (error, params) and (error, 1/params)
// All but kThree exist as comparison modes for the selection-strategy study.
enum class ObjectiveSet { kTwo, kThree, kMacsThree, kCarsDual };

struct ObjectiveVector {
  double error = 0.0;            // raw validation error in [0,1]
  std::int64_t params_raw = 0;   // parameter count
  std::int64_t macs_raw = 0;     // MAC proxy (used by kMacsThree only)
  double params_norm = -1.0;     // min-max over the per-task generation pool
  double error_norm = -1.0;      // -1 marks "not yet normalized"
  double f_aux = -1.0;           // auxiliary size-diversity objective
};

struct Individual {
  Genotype genotype;
  int task = 0;  // skill factor: the task this individual is evaluated on
  std::optional<ObjectiveVector> objectives;
  int rank = -1;           // non-dominated front index, 0 = best; -1 = unset
  double crowding = -1.0;  // crowding distance; -1 = unset
};

}  // namespace monas
