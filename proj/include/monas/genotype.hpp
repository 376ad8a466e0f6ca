#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace monas {

inline constexpr int kCells = 2;  // normal cell, reduction cell
inline constexpr int kBlocksPerCell = 5;
inline constexpr int kSlotsPerBlock = 4;  // input_a, input_b, op_a, op_b
inline constexpr int kSlotsPerCell = kBlocksPerCell * kSlotsPerBlock;
inline constexpr int kGenotypeSlots = kCells * kSlotsPerCell;  // 40
inline constexpr int kOperatorCount = 5;

enum class CellKind : int { kNormal = 0, kReduction = 1 };

enum class Operator : int {
  kSepConv3x3 = 0,
  kDilConv3x3 = 1,
  kMaxPool3x3 = 2,
  kAvgPool3x3 = 3,
  kIdentity = 4,
};

inline constexpr std::array<const char*, kOperatorCount> kOperatorNames = {
    "sep-conv-3x3", "dilated-conv-3x3", "max-pool-3x3", "avg-pool-3x3",
    "identity"};

// Slot layout: slots [0,20) are the normal cell, [20,40) the reduction cell.
// Within a cell, block i owns slots [4i, 4i+4) = (input_a, input_b, op_a,
// op_b). Input slot values 0 and 1 are the two cell inputs; value v >= 2
// refers to the output of block v-2 of the same cell.
inline constexpr bool slot_is_op(int slot) { return slot % kSlotsPerBlock >= 2; }
inline constexpr int slot_block(int slot) {
  return (slot % kSlotsPerCell) / kSlotsPerBlock;
}
inline constexpr CellKind slot_cell(int slot) {
  return static_cast<CellKind>(slot / kSlotsPerCell);
}
// Inclusive upper bound of a slot's legal value range (lower bound is 0).
inline constexpr int slot_max_value(int slot) {
  return slot_is_op(slot) ? kOperatorCount - 1 : slot_block(slot) + 1;
}

// 40-slot discrete architecture genotype.
struct Genotype {
  std::array<int, kGenotypeSlots> slots{};

  int& operator[](int i) { return slots[static_cast<std::size_t>(i)]; }
  int operator[](int i) const { return slots[static_cast<std::size_t>(i)]; }
  friend bool operator==(const Genotype&, const Genotype&) = default;

  int slot(CellKind cell, int block, int within) const {
    return slots[static_cast<std::size_t>(static_cast<int>(cell) * kSlotsPerCell +
                                          block * kSlotsPerBlock + within)];
  }
};

// Index of the first out-of-range slot, or -1 if the genotype is valid.
inline int first_invalid_slot(const Genotype& g) {
  for (int i = 0; i < kGenotypeSlots; ++i) {
    if (g[i] < 0 || g[i] > slot_max_value(i)) return i;
  }
  return -1;
}

inline bool is_valid(const Genotype& g) { return first_invalid_slot(g) < 0; }

template <class URBG>
Genotype random_genotype(URBG& rng) {
  Genotype g;
  for (int i = 0; i < kGenotypeSlots; ++i) {
    g[i] = std::uniform_int_distribution<int>(0, slot_max_value(i))(rng);
  }
  return g;
}

struct BlockNode {
  int input_a = 0;  // 0/1 = cell inputs, v >= 2 = output of block v-2
  int input_b = 0;
  Operator op_a = Operator::kIdentity;
  Operator op_b = Operator::kIdentity;

  friend bool operator==(const BlockNode&, const BlockNode&) = default;
};

struct CellGraph {
  std::array<BlockNode, kBlocksPerCell> blocks{};
  // Blocks whose output no other block consumes; their concatenation is the
  // cell output.
  std::vector<int> output_blocks;

  friend bool operator==(const CellGraph&, const CellGraph&) = default;
};

struct ArchitectureGraph {
  CellGraph normal;
  CellGraph reduction;

  friend bool operator==(const ArchitectureGraph&, const ArchitectureGraph&) = default;
};

namespace detail {

inline CellGraph decode_cell(const Genotype& g, CellKind cell) {
  CellGraph out;
  const int base = static_cast<int>(cell) * kSlotsPerCell;
  std::array<bool, kBlocksPerCell> consumed{};
  for (int b = 0; b < kBlocksPerCell; ++b) {
    BlockNode& node = out.blocks[static_cast<std::size_t>(b)];
    node.input_a = g[base + b * kSlotsPerBlock + 0];
    node.input_b = g[base + b * kSlotsPerBlock + 1];
    node.op_a = static_cast<Operator>(g[base + b * kSlotsPerBlock + 2]);
    node.op_b = static_cast<Operator>(g[base + b * kSlotsPerBlock + 3]);
    if (node.input_a >= 2) consumed[static_cast<std::size_t>(node.input_a - 2)] = true;
    if (node.input_b >= 2) consumed[static_cast<std::size_t>(node.input_b - 2)] = true;
  }
  for (int b = 0; b < kBlocksPerCell; ++b) {
    if (!consumed[static_cast<std::size_t>(b)]) out.output_blocks.push_back(b);
  }
  return out;
}

}  // namespace detail

// Resolves the genotype into explicit per-cell block graphs. Throws
// std::invalid_argument naming the offending slot on out-of-range input.
inline ArchitectureGraph decode(const Genotype& g) {
  if (int bad = first_invalid_slot(g); bad >= 0) {
    throw std::invalid_argument("genotype slot " + std::to_string(bad) +
                                " out of range: value " + std::to_string(g[bad]) +
                                ", max " + std::to_string(slot_max_value(bad)));
  }
  ArchitectureGraph graph;
  graph.normal = detail::decode_cell(g, CellKind::kNormal);
  graph.reduction = detail::decode_cell(g, CellKind::kReduction);
  return graph;
}

inline Genotype encode(const ArchitectureGraph& graph) {
  Genotype g;
  for (int c = 0; c < kCells; ++c) {
    const CellGraph& cell = c == 0 ? graph.normal : graph.reduction;
    const int base = c * kSlotsPerCell;
    for (int b = 0; b < kBlocksPerCell; ++b) {
      const BlockNode& node = cell.blocks[static_cast<std::size_t>(b)];
      g[base + b * kSlotsPerBlock + 0] = node.input_a;
      g[base + b * kSlotsPerBlock + 1] = node.input_b;
      g[base + b * kSlotsPerBlock + 2] = static_cast<int>(node.op_a);
      g[base + b * kSlotsPerBlock + 3] = static_cast<int>(node.op_b);
    }
  }
  return g;
}

// Analytic parameter-count model. Costs are per op slot at channel width C:
// a separable conv is one depthwise (9C) plus one pointwise (C^2) filter
// bank, a dilated conv a full 3x3 bank (9C^2), pooling and identity are
// free. The normal cell is repeated cell_repetitions times, the reduction
// cell appears once; stem and classifier are excluded.
struct SizeModel {
  int initial_channels = 20;
  int cell_repetitions = 1;
};

inline std::int64_t op_param_cost(Operator op, int channels) {
  const auto c = static_cast<std::int64_t>(channels);
  switch (op) {
    case Operator::kSepConv3x3: return 9 * c + c * c;
    case Operator::kDilConv3x3: return 9 * c * c;
    default: return 0;
  }
}

// MAC proxy used by the macs-three objective mode. Identical to the
// parameter cost except pooling gets a small nonzero cost, so it exerts a
// selection pressure similar to the model size.
inline std::int64_t op_macs_cost(Operator op, int channels) {
  const auto c = static_cast<std::int64_t>(channels);
  switch (op) {
    case Operator::kMaxPool3x3:
    case Operator::kAvgPool3x3: return c;
    default: return op_param_cost(op, channels);
  }
}

namespace detail {

template <class CostFn>
std::int64_t accumulate_cost(const Genotype& g, const SizeModel& m, CostFn cost) {
  std::int64_t per_cell[kCells] = {0, 0};
  for (int i = 0; i < kGenotypeSlots; ++i) {
    if (!slot_is_op(i)) continue;
    per_cell[i / kSlotsPerCell] +=
        cost(static_cast<Operator>(g[i]), m.initial_channels);
  }
  return per_cell[0] * m.cell_repetitions + per_cell[1];
}

}  // namespace detail

inline std::int64_t count_params(const Genotype& g, const SizeModel& m) {
  return detail::accumulate_cost(g, m, op_param_cost);
}

inline std::int64_t count_macs(const Genotype& g, const SizeModel& m) {
  return detail::accumulate_cost(g, m, op_macs_cost);
}

// Largest parameter count any genotype can reach under this size model;
// fixed reference bound for capacity-style normalization.
inline std::int64_t max_params(const SizeModel& m) {
  std::int64_t worst = 0;
  for (int op = 0; op < kOperatorCount; ++op) {
    worst = std::max(worst, op_param_cost(static_cast<Operator>(op), m.initial_channels));
  }
  const std::int64_t per_cell = worst * kBlocksPerCell * 2;
  return per_cell * m.cell_repetitions + per_cell;
}

// Compact log form "n:<20 digits>|r:<20 digits>"; every slot value is a
// single decimal digit by construction.
inline std::string to_compact_string(const Genotype& g) {
  std::string s = "n:";
  s.reserve(45);
  for (int i = 0; i < kGenotypeSlots; ++i) {
    if (i == kSlotsPerCell) s += "|r:";
    s += static_cast<char>('0' + g[i]);
  }
  return s;
}

inline Genotype genotype_from_compact(const std::string& s) {
  if (s.size() != 45 || s.rfind("n:", 0) != 0 || s.substr(22, 3) != "|r:") {
    throw std::invalid_argument("malformed compact genotype: " + s);
  }
  Genotype g;
  for (int i = 0; i < kGenotypeSlots; ++i) {
    const char ch = s[static_cast<std::size_t>(i < kSlotsPerCell ? 2 + i : 5 + i)];
    if (ch < '0' || ch > '9') {
      throw std::invalid_argument("malformed compact genotype: " + s);
    }
    g[i] = ch - '0';
  }
  if (int bad = first_invalid_slot(g); bad >= 0) {
    throw std::invalid_argument("compact genotype slot " + std::to_string(bad) +
                                " out of range");
  }
  return g;
}

}  // namespace monas
