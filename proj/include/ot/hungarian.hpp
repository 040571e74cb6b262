#ifndef OT_HUNGARIAN_HPP
#define OT_HUNGARIAN_HPP

#include <cstdint>
#include <vector>

#include "ot/core.hpp"

namespace ot {

// row_to_col[i] = column assigned to row i
struct Matching {
  std::vector<int32_t> row_to_col;
};

// Feasible dual pair: u[i] + v[j] <= cost[i][j] for all i, j, with equality
// on matched edges. For solve_batched_km the inequality refers to the
// quantized cost matrix it optimized.
struct DualPotentials {
  std::vector<int64_t> u;
  std::vector<int64_t> v;
};

// chat[i][j] = floor(cost[i][j] * B / N), N = max entry of cost.
// An all-zero matrix passes through unchanged with divisor 1.
// lossless is true when no entry lost precision (e.g. B a multiple of N,
// or B = N * n), in which case optima transfer exactly.
struct QuantizedCosts {
  std::vector<int64_t> chat;
  int64_t B = 1;
  int64_t N = 1;
  bool lossless = false;
};

QuantizedCosts quantize_costs(const std::vector<int64_t>& cost, int64_t B);

// Exact Kuhn-Munkres in the O(n^3) potential/slack formulation.
// Requires a unit-capacity square instance. iterations counts augmented rows.
SolveResult solve_km(const OTInstance& inst, DualPotentials* duals = nullptr,
                     Matching* matching = nullptr, double time_budget_s = 0.0);

struct BatchedKMConfig {
  int64_t B = 100;
  double time_budget_s = 0.0;
};

// KM on costs quantized to floor(C * B / N), augmenting along a maximal set
// of vertex-disjoint paths in the tight-edge subgraph each phase
// (layered BFS + DFS extraction), with the standard dual adjustment when no
// augmenting path exists. Objective (reported against the true costs) is at
// most OPT + n * N / B; B = N * n reproduces solve_km exactly.
// iterations counts phases plus dual adjustments.
SolveResult solve_batched_km(const OTInstance& inst,
                             const BatchedKMConfig& config = {},
                             DualPotentials* duals = nullptr,
                             QuantizedCosts* quantized = nullptr);

}  // namespace ot

#endif
