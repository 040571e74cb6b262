#ifndef OT_NETSIMPLEX_HPP
#define OT_NETSIMPLEX_HPP

#include <cstdint>
#include <vector>

#include "ot/core.hpp"

namespace ot {

struct NetSimplexConfig {
  // entering-arc scan window, roughly block_size_factor * sqrt(#arcs)
  double block_size_factor = 1.0;
  int32_t min_block_size = 10;
  // 0 means unlimited; when positive the solve stops early with
  // converged = false once the budget is exhausted
  int64_t max_pivots = 0;
  double time_budget_s = 0.0;
};

// Node potentials of the final basis, indexed supply nodes first
// (0..n-1), then demand nodes (n..n+m-1). Optimality certificate:
//   cost[i][j] + potentials[i] - potentials[n + j] >= 0   for all i, j
// with equality on every basic (tree) arc carrying flow.
struct NetSimplexCertificate {
  std::vector<int64_t> potentials;
};

// Primal network simplex on the complete bipartite transportation network,
// with an artificial root node, big-M initial basis (M = 1 + N * (n + m))
// and block search pricing. Exact: flows and potentials stay integral
// throughout. iterations counts pivots.
SolveResult solve_network_simplex(const OTInstance& inst,
                                  const NetSimplexConfig& config = {},
                                  NetSimplexCertificate* cert = nullptr);

}  // namespace ot

#endif
