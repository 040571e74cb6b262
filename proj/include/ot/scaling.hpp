#ifndef OT_SCALING_HPP
#define OT_SCALING_HPP

#include <cstdint>
#include <vector>

#include "ot/core.hpp"

namespace ot {

// Entropic regularization works on costs normalized to max entry 1, so eta
// values are comparable across datasets. The implicit plan is
//   X[i][j] = exp(f[i] - eta * cost[i][j] / N + g[j])
// and is only ever evaluated through log-sum-exp reductions; exp(-eta * chat)
// is never formed on its own, which keeps eta = 1e5 finite.
struct ScalingConfig {
  double eta = 100.0;
  // stop once |r - X*1|_1 + |c - X^T*1|_1 <= eps_fraction * total mass
  double eps_fraction = 0.001;
  // 0 picks a default; sinkhorn counts row+column pass pairs, greenkhorn
  // counts single row/column updates
  int64_t max_iterations = 0;
  // feed the returned plan through round_flow (off by default: the stopping
  // rule already bounds the residue)
  bool round_output = false;
  double time_budget_s = 0.0;
};

// Final dual iterates, enough to re-materialize the plan.
struct LogScalingState {
  std::vector<double> f;
  std::vector<double> g;
  double eta = 0.0;      // in normalized units
  double residue = 0.0;  // of the implicit plan, before any rounding
};

// Diagnostic: entropy h(X) = -sum_e x_e * log(x_e) over the plan entries.
double plan_entropy(const Flow& flow);

// Log-domain Sinkhorn: alternate exact row scalings and column scalings.
// One iteration is a row pass plus a column pass; the residue test runs every
// iteration. Returns converged = false if the iteration/time budget expires.
SolveResult sinkhorn(const OTInstance& inst, const ScalingConfig& config = {},
                     LogScalingState* state = nullptr);

// Greenkhorn: each step rescales the single row or column with the largest
// marginal discrepancy |target - current|, tracked by a lazily rebuilt
// max-heap. The residue test runs every (n + m) / 2 updates.
SolveResult greenkhorn(const OTInstance& inst, const ScalingConfig& config = {},
                       LogScalingState* state = nullptr);

// Repairs an almost-feasible plan: scale rows down to their targets, then
// columns, then spread the leftover deficits as the rank-one product
// err_r * err_c^T / |err_r|_1. Exactly feasible afterwards; the objective
// moves by at most residue(X) * max_cost.
Flow round_flow(const OTInstance& inst, const Flow& flow);

// Smallest eta (10% relative grid resolution, doubling then bisection,
// capped at 1e5) whose converged Sinkhorn objective is within target_ratio
// of the exact optimum. exact_objective < 0 computes it via network simplex.
// The same eta serves greenkhorn; update order does not move the achieved
// ratio. If even the cap misses the target the cap is returned; callers see
// the shortfall when they rerun at the returned eta.
double calibrate_eta(const OTInstance& inst, double target_ratio = 1.1,
                     double exact_objective = -1.0,
                     const ScalingConfig& base = {});

}  // namespace ot

#endif
