#ifndef OT_CORE_HPP
#define OT_CORE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ot {

// Discrete optimal transport instance:
//   minimize sum_ij C[i][j] * X[i][j]
//   subject to X * 1 = supplies, X^T * 1 = demands, X >= 0.
// Costs are nonnegative integers (real-valued inputs are quantized at
// ingestion), supplies/demands are positive integers with equal totals.
// The cost matrix is stored dense row-major; at 8 bytes per entry the
// largest instance exercised here (4900 x 4900) needs ~192MB.
struct OTInstance {
  int32_t n = 0;  // supply nodes
  int32_t m = 0;  // demand nodes
  std::vector<int64_t> cost;  // n*m, row-major
  std::vector<int64_t> supplies;
  std::vector<int64_t> demands;
  std::string name;

  int64_t cost_at(int32_t i, int32_t j) const {
    return cost[static_cast<size_t>(i) * m + j];
  }
  int64_t max_cost() const;
  int64_t total_supply() const;
  int64_t total_demand() const;
  // true when every supply and demand equals 1 and n == m (assignment case)
  bool unit_caps() const;
};

// Returns std::nullopt when the instance is well formed, otherwise a
// description of the first violated requirement. Checked requirements:
// positive dimensions, matching array sizes, nonnegative costs, positive
// integral supplies/demands, balanced totals, and enough int64 headroom
// that S * N * (n + m + 2) cannot overflow downstream solvers.
std::optional<std::string> validate_instance(const OTInstance& inst);

// Sparse transport plan. Entries carry amount > 0; (i, j) pairs are unique.
// Row and column sums are computed once at construction and cached.
class Flow {
 public:
  struct Entry {
    int32_t i;
    int32_t j;
    double amount;
  };

  Flow() = default;
  Flow(int32_t n, int32_t m, std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<double>& row_sums() const { return row_sums_; }
  const std::vector<double>& col_sums() const { return col_sums_; }
  int32_t rows() const { return n_; }
  int32_t cols() const { return m_; }

  // true when every amount is (numerically) a nonnegative integer
  bool integral(double tol = 1e-9) const;

 private:
  int32_t n_ = 0;
  int32_t m_ = 0;
  std::vector<Entry> entries_;
  std::vector<double> row_sums_;
  std::vector<double> col_sums_;
};

// <C, X>. Exact for integral flows of the magnitudes accepted by
// validate_instance (products stay below 2^53).
double objective(const OTInstance& inst, const Flow& flow);

// Same sum accumulated in int64 for exact-equality comparisons between
// combinatorial solvers. Requires an integral flow.
int64_t objective_int(const OTInstance& inst, const Flow& flow);

// Marginal violation |supplies - X*1|_1 + |demands - X^T*1|_1.
double residue(const OTInstance& inst, const Flow& flow);

// Uniform result envelope for every solver in the suite.
// - objective and residue always describe `flow` (recomputable from it)
// - exact marks runs whose objective is provably optimal for the instance
// - converged is false when an iteration/bid/time budget expired first
// - iterations is solver-defined (pivots, augmenting phases, bids,
//   row+col passes, single marginal updates); see each solver's docs
struct SolveResult {
  Flow flow;
  double objective = 0.0;
  double residue = 0.0;
  int64_t iterations = 0;
  double wall_seconds = 0.0;
  bool exact = false;
  bool converged = true;
};

// Fills the derived fields of a result from its flow.
SolveResult make_result(const OTInstance& inst, Flow flow, int64_t iterations,
                        bool exact, bool converged);

}  // namespace ot

#endif
