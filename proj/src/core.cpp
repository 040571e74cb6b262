#include "ot/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ot {

int64_t OTInstance::max_cost() const {
  if (cost.empty()) return 0;
  return *std::max_element(cost.begin(), cost.end());
}

int64_t OTInstance::total_supply() const {
  return std::accumulate(supplies.begin(), supplies.end(), int64_t{0});
}

int64_t OTInstance::total_demand() const {
  return std::accumulate(demands.begin(), demands.end(), int64_t{0});
}

bool OTInstance::unit_caps() const {
  if (n != m) return false;
  auto is_one = [](int64_t v) { return v == 1; };
  return std::all_of(supplies.begin(), supplies.end(), is_one) &&
         std::all_of(demands.begin(), demands.end(), is_one);
}

std::optional<std::string> validate_instance(const OTInstance& inst) {
  if (inst.n <= 0 || inst.m <= 0) return "dimensions must be positive";
  if (inst.supplies.size() != static_cast<size_t>(inst.n))
    return "supplies size does not match n";
  if (inst.demands.size() != static_cast<size_t>(inst.m))
    return "demands size does not match m";
  if (inst.cost.size() != static_cast<size_t>(inst.n) * inst.m)
    return "cost matrix size does not match n*m";
  for (int64_t c : inst.cost)
    if (c < 0) return "costs must be nonnegative";
  for (int64_t s : inst.supplies)
    if (s <= 0) return "supplies must be positive";
  for (int64_t d : inst.demands)
    if (d <= 0) return "demands must be positive";
  if (inst.total_supply() != inst.total_demand())
    return "total supply does not equal total demand";

  // Headroom: the big-M simplex start uses M = 1 + N*(n+m) and accumulates
  // at most S*M, so S * N * (n+m+2) has to stay well inside int64.
  const int64_t N = std::max<int64_t>(inst.max_cost(), 1);
  const int64_t S = inst.total_supply();
  const int64_t dims = inst.n + inst.m + 2;
  if (S > (int64_t{1} << 62) / N / dims)
    return "supply * cost magnitude too large for 64-bit arithmetic";
  return std::nullopt;
}

Flow::Flow(int32_t n, int32_t m, std::vector<Entry> entries)
    : n_(n), m_(m), entries_(std::move(entries)), row_sums_(n, 0.0),
      col_sums_(m, 0.0) {
  for (const Entry& e : entries_) {
    if (e.i < 0 || e.i >= n_ || e.j < 0 || e.j >= m_)
      throw std::out_of_range("flow entry outside instance dimensions");
    if (!(e.amount > 0.0))
      throw std::invalid_argument("flow entries must carry positive amounts");
    row_sums_[e.i] += e.amount;
    col_sums_[e.j] += e.amount;
  }
}

bool Flow::integral(double tol) const {
  for (const Entry& e : entries_)
    if (std::abs(e.amount - std::round(e.amount)) > tol) return false;
  return true;
}

double objective(const OTInstance& inst, const Flow& flow) {
  double total = 0.0;
  for (const Flow::Entry& e : flow.entries())
    total += static_cast<double>(inst.cost_at(e.i, e.j)) * e.amount;
  return total;
}

int64_t objective_int(const OTInstance& inst, const Flow& flow) {
  if (!flow.integral())
    throw std::invalid_argument("objective_int requires an integral flow");
  int64_t total = 0;
  for (const Flow::Entry& e : flow.entries())
    total += inst.cost_at(e.i, e.j) * static_cast<int64_t>(std::llround(e.amount));
  return total;
}

double residue(const OTInstance& inst, const Flow& flow) {
  double r = 0.0;
  for (int32_t i = 0; i < inst.n; ++i)
    r += std::abs(static_cast<double>(inst.supplies[i]) - flow.row_sums()[i]);
  for (int32_t j = 0; j < inst.m; ++j)
    r += std::abs(static_cast<double>(inst.demands[j]) - flow.col_sums()[j]);
  return r;
}

SolveResult make_result(const OTInstance& inst, Flow flow, int64_t iterations,
                        bool exact, bool converged) {
  SolveResult res;
  res.objective = objective(inst, flow);
  res.residue = residue(inst, flow);
  res.flow = std::move(flow);
  res.iterations = iterations;
  res.exact = exact;
  res.converged = converged;
  return res;
}

}  // namespace ot
