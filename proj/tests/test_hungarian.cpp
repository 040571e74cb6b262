#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ot/hungarian.hpp"
#include "ot/netsimplex.hpp"
#include "oracle.hpp"
#include "testutil.hpp"

using namespace ot;
using namespace ot::testing;

namespace {

OTInstance unit_2x2() {
  OTInstance inst;
  inst.n = inst.m = 2;
  inst.cost = {1, 3, 2, 1};
  inst.supplies = {1, 1};
  inst.demands = {1, 1};
  return inst;
}

}  // namespace

TEST_CASE("quantize_costs: exact rescaling") {
  const QuantizedCosts q = quantize_costs({100, 200, 300, 400}, 4);
  CHECK(q.chat == std::vector<int64_t>{1, 2, 3, 4});
  CHECK(q.N == 400);
  CHECK(q.B == 4);
  CHECK(q.lossless);
}

TEST_CASE("quantize_costs: floor semantics") {
  const QuantizedCosts q = quantize_costs({7}, 2);
  CHECK(q.chat == std::vector<int64_t>{2});

  const QuantizedCosts lossy = quantize_costs({5, 7}, 2);
  CHECK(lossy.chat == std::vector<int64_t>{1, 2});  // floor(5*2/7) = 1
  CHECK(!lossy.lossless);
}

TEST_CASE("quantize_costs: B = N is the identity") {
  std::mt19937 rng(5);
  std::vector<int64_t> cost(30);
  for (int64_t& c : cost) c = rng() % 1000;
  cost[0] = 999;  // pin N
  const QuantizedCosts q = quantize_costs(cost, 999);
  CHECK(q.chat == cost);
  CHECK(q.lossless);
}

TEST_CASE("quantize_costs: all-zero matrix passes through") {
  const QuantizedCosts q = quantize_costs({0, 0}, 10);
  CHECK(q.chat == std::vector<int64_t>{0, 0});
  CHECK(q.N == 1);
  CHECK(q.lossless);
}

TEST_CASE("km: zero diagonal picks the identity matching") {
  OTInstance inst;
  inst.n = inst.m = 3;
  inst.cost = {0, 5, 5, 5, 0, 5, 5, 5, 0};
  inst.supplies = inst.demands = {1, 1, 1};
  Matching matching;
  const SolveResult res = solve_km(inst, nullptr, &matching);
  CHECK(res.objective == 0.0);
  for (int32_t i = 0; i < 3; ++i) CHECK(matching.row_to_col[i] == i);
}

TEST_CASE("km: 2x2 with known optimum") {
  const OTInstance inst = unit_2x2();
  Matching matching;
  DualPotentials duals;
  const SolveResult res = solve_km(inst, &duals, &matching);
  CHECK(res.objective == 2.0);
  CHECK(matching.row_to_col == std::vector<int32_t>{0, 1});
  CHECK(objective_int(inst, res.flow) == brute_force_assignment(inst));
  // dual objective matches primal at optimality
  int64_t dual_total = 0;
  for (int64_t u : duals.u) dual_total += u;
  for (int64_t v : duals.v) dual_total += v;
  CHECK(dual_total == 2);
}

TEST_CASE("km: requires a unit square") {
  OTInstance inst = unit_2x2();
  inst.supplies = {2, 1};
  inst.demands = {1, 2};
  CHECK_THROWS_WITH_AS(solve_km(inst),
                       doctest::Contains("unit-capacity square"),
                       std::invalid_argument);
}

TEST_CASE("km: exhaustive agreement on random unit instances") {
  std::mt19937 rng(11);
  for (int t = 0; t < 100; ++t) {
    const OTInstance inst =
        random_unit_instance(rng, 2 + static_cast<int32_t>(rng() % 5), 9);
    const SolveResult res = solve_km(inst);
    CHECK(objective_int(inst, res.flow) == brute_force_assignment(inst));
    CHECK(residue(inst, res.flow) == 0.0);
  }
}

TEST_CASE("km: duals stay feasible and tight on matched edges") {
  std::mt19937 rng(13);
  const OTInstance inst = random_unit_instance(rng, 50, 100000);
  DualPotentials duals;
  Matching matching;
  const SolveResult res = solve_km(inst, &duals, &matching);
  int64_t dual_total = 0;
  for (int32_t i = 0; i < inst.n; ++i) {
    for (int32_t j = 0; j < inst.m; ++j)
      CHECK(duals.u[i] + duals.v[j] <= inst.cost_at(i, j));
    CHECK(duals.u[i] + duals.v[matching.row_to_col[i]] ==
          inst.cost_at(i, matching.row_to_col[i]));
    dual_total += duals.u[i] + duals.v[i];
  }
  CHECK(static_cast<double>(dual_total) == res.objective);
}

TEST_CASE("batched km: lossless quantization reproduces km") {
  const OTInstance inst = unit_2x2();
  BatchedKMConfig cfg;
  cfg.B = inst.max_cost();  // B = N, identity quantization
  const SolveResult res = solve_batched_km(inst, cfg);
  CHECK(res.objective == 2.0);
  CHECK(res.exact);
}

TEST_CASE("batched km: constant costs finish in one phase") {
  OTInstance inst;
  inst.n = inst.m = 6;
  inst.cost.assign(36, 4);
  inst.supplies.assign(6, 1);
  inst.demands.assign(6, 1);
  const SolveResult res = solve_batched_km(inst);
  CHECK(res.objective == 24.0);
  CHECK(res.iterations == 1);
}

TEST_CASE("batched km: B = N*n matches km on random instances") {
  std::mt19937 rng(17);
  for (int t = 0; t < 100; ++t) {
    const OTInstance inst =
        random_unit_instance(rng, 2 + static_cast<int32_t>(rng() % 7), 50);
    BatchedKMConfig cfg;
    cfg.B = std::max<int64_t>(inst.max_cost(), 1) * inst.n;
    const SolveResult batched = solve_batched_km(inst, cfg);
    const SolveResult km = solve_km(inst);
    CHECK(batched.objective == km.objective);
    CHECK(batched.exact);
  }
}

TEST_CASE("batched km: objective within the quantization error bound") {
  std::mt19937 rng(19);
  for (int64_t B : {1, 2, 5, 10, 37}) {
    const OTInstance inst = random_unit_instance(rng, 40, 100000);
    BatchedKMConfig cfg;
    cfg.B = B;
    const SolveResult batched = solve_batched_km(inst, cfg);
    const SolveResult km = solve_km(inst);
    const double bound =
        km.objective +
        static_cast<double>(inst.n) * inst.max_cost() / static_cast<double>(B);
    CHECK(batched.objective >= km.objective);  // perfect matchings can't beat OPT
    CHECK(batched.objective <= bound);
  }
}

TEST_CASE("batched km: certificate against the quantized costs") {
  std::mt19937 rng(23);
  const OTInstance inst = random_unit_instance(rng, 60, 5000);
  BatchedKMConfig cfg;
  cfg.B = 64;
  DualPotentials duals;
  QuantizedCosts q;
  const SolveResult res = solve_batched_km(inst, cfg, &duals, &q);
  REQUIRE(q.chat.size() == inst.cost.size());
  for (int32_t i = 0; i < inst.n; ++i)
    for (int32_t j = 0; j < inst.m; ++j)
      CHECK(duals.u[i] + duals.v[j] <= q.chat[static_cast<size_t>(i) * inst.m + j]);
  for (const Flow::Entry& e : res.flow.entries())
    CHECK(duals.u[e.i] + duals.v[e.j] ==
          q.chat[static_cast<size_t>(e.i) * inst.m + e.j]);
}

TEST_CASE("batched km: iterations count phases plus dual adjustments") {
  std::mt19937 rng(29);
  const OTInstance inst = random_unit_instance(rng, 30, 1000);
  const SolveResult res = solve_batched_km(inst);
  CHECK(res.iterations >= 1);
  // at most n phases, and each search absorbs a column per adjustment
  CHECK(res.iterations <= static_cast<int64_t>(inst.n) * (inst.n + 1));
}

TEST_CASE("batched km: rejects non-unit instances") {
  OTInstance inst = unit_2x2();
  inst.supplies = {2, 1};
  inst.demands = {1, 2};
  CHECK_THROWS_AS(solve_batched_km(inst), std::invalid_argument);
}

TEST_CASE("km agrees with network simplex on a color-style instance") {
  const OTInstance inst = color_style_pair(9, "color_check");
  const SolveResult km = solve_km(inst);
  const SolveResult ns = solve_network_simplex(inst);
  CHECK(km.objective == ns.objective);
}
