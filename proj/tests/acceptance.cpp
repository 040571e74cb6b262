// Acceptance gate for the solver suite. Runs nine independent checks and
// prints one PASS/FAIL line each; the process exits nonzero if any fail.
// Expensive calibrations persist to acceptance_calibration.csv (keyed by
// instance content hash) so re-runs skip straight to the measurements.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ot/auction.hpp"
#include "ot/bench.hpp"
#include "ot/core.hpp"
#include "ot/datasets.hpp"
#include "ot/hungarian.hpp"
#include "ot/netsimplex.hpp"
#include "ot/scaling.hpp"
#include "oracle.hpp"
#include "testutil.hpp"

using namespace ot;
using namespace ot::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double elapsed_s(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

double median3(const std::function<void()>& fn) {
  std::vector<double> t = {elapsed_s(fn), elapsed_s(fn), elapsed_s(fn)};
  std::sort(t.begin(), t.end());
  return t[1];
}

OTInstance random_weighted(std::mt19937& rng, int32_t n, int32_t m,
                           int64_t max_cost, int64_t max_cap) {
  std::uniform_int_distribution<int64_t> cost(0, max_cost), cap(1, max_cap);
  OTInstance inst;
  inst.n = n;
  inst.m = m;
  inst.name = "random";
  inst.cost.resize(static_cast<size_t>(n) * m);
  for (int64_t& c : inst.cost) c = cost(rng);
  inst.supplies.resize(n);
  inst.demands.resize(m);
  for (int64_t& s : inst.supplies) s = cap(rng);
  for (int64_t& d : inst.demands) d = cap(rng);
  const int64_t diff = inst.total_supply() - inst.total_demand();
  if (diff > 0)
    inst.demands[0] += diff;
  else
    inst.supplies[0] += -diff;
  return inst;
}

// The shared instance roster. Unit-square family for criteria 1/3/6a,
// weighted image/embedding stand-ins for 6b/6c.
struct Context {
  OTInstance cs100 = gen_circle_square(100);
  OTInstance cs900 = gen_circle_square(900);
  OTInstance color_a = color_style_pair(5, "color1024_a");
  OTInstance color_b = color_style_pair(6, "color1024_b");
  std::vector<OTInstance> images, embeds;
  CalibrationCache cache{"acceptance_calibration.csv"};

  Context() {
    images.push_back(image_style_pair(21, "img_a"));
    images.push_back(image_style_pair(22, "img_b"));
    images.push_back(image_style_pair(23, "img_c"));
    embeds.push_back(embedding_style_pair(31, 220, 180, "emb_a"));
    embeds.push_back(embedding_style_pair(32, 260, 240, "emb_b"));
  }

  std::vector<OTInstance> unit_suite() const {
    return {cs100, cs900, color_a, color_b};
  }
  std::vector<OTInstance> weighted_suite() const {
    std::vector<OTInstance> out = images;
    out.insert(out.end(), embeds.begin(), embeds.end());
    return out;
  }
};

Outcome criterion1(Context& ctx) {
  std::ostringstream detail;
  for (const OTInstance& inst : ctx.unit_suite()) {
    const int64_t ns = objective_int(inst, solve_network_simplex(inst).flow);
    const int64_t km = objective_int(inst, solve_km(inst).flow);

    BatchedKMConfig bcfg;
    bcfg.B = std::max<int64_t>(inst.max_cost(), 1) * inst.n;  // lossless
    const int64_t bkm = objective_int(inst, solve_batched_km(inst, bcfg).flow);

    AuctionScaledConfig acfg;
    acfg.epsilon_final = 0.9 / inst.n;
    const int64_t auc =
        objective_int(inst, solve_auction_scaled(inst, acfg).flow);

    if (ns != km || ns != bkm || ns != auc) {
      std::ostringstream err;
      err << inst.name << ": ns=" << ns << " km=" << km << " batched=" << bkm
          << " auction=" << auc;
      return {false, err.str()};
    }
    detail << inst.name << "=" << ns << " ";
  }
  return {true, "identical objectives: " + detail.str()};
}

Outcome criterion2(Context&) {
  std::mt19937 rng(2026);
  int unit_checked = 0;
  for (int t = 0; t < 200; ++t) {
    // every third draw is a unit square so the assignment-only solvers see
    // real coverage; the rest are general weighted rectangles
    const OTInstance inst =
        t % 3 == 0 ? random_unit_instance(rng, 1 + static_cast<int32_t>(rng() % 4), 9)
                   : random_instance(rng, 4, 9, 3);
    const int64_t opt = brute_force_optimum(inst);
    if (objective_int(inst, solve_network_simplex(inst).flow) != opt)
      return {false, "network simplex mismatch at trial " + std::to_string(t)};
    if (!inst.unit_caps()) continue;
    ++unit_checked;
    if (objective_int(inst, solve_km(inst).flow) != opt)
      return {false, "km mismatch at trial " + std::to_string(t)};
    BatchedKMConfig bcfg;
    bcfg.B = std::max<int64_t>(inst.max_cost(), 1) * inst.n;
    if (objective_int(inst, solve_batched_km(inst, bcfg).flow) != opt)
      return {false, "batched km mismatch at trial " + std::to_string(t)};
    AuctionConfig acfg;
    acfg.epsilon = 0.9 / inst.n;
    if (objective_int(inst, solve_auction(inst, acfg).flow) != opt)
      return {false, "auction mismatch at trial " + std::to_string(t)};
  }
  return {true, "200 instances vs exhaustive enumeration, " +
                    std::to_string(unit_checked) + " unit squares"};
}

Outcome criterion3(Context& ctx) {
  const std::vector<OTInstance> suite = ctx.unit_suite();
  const auto entries = calibrate_all(suite, &ctx.cache);
  for (const CalibrationEntry& e : entries)
    if (!e.ok) return {false, e.instance + ": calibration failed: " + e.error};

  BenchConfig bcfg;
  bcfg.repeats = 1;
  bcfg.timeout_s = 1200.0;
  double worst = 0.0;
  std::string worst_at;
  for (size_t k = 0; k < suite.size(); ++k) {
    std::vector<SolverSpec> solvers;
    for (const char* name :
         {"batched_km", "sinkhorn", "greenkhorn", "auction_scaled"})
      solvers.push_back(make_solver(name, &entries[k]));
    for (const BenchRecord& r : run_suite({suite[k]}, solvers, bcfg)) {
      if (!r.applicable || !r.converged)
        return {false, r.instance + "/" + r.solver + ": did not finish"};
      if (r.ratio > worst) {
        worst = r.ratio;
        worst_at = r.instance + "/" + r.solver;
      }
      if (r.ratio > 1.1 + 1e-9) {
        return {false, r.instance + "/" + r.solver + ": ratio " + fmt(r.ratio)};
      }
    }
  }
  return {true, "all ratios <= 1.1, worst " + fmt(worst) + " at " + worst_at};
}

Outcome criterion4(Context&) {
  std::mt19937 rng(404);
  double worst_rel = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int32_t n = 5 + static_cast<int32_t>(rng() % 16);
    const int32_t m = 5 + static_cast<int32_t>(rng() % 16);
    const OTInstance inst = random_weighted(rng, n, m, 1000, 7);
    std::uniform_real_distribution<double> jitter(0.001, 0.05);
    const Flow before = perturbed_feasible_flow(rng, inst, jitter(rng));
    const double eps = residue(inst, before);
    const Flow after = round_flow(inst, before);
    const double S = static_cast<double>(inst.total_supply());
    if (residue(inst, after) > 1e-9 * S)
      return {false, "rounded flow not feasible at trial " + std::to_string(t)};
    const double moved = std::abs(objective(inst, after) -
                                  objective(inst, before));
    const double bound = eps * inst.max_cost();
    if (moved > bound + 1e-9)
      return {false, "objective moved " + fmt(moved) + " > bound " +
                         fmt(bound) + " at trial " + std::to_string(t)};
    if (bound > 0) worst_rel = std::max(worst_rel, moved / bound);
  }
  return {true, "100 flows repaired; worst |dObj| / (eps*N) = " +
                    fmt(worst_rel)};
}

Outcome criterion5(Context&) {
  for (int64_t k : {100, 900, 2500, 4900}) {
    const OTInstance cs = gen_circle_square(k);
    if (cs.n != k || cs.m != k)
      return {false, "cs" + std::to_string(k) + ": wrong dimensions"};
    if (!cs.unit_caps())
      return {false, "cs" + std::to_string(k) + ": not unit capacities"};
    if (cs.total_demand() != k)
      return {false, "cs" + std::to_string(k) + ": total demand != k"};
    if (cs.name != "cs" + std::to_string(k))
      return {false, "unexpected name " + cs.name};
  }

  const GrayImage a = synthetic_digit(77), b = synthetic_digit(78);
  int64_t nz_a = 0, nz_b = 0;
  for (int32_t p : a.pixels) nz_a += p != 0;
  for (int32_t p : b.pixels) nz_b += p != 0;
  PointCloudDistribution da = image_to_distribution(a);
  PointCloudDistribution db = image_to_distribution(b);
  rebalance_totals(da, db);
  const OTInstance img = build_instance(da, db, {kImageScale}, "img_pair");
  if (img.n != nz_a || img.m != nz_b)
    return {false, "image node counts " + std::to_string(img.n) + "x" +
                       std::to_string(img.m) + " != nonzero pixels " +
                       std::to_string(nz_a) + "x" + std::to_string(nz_b)};
  if (img.total_supply() != img.total_demand())
    return {false, "image pair not balanced"};
  return {true, "cs{100,900,2500,4900} structure ok; image pair " +
                    std::to_string(img.n) + "x" + std::to_string(img.m) +
                    ", balanced"};
}

// 6a helper: median wall time of a scaling solver capped by a budget. A run
// that hits the cap contributes its elapsed time, a lower bound on the true
// cost, so capping can only understate the batched advantage.
double scaling_median_capped(const OTInstance& inst, double eta, bool green,
                             double budget) {
  ScalingConfig cfg;
  cfg.eta = eta;
  cfg.round_output = true;
  cfg.time_budget_s = budget;
  return median3([&] { (void)(green ? greenkhorn(inst, cfg)
                                    : sinkhorn(inst, cfg)); });
}

Outcome criterion6(Context& ctx) {
  std::ostringstream detail;

  // (a) batched KM vs both scaling solvers on cs900 and cs2500, >= 10x
  const CalibrationEntry* e900 =
      ctx.cache.find("cs900", instance_content_hash(ctx.cs900));
  if (!e900) return {false, "cs900 calibration missing (criterion 3 ran?)"};
  const OTInstance cs2500 = gen_circle_square(2500);
  const double exact2500 = solve_network_simplex(cs2500).objective;
  int64_t b2500 = 0;
  for (int64_t B = 1;; B *= 2) {
    BatchedKMConfig bcfg;
    bcfg.B = B;
    if (solve_batched_km(cs2500, bcfg).objective <= 1.1 * exact2500) {
      b2500 = B;
      break;
    }
  }

  struct Pair {
    const OTInstance* inst;
    int64_t B;
    double eta;
  };
  const Pair big[] = {{&ctx.cs900, e900->B, e900->eta},
                      {&cs2500, b2500, e900->eta}};
  for (const Pair& p : big) {
    BatchedKMConfig bcfg;
    bcfg.B = p.B;
    const double t_batched =
        std::max(median3([&] { solve_batched_km(*p.inst, bcfg); }), 1e-4);
    const double budget = std::max(2.0, 12.0 * t_batched);
    const double t_sink = scaling_median_capped(*p.inst, p.eta, false, budget);
    const double t_green = scaling_median_capped(*p.inst, p.eta, true, budget);
    detail << p.inst->name << " batched=" << fmt(t_batched)
           << "s sinkhorn=" << fmt(t_sink) << "s greenkhorn=" << fmt(t_green)
           << "s; ";
    if (t_sink < 10.0 * t_batched || t_green < 10.0 * t_batched)
      return {false, "10x ordering failed: " + detail.str()};
  }

  // (b) greenkhorn >= sinkhorn on every image/embedding-style instance,
  // (c) network simplex <= sinkhorn on every one of them (all non-unit)
  const std::vector<OTInstance> weighted = ctx.weighted_suite();
  const auto entries = calibrate_all(weighted, &ctx.cache);
  for (size_t k = 0; k < weighted.size(); ++k) {
    if (!entries[k].ok)
      return {false, weighted[k].name + ": calibration failed"};
    const OTInstance& inst = weighted[k];
    ScalingConfig cfg;
    cfg.eta = entries[k].eta;
    cfg.round_output = true;
    const double t_sink = median3([&] { sinkhorn(inst, cfg); });
    const double t_green = median3([&] { greenkhorn(inst, cfg); });
    const double t_ns = median3([&] { solve_network_simplex(inst); });
    detail << inst.name << " ns=" << fmt(t_ns) << "s sink=" << fmt(t_sink)
           << "s green=" << fmt(t_green) << "s; ";
    if (t_green < t_sink)
      return {false,
              "greenkhorn beat sinkhorn on " + inst.name + ": " + detail.str()};
    if (t_ns > t_sink)
      return {false, "network simplex slower than sinkhorn on " + inst.name +
                         ": " + detail.str()};
  }
  return {true, detail.str()};
}

Outcome criterion7(Context& ctx) {
  const double exact = solve_network_simplex(ctx.cs100).objective;
  const std::vector<double> grid = {8, 16, 32, 64, 128, 256, 512, 1024};
  const auto rows = eta_sweep(ctx.cs100, grid, exact);

  for (const std::string solver : {"sinkhorn", "greenkhorn"}) {
    std::vector<const SweepRow*> mine;
    for (const SweepRow& r : rows)
      if (r.solver == solver) mine.push_back(&r);
    for (const SweepRow* r : mine)
      if (!r->converged)
        return {false, solver + " did not converge at eta " + fmt(r->eta)};
    for (size_t k = 1; k < mine.size(); ++k) {
      if (mine[k]->ratio > mine[k - 1]->ratio * (1 + 1e-6))
        return {false, solver + ": ratio rose from eta " +
                           fmt(mine[k - 1]->eta) + " to " + fmt(mine[k]->eta)};
      // tighter achieved ratio must not come cheaper
      if (mine[k]->ratio < mine[k - 1]->ratio * (1 - 1e-9) &&
          mine[k]->iterations < mine[k - 1]->iterations)
        return {false, solver + ": iterations dropped while the ratio " +
                           "tightened at eta " + fmt(mine[k]->eta)};
    }
  }
  return {true, "both solvers: ratio non-increasing, iterations " +
                    std::string("non-decreasing as the ratio tightens")};
}

Outcome criterion8(Context&) {
  std::mt19937 rng(808);
  const OTInstance big = random_weighted(rng, 50, 50, 100000, 3);
  ScalingConfig cfg;
  cfg.eta = 1e5;
  cfg.max_iterations = 20000;
  LogScalingState state;
  const SolveResult res = sinkhorn(big, cfg, &state);
  if (!std::isfinite(res.objective) || !std::isfinite(res.residue))
    return {false, "non-finite result at eta 1e5"};
  for (double v : state.f)
    if (!std::isfinite(v)) return {false, "non-finite f at eta 1e5"};
  for (double v : state.g)
    if (!std::isfinite(v)) return {false, "non-finite g at eta 1e5"};
  for (const Flow::Entry& e : res.flow.entries())
    if (!std::isfinite(e.amount)) return {false, "non-finite flow at eta 1e5"};

  // log-domain iterates vs a direct dense replica of the same passes
  const OTInstance small = random_weighted(rng, 10, 10, 100, 4);
  const double N = std::max<int64_t>(small.max_cost(), 1);
  double worst = 0.0;
  for (double eta : {5.0, 30.0}) {
    ScalingConfig scfg;
    scfg.eta = eta;
    scfg.eps_fraction = 1e-15;
    scfg.max_iterations = 40;
    LogScalingState s;
    const SolveResult run = sinkhorn(small, scfg, &s);

    std::vector<double> K(100), u(10, 1.0), v(10, 1.0);
    for (int32_t i = 0; i < 10; ++i)
      for (int32_t j = 0; j < 10; ++j)
        K[i * 10 + j] = std::exp(-eta * small.cost_at(i, j) / N);
    for (int64_t it = 0; it < run.iterations; ++it) {
      for (int32_t i = 0; i < 10; ++i) {
        double dot = 0.0;
        for (int32_t j = 0; j < 10; ++j) dot += K[i * 10 + j] * v[j];
        u[i] = small.supplies[i] / dot;
      }
      for (int32_t j = 0; j < 10; ++j) {
        double dot = 0.0;
        for (int32_t i = 0; i < 10; ++i) dot += K[i * 10 + j] * u[i];
        v[j] = small.demands[j] / dot;
      }
    }
    for (int32_t i = 0; i < 10; ++i)
      for (int32_t j = 0; j < 10; ++j) {
        const double direct = u[i] * K[i * 10 + j] * v[j];
        const double log_dom =
            std::exp(s.f[i] - eta * small.cost_at(i, j) / N + s.g[j]);
        const double rel =
            std::abs(log_dom - direct) / std::max(direct, 1e-300);
        worst = std::max(worst, rel);
      }
  }
  if (worst > 1e-10)
    return {false, "log vs direct relative error " + fmt(worst)};
  return {true, "finite at eta 1e5; log vs direct max rel err " + fmt(worst)};
}

Outcome criterion9(Context& ctx) {
  std::mt19937 rng(909);

  // network simplex: reduced costs >= 0 everywhere, == 0 where flow runs
  for (const OTInstance& inst :
       {random_weighted(rng, 60, 45, 500, 9), random_weighted(rng, 200, 150, 2000, 5),
        ctx.cs100}) {
    NetSimplexCertificate cert;
    const SolveResult res = solve_network_simplex(inst, {}, &cert);
    for (int32_t i = 0; i < inst.n; ++i)
      for (int32_t j = 0; j < inst.m; ++j)
        if (inst.cost_at(i, j) + cert.potentials[i] -
                cert.potentials[inst.n + j] <
            0)
          return {false, inst.name + ": negative reduced cost"};
    for (const Flow::Entry& e : res.flow.entries())
      if (inst.cost_at(e.i, e.j) + cert.potentials[e.i] -
              cert.potentials[inst.n + e.j] !=
          0)
        return {false, inst.name + ": flow on a non-tight arc"};
  }

  const OTInstance unit = random_unit_instance(rng, 200, 100000);

  // km: dual feasibility, tight matched edges
  {
    DualPotentials duals;
    const SolveResult res = solve_km(unit, &duals);
    for (int32_t i = 0; i < unit.n; ++i)
      for (int32_t j = 0; j < unit.n; ++j)
        if (duals.u[i] + duals.v[j] > unit.cost_at(i, j))
          return {false, "km: infeasible duals"};
    for (const Flow::Entry& e : res.flow.entries())
      if (duals.u[e.i] + duals.v[e.j] != unit.cost_at(e.i, e.j))
        return {false, "km: matched edge not tight"};
  }

  // batched km: same certificate against the quantized costs
  {
    BatchedKMConfig cfg;
    cfg.B = 64;
    DualPotentials duals;
    QuantizedCosts q;
    const SolveResult res = solve_batched_km(unit, cfg, &duals, &q);
    for (int32_t i = 0; i < unit.n; ++i)
      for (int32_t j = 0; j < unit.n; ++j)
        if (duals.u[i] + duals.v[j] >
            q.chat[static_cast<size_t>(i) * unit.n + j])
          return {false, "batched km: infeasible duals"};
    for (const Flow::Entry& e : res.flow.entries())
      if (duals.u[e.i] + duals.v[e.j] !=
          q.chat[static_cast<size_t>(e.i) * unit.n + e.j])
        return {false, "batched km: matched edge not tight"};
  }

  // auction: epsilon-complementary slackness at the reported prices
  {
    AuctionConfig cfg;
    cfg.epsilon = 2.5;
    std::vector<double> prices;
    const SolveResult res = solve_auction(unit, cfg, &prices);
    for (const Flow::Entry& e : res.flow.entries()) {
      const double mine = -static_cast<double>(unit.cost_at(e.i, e.j)) -
                          prices[e.j];
      double best = -1e300;
      for (int32_t j = 0; j < unit.n; ++j)
        best = std::max(best,
                        -static_cast<double>(unit.cost_at(e.i, j)) - prices[j]);
      if (mine < best - cfg.epsilon - 1e-9)
        return {false, "auction: epsilon-CS violated"};
    }
  }
  return {true, "network simplex, km, batched km, auction certificates hold "
                "up to n = 200"};
}

}  // namespace

int main() {
  std::printf("acceptance suite: %s\n", environment_summary().c_str());
  std::fflush(stdout);

  Context ctx;
  const std::vector<std::pair<const char*, std::function<Outcome(Context&)>>>
      criteria = {
          {"exactness cross-check on unit instances", criterion1},
          {"brute-force oracle on random instances", criterion2},
          {"calibrated 1.1-approximation", criterion3},
          {"rounding repair bound", criterion4},
          {"dataset structure", criterion5},
          {"runtime orderings", criterion6},
          {"eta sweep monotonicity", criterion7},
          {"log-domain stabilization", criterion8},
          {"optimality certificates", criterion9},
      };

  bool all = true;
  for (size_t k = 0; k < criteria.size(); ++k) {
    Outcome out;
    double secs = 0.0;
    try {
      secs = elapsed_s([&] { out = criteria[k].second(ctx); });
    } catch (const std::exception& ex) {
      out = {false, std::string("exception: ") + ex.what()};
    }
    std::printf("criterion %zu: %s (%s) [%s, %.1fs]\n", k + 1,
                out.pass ? "PASS" : "FAIL", out.detail.c_str(),
                criteria[k].first, secs);
    std::fflush(stdout);
    all &= out.pass;
  }
  std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
