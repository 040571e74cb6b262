#include "ot/scaling.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ot/netsimplex.hpp"

namespace ot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
  bool over(double budget) const { return budget > 0.0 && seconds() > budget; }
};

// Shared precomputation: normalized scaled costs A = eta * C / N row-major,
// plus the transpose so column passes stream memory linearly too.
struct Work {
  int32_t n, m;
  double total;
  std::vector<double> A, At;
  std::vector<double> log_r, log_c, r, c;
  std::vector<double> f, g;

  Work(const OTInstance& inst, double eta) : n(inst.n), m(inst.m) {
    const double N = std::max<int64_t>(inst.max_cost(), 1);
    const double scale = eta / N;
    const size_t nm = static_cast<size_t>(n) * m;
    A.resize(nm);
    At.resize(nm);
    for (int32_t i = 0; i < n; ++i)
      for (int32_t j = 0; j < m; ++j) {
        const double a = scale * inst.cost[static_cast<size_t>(i) * m + j];
        A[static_cast<size_t>(i) * m + j] = a;
        At[static_cast<size_t>(j) * n + i] = a;
      }
    r.assign(inst.supplies.begin(), inst.supplies.end());
    c.assign(inst.demands.begin(), inst.demands.end());
    log_r.resize(n);
    log_c.resize(m);
    for (int32_t i = 0; i < n; ++i) log_r[i] = std::log(r[i]);
    for (int32_t j = 0; j < m; ++j) log_c[j] = std::log(c[j]);
    f.assign(n, 0.0);
    g.assign(m, 0.0);
    total = 0.0;
    for (double v : r) total += v;
  }

  // log sum_k exp(d[k] - a[k]) over one stored row/column of scaled costs
  static double lse(const double* a, const double* d, int32_t len) {
    double hi = -kInf;
    for (int32_t k = 0; k < len; ++k) hi = std::max(hi, d[k] - a[k]);
    double s = 0.0;
    for (int32_t k = 0; k < len; ++k) s += std::exp(d[k] - a[k] - hi);
    return hi + std::log(s);
  }

  // dense plan entries, exact zeros dropped
  Flow materialize() const {
    size_t count = 0;
    std::vector<double> x(static_cast<size_t>(n) * m);
    for (int32_t i = 0; i < n; ++i) {
      const double* row = A.data() + static_cast<size_t>(i) * m;
      double* xrow = x.data() + static_cast<size_t>(i) * m;
      for (int32_t j = 0; j < m; ++j) {
        xrow[j] = std::exp(f[i] - row[j] + g[j]);
        if (xrow[j] > 0.0) ++count;
      }
    }
    std::vector<Flow::Entry> entries;
    entries.reserve(count);
    for (int32_t i = 0; i < n; ++i) {
      const double* xrow = x.data() + static_cast<size_t>(i) * m;
      for (int32_t j = 0; j < m; ++j)
        if (xrow[j] > 0.0) entries.push_back({i, j, xrow[j]});
    }
    return Flow(n, m, std::move(entries));
  }

  void assert_finite() const {
#ifndef NDEBUG
    for (double v : f) assert(std::isfinite(v));
    for (double v : g) assert(std::isfinite(v));
#endif
  }
};

SolveResult finish_scaling(const OTInstance& inst, const Work& w,
                           const ScalingConfig& cfg, int64_t iterations,
                           bool converged, const Clock& clock,
                           LogScalingState* state) {
  w.assert_finite();
  Flow flow = w.materialize();
  const double raw_residue = residue(inst, flow);
  if (cfg.round_output) flow = round_flow(inst, flow);
  SolveResult res = make_result(inst, std::move(flow), iterations,
                                /*exact=*/false, converged);
  res.wall_seconds = clock.seconds();
  if (state) {
    state->f = w.f;
    state->g = w.g;
    state->eta = cfg.eta;
    state->residue = raw_residue;
  }
  return res;
}

void require_scalable(const OTInstance& inst, const ScalingConfig& cfg,
                      const char* who) {
  if (auto err = validate_instance(inst))
    throw std::invalid_argument(std::string(who) + ": " + *err);
  if (!(cfg.eta > 0.0))
    throw std::invalid_argument(std::string(who) + ": eta must be positive");
  if (!(cfg.eps_fraction > 0.0))
    throw std::invalid_argument(std::string(who) +
                                ": eps_fraction must be positive");
}

}  // namespace

SolveResult sinkhorn(const OTInstance& inst, const ScalingConfig& config,
                     LogScalingState* state) {
  require_scalable(inst, config, "sinkhorn");
  const Clock clock;
  Work w(inst, config.eta);
  const int64_t max_iters =
      config.max_iterations > 0 ? config.max_iterations : 200000;
  const double stop = config.eps_fraction * w.total;

  std::vector<double> row_lse(w.n);
  int64_t iters = 0;
  bool converged = false;
  double resid = kInf;

  while (iters < max_iters) {
    for (int32_t i = 0; i < w.n; ++i)
      row_lse[i] = Work::lse(w.A.data() + static_cast<size_t>(i) * w.m,
                             w.g.data(), w.m);

    if (iters > 0) {
      // after the previous column pass the column sums are exact, so the
      // previous iterate's residue is the row deviation just computed
      resid = 0.0;
      for (int32_t i = 0; i < w.n; ++i)
        resid += std::abs(w.r[i] - std::exp(w.f[i] + row_lse[i]));
      if (resid <= stop) {
        converged = true;
        break;
      }
    }
    for (int32_t i = 0; i < w.n; ++i) w.f[i] = w.log_r[i] - row_lse[i];

    for (int32_t j = 0; j < w.m; ++j)
      w.g[j] = w.log_c[j] - Work::lse(w.At.data() + static_cast<size_t>(j) * w.n,
                                      w.f.data(), w.n);
    ++iters;
    if (clock.over(config.time_budget_s)) break;
  }

  return finish_scaling(inst, w, config, iters, converged, clock, state);
}

namespace {

// Max-discrepancy tracker for greenkhorn. Discrepancies live in flat arrays
// kept current by the update loop; the heap holds (value, id) snapshots,
// re-pushed only when an id moved by more than the dead band since its last
// push. Stale tops are dropped against the array on pop, and the whole heap
// is rebuilt once it outgrows 4 * (n + m) + 64 entries.
class DiscrepancyHeap {
 public:
  DiscrepancyHeap(std::vector<double>& disc, double dead_band)
      : disc_(disc), dead_band_(dead_band), last_push_(disc.size(), 0.0) {
    rebuild();
  }

  void touched(int32_t id) {
    if (std::abs(disc_[id] - last_push_[id]) <= dead_band_) return;
    push(id);
    if (heap_.size() > 4 * disc_.size() + 64) rebuild();
  }

  int32_t pop_max() {
    while (!heap_.empty()) {
      const Item top = heap_.front();
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.pop_back();
      if (std::abs(top.value - disc_[top.id]) <= dead_band_) return top.id;
    }
    rebuild();
    return pop_max();
  }

  void rebuild() {
    heap_.clear();
    for (int32_t id = 0; id < static_cast<int32_t>(disc_.size()); ++id) {
      heap_.push_back({disc_[id], id});
      last_push_[id] = disc_[id];
    }
    std::make_heap(heap_.begin(), heap_.end());
  }

 private:
  struct Item {
    double value;
    int32_t id;
    bool operator<(const Item& o) const { return value < o.value; }
  };

  void push(int32_t id) {
    heap_.push_back({disc_[id], id});
    std::push_heap(heap_.begin(), heap_.end());
    last_push_[id] = disc_[id];
  }

  std::vector<double>& disc_;
  double dead_band_;
  std::vector<double> last_push_;
  std::vector<Item> heap_;
};

}  // namespace

SolveResult greenkhorn(const OTInstance& inst, const ScalingConfig& config,
                       LogScalingState* state) {
  require_scalable(inst, config, "greenkhorn");
  const Clock clock;
  Work w(inst, config.eta);
  const int32_t n = w.n, m = w.m;
  const double stop = config.eps_fraction * w.total;
  const double dead_band = 1e-12 * w.total;
  const int64_t check_period = std::max(1, (n + m) / 2);
  const int64_t max_updates =
      config.max_iterations > 0 ? config.max_iterations
                                : 200000 * static_cast<int64_t>(check_period);

  std::vector<double> row_sum(n, 0.0), col_sum(m, 0.0);
  // disc[0..n) rows, disc[n..n+m) columns
  std::vector<double> disc(n + m, 0.0);

  auto refresh_sums = [&] {
    std::fill(row_sum.begin(), row_sum.end(), 0.0);
    std::fill(col_sum.begin(), col_sum.end(), 0.0);
    for (int32_t i = 0; i < n; ++i) {
      const double* a = w.A.data() + static_cast<size_t>(i) * m;
      double rs = 0.0;
      for (int32_t j = 0; j < m; ++j) {
        const double x = std::exp(w.f[i] - a[j] + w.g[j]);
        rs += x;
        col_sum[j] += x;
      }
      row_sum[i] = rs;
    }
    for (int32_t i = 0; i < n; ++i) disc[i] = std::abs(w.r[i] - row_sum[i]);
    for (int32_t j = 0; j < m; ++j)
      disc[n + j] = std::abs(w.c[j] - col_sum[j]);
  };
  refresh_sums();

  DiscrepancyHeap heap(disc, dead_band);
  std::vector<double> e_buf(std::max(n, m));

  // Rescaling one row changes every column sum; the deltas share the row's
  // stored exponentials, so the pass costs one exp per entry plus two scalar
  // amplitudes exp(f + hi), both bounded by the total mass.
  auto update_row = [&](int32_t i) {
    const double* a = w.A.data() + static_cast<size_t>(i) * m;
    double hi = -kInf;
    for (int32_t j = 0; j < m; ++j)
      hi = std::max(hi, w.g[j] - a[j]);
    double s = 0.0;
    for (int32_t j = 0; j < m; ++j) {
      e_buf[j] = std::exp(w.g[j] - a[j] - hi);
      s += e_buf[j];
    }
    const double f_new = w.log_r[i] - (hi + std::log(s));
    const double amp_delta = std::exp(f_new + hi) - std::exp(w.f[i] + hi);
    for (int32_t j = 0; j < m; ++j) {
      if (e_buf[j] == 0.0) continue;
      col_sum[j] += e_buf[j] * amp_delta;
      disc[n + j] = std::abs(w.c[j] - col_sum[j]);
      heap.touched(n + j);
    }
    w.f[i] = f_new;
    row_sum[i] = w.r[i];
    disc[i] = 0.0;
    heap.touched(i);
  };

  auto update_col = [&](int32_t j) {
    const double* a = w.At.data() + static_cast<size_t>(j) * n;
    double hi = -kInf;
    for (int32_t i = 0; i < n; ++i)
      hi = std::max(hi, w.f[i] - a[i]);
    double s = 0.0;
    for (int32_t i = 0; i < n; ++i) {
      e_buf[i] = std::exp(w.f[i] - a[i] - hi);
      s += e_buf[i];
    }
    const double g_new = w.log_c[j] - (hi + std::log(s));
    const double amp_delta = std::exp(g_new + hi) - std::exp(w.g[j] + hi);
    for (int32_t i = 0; i < n; ++i) {
      if (e_buf[i] == 0.0) continue;
      row_sum[i] += e_buf[i] * amp_delta;
      disc[i] = std::abs(w.r[i] - row_sum[i]);
      heap.touched(i);
    }
    w.g[j] = g_new;
    col_sum[j] = w.c[j];
    disc[n + j] = 0.0;
    heap.touched(n + j);
  };

  int64_t updates = 0, checks = 0;
  bool converged = false;
  while (true) {
    if (updates % check_period == 0) {
      if (++checks % 256 == 0) refresh_sums();
      double resid = 0.0;
      for (double d : disc) resid += d;
      if (resid <= stop) {
        converged = true;
        break;
      }
      if (clock.over(config.time_budget_s)) break;
    }
    if (updates >= max_updates) break;

    const int32_t id = heap.pop_max();
#ifndef NDEBUG
    const double top = *std::max_element(disc.begin(), disc.end());
    assert(disc[id] >= top - 1e-9 * w.total);
#endif
    if (id < n)
      update_row(id);
    else
      update_col(id - n);
    ++updates;
  }

  return finish_scaling(inst, w, config, updates, converged, clock, state);
}

double plan_entropy(const Flow& flow) {
  double h = 0.0;
  for (const Flow::Entry& e : flow.entries())
    if (e.amount > 0.0) h -= e.amount * std::log(e.amount);
  return h;
}

Flow round_flow(const OTInstance& inst, const Flow& flow) {
  if (flow.rows() != inst.n || flow.cols() != inst.m)
    throw std::invalid_argument("round_flow: flow does not match instance");
  const int32_t n = inst.n, m = inst.m;
  std::vector<double> x(static_cast<size_t>(n) * m, 0.0);
  for (const Flow::Entry& e : flow.entries())
    x[static_cast<size_t>(e.i) * m + e.j] += e.amount;

  // rows down to targets
  std::vector<double> row_sum(n, 0.0);
  for (int32_t i = 0; i < n; ++i) {
    const double* xr = x.data() + static_cast<size_t>(i) * m;
    for (int32_t j = 0; j < m; ++j) row_sum[i] += xr[j];
    const double scale =
        row_sum[i] > inst.supplies[i] ? inst.supplies[i] / row_sum[i] : 1.0;
    if (scale < 1.0) {
      double* xw = x.data() + static_cast<size_t>(i) * m;
      for (int32_t j = 0; j < m; ++j) xw[j] *= scale;
      row_sum[i] = inst.supplies[i];
    }
  }
  // columns down to targets
  std::vector<double> col_sum(m, 0.0);
  for (int32_t i = 0; i < n; ++i) {
    const double* xr = x.data() + static_cast<size_t>(i) * m;
    for (int32_t j = 0; j < m; ++j) col_sum[j] += xr[j];
  }
  std::vector<double> col_scale(m, 1.0);
  for (int32_t j = 0; j < m; ++j)
    if (col_sum[j] > inst.demands[j]) col_scale[j] = inst.demands[j] / col_sum[j];
  for (int32_t i = 0; i < n; ++i) {
    double* xw = x.data() + static_cast<size_t>(i) * m;
    for (int32_t j = 0; j < m; ++j) xw[j] *= col_scale[j];
  }

  // remaining deficits, filled by the rank-one product
  std::vector<double> err_r(n), err_c(m);
  std::fill(row_sum.begin(), row_sum.end(), 0.0);
  std::fill(col_sum.begin(), col_sum.end(), 0.0);
  for (int32_t i = 0; i < n; ++i) {
    const double* xr = x.data() + static_cast<size_t>(i) * m;
    for (int32_t j = 0; j < m; ++j) {
      row_sum[i] += xr[j];
      col_sum[j] += xr[j];
    }
  }
  double total_err = 0.0;
  for (int32_t i = 0; i < n; ++i) {
    err_r[i] = std::max(0.0, inst.supplies[i] - row_sum[i]);
    total_err += err_r[i];
  }
  for (int32_t j = 0; j < m; ++j)
    err_c[j] = std::max(0.0, inst.demands[j] - col_sum[j]);
  if (total_err > 0.0) {
    for (int32_t i = 0; i < n; ++i) {
      if (err_r[i] == 0.0) continue;
      double* xw = x.data() + static_cast<size_t>(i) * m;
      const double w = err_r[i] / total_err;
      for (int32_t j = 0; j < m; ++j) xw[j] += w * err_c[j];
    }
  }

  std::vector<Flow::Entry> entries;
  for (int32_t i = 0; i < n; ++i) {
    const double* xr = x.data() + static_cast<size_t>(i) * m;
    for (int32_t j = 0; j < m; ++j)
      if (xr[j] > 0.0) entries.push_back({i, j, xr[j]});
  }
  return Flow(n, m, std::move(entries));
}

double calibrate_eta(const OTInstance& inst, double target_ratio,
                     double exact_objective, const ScalingConfig& base) {
  if (!(target_ratio >= 1.0))
    throw std::invalid_argument("calibrate_eta: target_ratio must be >= 1");
  double exact = exact_objective;
  if (exact < 0.0) exact = solve_network_simplex(inst).objective;

  constexpr double kCap = 1e5;
  constexpr double kFloor = 1e-3;
  auto ratio_at = [&](double eta) {
    ScalingConfig cfg = base;
    cfg.eta = eta;
    const SolveResult res = sinkhorn(inst, cfg);
    if (!res.converged) return kInf;
    if (exact <= 0.0) return res.objective <= 0.0 ? 1.0 : kInf;
    return res.objective / exact;
  };

  double lo = 0.0, hi = 0.0;
  if (ratio_at(1.0) <= target_ratio) {
    hi = 1.0;
    while (hi > kFloor) {
      const double probe = hi / 2.0;
      if (ratio_at(probe) > target_ratio) {
        lo = probe;
        break;
      }
      hi = probe;
    }
    if (lo == 0.0) return hi;  // target holds all the way down to the floor
  } else {
    double eta = 1.0;
    while (true) {
      const double probe = std::min(eta * 2.0, kCap);
      if (ratio_at(probe) <= target_ratio) {
        lo = eta;
        hi = probe;
        break;
      }
      eta = probe;
      if (eta >= kCap) return kCap;  // unattainable under the cap
    }
  }

  while (hi / lo > 1.1) {
    const double mid = std::sqrt(lo * hi);
    if (ratio_at(mid) <= target_ratio)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace ot
