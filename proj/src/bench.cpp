#include "ot/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ot/auction.hpp"
#include "ot/hungarian.hpp"
#include "ot/netsimplex.hpp"

namespace ot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double now_between(const std::chrono::steady_clock::time_point& a,
                   const std::chrono::steady_clock::time_point& b) {
  return std::chrono::duration<double>(b - a).count();
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const size_t k = xs.size();
  if (k == 0) return 0.0;
  return k % 2 ? xs[k / 2] : 0.5 * (xs[k / 2 - 1] + xs[k / 2]);
}

std::string fmt_g(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double safe_ratio(double objective, double exact) {
  if (std::isnan(objective)) return kNaN;
  if (exact > 0.0) return objective / exact;
  return objective <= 0.0 ? 1.0 : kInf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<BenchRecord> run_suite(const std::vector<OTInstance>& instances,
                                   const std::vector<SolverSpec>& solvers,
                                   const BenchConfig& config) {
  if (config.repeats < 1)
    throw std::invalid_argument("run_suite: repeats must be >= 1");
  std::vector<BenchRecord> records;
  records.reserve(instances.size() * solvers.size());

  for (const OTInstance& inst : instances) {
    const double exact = solve_network_simplex(inst).objective;

    for (const SolverSpec& spec : solvers) {
      BenchRecord rec;
      rec.instance = inst.name;
      rec.solver = spec.name;
      rec.params = spec.params;
      rec.n = inst.n;
      rec.m = inst.m;
      rec.exact_objective = exact;
      rec.objective = kNaN;
      rec.ratio = kNaN;

      if (spec.unit_only && !inst.unit_caps()) {
        rec.applicable = false;
        records.push_back(std::move(rec));
        continue;
      }

      std::vector<double> times;
      bool finished = true;
      for (int rep = 0; rep < config.repeats; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        SolveResult res = spec.run(inst, config.timeout_s);
        const auto t1 = std::chrono::steady_clock::now();
        const double wall = now_between(t0, t1);
        times.push_back(wall);
        if (rep == 0) {
          rec.iterations = res.iterations;
          if (res.converged && wall <= config.timeout_s) {
            rec.objective = res.objective;
            rec.ratio = safe_ratio(res.objective, exact);
          }
        }
        if (!res.converged || wall > config.timeout_s) {
          finished = false;
          break;  // flagged; repeating a dead run buys nothing
        }
      }
      rec.converged = finished;
      if (!finished) {
        rec.objective = kNaN;
        rec.ratio = kNaN;
      }
      rec.wall_seconds = median(times);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::vector<ProfileCurve> performance_profile(
    const std::vector<BenchRecord>& records) {
  if (records.empty())
    throw std::invalid_argument("performance_profile: no records");

  std::vector<std::string> solvers, instances;
  for (const BenchRecord& r : records) {
    if (std::find(solvers.begin(), solvers.end(), r.solver) == solvers.end())
      solvers.push_back(r.solver);
    if (std::find(instances.begin(), instances.end(), r.instance) ==
        instances.end())
      instances.push_back(r.instance);
  }

  bool shared = false;
  for (const std::string& inst : instances) {
    int applicable = 0;
    for (const BenchRecord& r : records)
      if (r.instance == inst && r.applicable) ++applicable;
    if (applicable >= 2) shared = true;
  }
  if (solvers.size() < 2 || !shared)
    throw std::invalid_argument(
        "performance_profile: need at least two solvers sharing a dataset");

  // factor[s][d]; infinity for unfinished or inapplicable runs
  std::map<std::string, std::map<std::string, double>> factor;
  for (const std::string& inst : instances) {
    double best = kInf;
    for (const BenchRecord& r : records)
      if (r.instance == inst && r.applicable && r.converged)
        best = std::min(best, r.wall_seconds);
    best = std::max(best, 1e-12);  // clock resolution guard
    for (const BenchRecord& r : records) {
      if (r.instance != inst) continue;
      const double f = (r.applicable && r.converged)
                           ? std::max(1.0, r.wall_seconds / best)
                           : kInf;
      factor[r.solver][inst] = f;
    }
  }

  std::set<double> realized;
  for (const auto& [s, per_inst] : factor)
    for (const auto& [d, f] : per_inst)
      if (std::isfinite(f)) realized.insert(f);

  std::vector<ProfileCurve> curves;
  for (const std::string& s : solvers) {
    ProfileCurve curve;
    curve.solver = s;
    double fmax = 0.0;
    for (const auto& [d, f] : factor[s])
      if (std::isfinite(f)) fmax = std::max(fmax, f);
    for (double f : realized) {
      if (f > fmax) break;
      int count = 0;
      for (const auto& [d, fd] : factor[s])
        if (fd <= f) ++count;
      curve.points.emplace_back(f, count);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<SweepRow> eta_sweep(const OTInstance& inst,
                                const std::vector<double>& etas,
                                double exact_objective,
                                const ScalingConfig& base) {
  if (etas.empty()) throw std::invalid_argument("eta_sweep: empty grid");
  double exact = exact_objective;
  if (exact < 0.0) exact = solve_network_simplex(inst).objective;

  std::vector<SweepRow> rows;
  for (double eta : etas) {
    ScalingConfig cfg = base;
    cfg.eta = eta;
    cfg.round_output = true;  // compare feasible objectives across the grid
    for (int which = 0; which < 2; ++which) {
      const SolveResult res =
          which == 0 ? sinkhorn(inst, cfg) : greenkhorn(inst, cfg);
      SweepRow row;
      row.eta = eta;
      row.solver = which == 0 ? "sinkhorn" : "greenkhorn";
      row.ratio = safe_ratio(res.objective, exact);
      row.iterations = res.iterations;
      row.converged = res.converged;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

uint64_t instance_content_hash(const OTInstance& inst) {
  uint64_t h = 14695981039346656037ull;
  auto mix = [&h](int64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<uint64_t>(v >> (8 * b)) & 0xFF;
      h *= 1099511628211ull;
    }
  };
  mix(inst.n);
  mix(inst.m);
  for (int64_t v : inst.cost) mix(v);
  for (int64_t v : inst.supplies) mix(v);
  for (int64_t v : inst.demands) mix(v);
  return h;
}

CalibrationCache::CalibrationCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("instance,", 0) == 0) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 8) continue;
    CalibrationEntry e;
    e.instance = f[0];
    e.content_hash = std::stoull(f[1], nullptr, 16);
    e.eta = f[2].empty() ? 0.0 : std::stod(f[2]);
    e.B = f[3].empty() ? 0 : std::stoll(f[3]);
    e.auction_eps = f[4].empty() ? 0.0 : std::stod(f[4]);
    e.has_assignment_params = f[5] == "1";
    e.ok = f[6] == "1";
    e.error = f[7];
    entries_.push_back(std::move(e));
  }
}

const CalibrationEntry* CalibrationCache::find(const std::string& name,
                                               uint64_t hash) const {
  for (const CalibrationEntry& e : entries_)
    if (e.instance == name && e.content_hash == hash) return &e;
  return nullptr;
}

void CalibrationCache::put(const CalibrationEntry& entry) {
  for (CalibrationEntry& e : entries_) {
    if (e.instance == entry.instance) {
      e = entry;
      return;
    }
  }
  entries_.push_back(entry);
}

void CalibrationCache::save() const {
  if (path_.empty()) return;
  std::ofstream out(path_);
  if (!out) throw std::runtime_error("cannot write " + path_);
  out << "# " << environment_summary() << "\n";
  out << "instance,hash,eta,B,auction_eps,has_assignment_params,ok,error\n";
  char hex[32];
  for (const CalibrationEntry& e : entries_) {
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(e.content_hash));
    std::string error = e.error;
    std::replace(error.begin(), error.end(), ',', ';');
    out << e.instance << ',' << hex << ',' << fmt_g(e.eta) << ',' << e.B << ','
        << fmt_g(e.auction_eps) << ',' << (e.has_assignment_params ? 1 : 0)
        << ',' << (e.ok ? 1 : 0) << ',' << error << "\n";
  }
}

namespace {

// Smallest power-of-two quantization level whose batched KM objective meets
// the target; capped at B = N * n, which is lossless and therefore exact.
int64_t calibrate_batch_level(const OTInstance& inst, double exact,
                              double target_ratio) {
  const int64_t cap = std::max<int64_t>(1, inst.max_cost()) * inst.n;
  for (int64_t B = 1;; B *= 2) {
    if (B >= cap) return cap;
    BatchedKMConfig cfg;
    cfg.B = B;
    const SolveResult res = solve_batched_km(inst, cfg);
    if (res.objective <= target_ratio * exact * (1 + 1e-12)) return B;
  }
}

// Largest epsilon_final (doubling grid from the always-exact 1/(n+1)) for
// which the scaled auction still returns the exact objective.
double calibrate_auction_eps(const OTInstance& inst, int64_t exact_int) {
  const double N = std::max<int64_t>(inst.max_cost(), 1);
  double eps = 1.0 / (inst.n + 1);
  double best = 0.0;
  while (eps <= N) {
    AuctionScaledConfig cfg;
    cfg.epsilon_final = eps;
    const SolveResult res = solve_auction_scaled(inst, cfg);
    if (!res.converged || std::llround(res.objective) != exact_int) break;
    best = eps;
    eps *= 2.0;
  }
  if (best == 0.0)
    throw std::runtime_error("auction calibration failed at epsilon = 1/(n+1)");
  return best;
}

}  // namespace

std::vector<CalibrationEntry> calibrate_all(
    const std::vector<OTInstance>& instances, CalibrationCache* cache,
    double target_ratio) {
  std::vector<CalibrationEntry> out;
  bool dirty = false;
  for (const OTInstance& inst : instances) {
    const uint64_t hash = instance_content_hash(inst);
    if (cache) {
      if (const CalibrationEntry* hit = cache->find(inst.name, hash)) {
        out.push_back(*hit);
        continue;
      }
    }

    CalibrationEntry e;
    e.instance = inst.name;
    e.content_hash = hash;
    try {
      const double exact = solve_network_simplex(inst).objective;
      ScalingConfig base;
      base.round_output = true;
      e.eta = calibrate_eta(inst, target_ratio, exact, base);

      // one eta serves both scaling solvers; nudge it up the 15% grid step
      // if greenkhorn's stopping point lands above the target
      for (int bump = 0; bump < 8; ++bump) {
        ScalingConfig cfg = base;
        cfg.eta = e.eta;
        const SolveResult gk = greenkhorn(inst, cfg);
        const SolveResult sk = sinkhorn(inst, cfg);
        if (gk.converged && sk.converged &&
            safe_ratio(gk.objective, exact) <= target_ratio &&
            safe_ratio(sk.objective, exact) <= target_ratio)
          break;
        if (bump == 7 || e.eta >= 1e5)
          throw std::runtime_error("eta calibration failed, best ratio " +
                                   fmt_g(safe_ratio(sk.objective, exact)));
        e.eta = std::min(e.eta * 1.15, 1e5);
      }

      if (inst.unit_caps()) {
        e.has_assignment_params = true;
        e.B = calibrate_batch_level(inst, exact, target_ratio);
        e.auction_eps = calibrate_auction_eps(inst, std::llround(exact));
      }
      e.ok = true;
    } catch (const std::exception& ex) {
      e.ok = false;
      e.error = ex.what();
    }
    out.push_back(e);
    if (cache) {
      cache->put(e);
      dirty = true;
    }
  }
  if (cache && dirty) cache->save();
  return out;
}

SolverSpec make_solver(const std::string& name,
                       const CalibrationEntry* calib) {
  SolverSpec spec;
  spec.name = name;

  if (name == "netsimplex") {
    spec.run = [](const OTInstance& inst, double budget) {
      NetSimplexConfig cfg;
      cfg.time_budget_s = budget;
      return solve_network_simplex(inst, cfg);
    };
    return spec;
  }
  if (name == "km") {
    spec.unit_only = true;
    spec.run = [](const OTInstance& inst, double budget) {
      return solve_km(inst, nullptr, nullptr, budget);
    };
    return spec;
  }
  if (name == "batched_km") {
    spec.unit_only = true;
    const int64_t B = (calib && calib->B > 0) ? calib->B : 100;
    spec.params = "B=" + std::to_string(B);
    spec.run = [B](const OTInstance& inst, double budget) {
      BatchedKMConfig cfg;
      cfg.B = B;
      cfg.time_budget_s = budget;
      return solve_batched_km(inst, cfg);
    };
    return spec;
  }
  if (name == "auction") {
    spec.unit_only = true;
    const double eps = (calib && calib->auction_eps > 0) ? calib->auction_eps
                                                         : 1.0;
    spec.params = "epsilon=" + fmt_g(eps);
    spec.run = [eps](const OTInstance& inst, double budget) {
      AuctionConfig cfg;
      cfg.epsilon = eps;
      cfg.time_budget_s = budget;
      return solve_auction(inst, cfg);
    };
    return spec;
  }
  if (name == "auction_scaled") {
    spec.unit_only = true;
    const double eps_final =
        (calib && calib->auction_eps > 0) ? calib->auction_eps : 0.0;
    spec.params =
        eps_final > 0 ? "epsilon_final=" + fmt_g(eps_final) : "epsilon_final=exact";
    spec.run = [eps_final](const OTInstance& inst, double budget) {
      AuctionScaledConfig cfg;
      cfg.epsilon_final = eps_final;
      cfg.time_budget_s = budget;
      return solve_auction_scaled(inst, cfg);
    };
    return spec;
  }
  if (name == "sinkhorn" || name == "greenkhorn") {
    const double eta = (calib && calib->eta > 0) ? calib->eta : 100.0;
    spec.params = "eta=" + fmt_g(eta) + ";round=1";
    const bool green = name == "greenkhorn";
    spec.run = [eta, green](const OTInstance& inst, double budget) {
      ScalingConfig cfg;
      cfg.eta = eta;
      cfg.round_output = true;  // records compare feasible objectives
      cfg.time_budget_s = budget;
      return green ? greenkhorn(inst, cfg) : sinkhorn(inst, cfg);
    };
    return spec;
  }
  throw std::invalid_argument("unknown solver: " + name);
}

std::string environment_summary() {
  std::string cpu = "unknown cpu";
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const size_t colon = line.find(':');
      if (colon != std::string::npos) {
        cpu = line.substr(colon + 1);
        const size_t start = cpu.find_first_not_of(" \t");
        cpu = start == std::string::npos ? "unknown cpu" : cpu.substr(start);
      }
      break;
    }
  }
#if defined(__clang__)
  const std::string compiler = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  const std::string compiler = std::string("g++ ") + __VERSION__;
#else
  const std::string compiler = "unknown compiler";
#endif
#ifdef NDEBUG
  const char* mode = "release";
#else
  const char* mode = "debug";
#endif
  return cpu + "; " + compiler + "; " + mode + "; single-threaded";
}

void write_records_csv(const std::vector<BenchRecord>& records,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# " << environment_summary() << "\n";
  out << "instance,solver,params,n,m,wall_seconds,objective,exact_objective,"
         "ratio,iterations,applicable,converged\n";
  for (const BenchRecord& r : records) {
    out << r.instance << ',' << r.solver << ',' << r.params << ',' << r.n
        << ',' << r.m << ',' << fmt_g(r.wall_seconds) << ','
        << fmt_g(r.objective) << ',' << fmt_g(r.exact_objective) << ','
        << fmt_g(r.ratio) << ',' << r.iterations << ','
        << (r.applicable ? 1 : 0) << ',' << (r.converged ? 1 : 0) << "\n";
  }
}

std::vector<BenchRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<BenchRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("instance,", 0) == 0) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 12)
      throw std::runtime_error(path + ": malformed record line: " + line);
    BenchRecord r;
    r.instance = f[0];
    r.solver = f[1];
    r.params = f[2];
    r.n = std::stoi(f[3]);
    r.m = std::stoi(f[4]);
    r.wall_seconds = f[5].empty() ? 0.0 : std::stod(f[5]);
    r.objective = f[6].empty() ? kNaN : std::stod(f[6]);
    r.exact_objective = f[7].empty() ? kNaN : std::stod(f[7]);
    r.ratio = f[8].empty() ? kNaN : std::stod(f[8]);
    r.iterations = std::stoll(f[9]);
    r.applicable = f[10] == "1";
    r.converged = f[11] == "1";
    records.push_back(std::move(r));
  }
  return records;
}

void write_profile_csv(const std::vector<ProfileCurve>& curves,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# " << environment_summary() << "\n";
  out << "solver,factor,count\n";
  for (const ProfileCurve& c : curves)
    for (const auto& [f, count] : c.points)
      out << c.solver << ',' << fmt_g(f) << ',' << count << "\n";
}

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# " << environment_summary() << "\n";
  out << "eta,solver,ratio,iterations,converged\n";
  for (const SweepRow& r : rows)
    out << fmt_g(r.eta) << ',' << r.solver << ',' << fmt_g(r.ratio) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << "\n";
}

}  // namespace ot
