#pragma once

// Benchmark harness: timed solver runs over instance suites, Dolan-More
// performance profiles, eta sweeps for the scaling solvers, and a persistent
// parameter-calibration cache. All timing is wall clock around the solve call
// only, strictly sequential, median over a configurable number of repeats.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ot/core.hpp"
#include "ot/scaling.hpp"

namespace ot {

// A named solver closure. `run` receives the instance and a wall-time budget
// in seconds (0 = unlimited) and must respect it on a best-effort basis.
// Solvers with `unit_only` set are skipped on instances that are not unit
// assignment problems and recorded as not applicable.
struct SolverSpec {
  std::string name;
  std::string params;  // ';'-separated key=value list, goes into the CSV cell
  bool unit_only = false;
  std::function<SolveResult(const OTInstance&, double)> run;
};

struct BenchRecord {
  std::string instance;
  std::string solver;
  std::string params;
  int32_t n = 0, m = 0;
  double wall_seconds = 0.0;  // median over repeats
  double objective = 0.0;     // NaN when the run did not finish
  double exact_objective = 0.0;
  double ratio = 0.0;  // objective / exact_objective, NaN when unfinished
  int64_t iterations = 0;
  bool applicable = true;
  bool converged = false;  // false on timeout or iteration-budget exhaustion
};

struct BenchConfig {
  int repeats = 3;
  double timeout_s = 3600.0;
};

// Runs every solver on every instance. The exact objective is computed once
// per instance with network simplex and attached to all of its records. A
// run whose first repeat exceeds the timeout is flagged (converged = false)
// and its objective left absent; remaining repeats are skipped.
std::vector<BenchRecord> run_suite(const std::vector<OTInstance>& instances,
                                   const std::vector<SolverSpec>& solvers,
                                   const BenchConfig& config = {});

struct ProfileCurve {
  std::string solver;
  // (performance factor f, number of datasets solved within factor f of
  // the fastest solver). Counts are non-decreasing; the final count equals
  // the number of datasets this solver finished.
  std::vector<std::pair<double, int>> points;
};

// Dolan-More profile over the records. Unfinished or inapplicable runs get
// an infinite factor. Points are emitted at every realized factor value up
// to the solver's own largest finite factor. Throws if the records contain
// no instance shared by at least two solvers.
std::vector<ProfileCurve> performance_profile(
    const std::vector<BenchRecord>& records);

struct SweepRow {
  double eta = 0.0;
  std::string solver;  // "sinkhorn" or "greenkhorn"
  double ratio = 0.0;
  int64_t iterations = 0;
  bool converged = false;
};

// Runs both scaling solvers (with rounding, so ratios compare feasible
// objectives) at each grid eta. Non-convergence at a grid point is recorded
// in the row, not fatal. exact_objective < 0 means compute it here.
std::vector<SweepRow> eta_sweep(const OTInstance& inst,
                                const std::vector<double>& etas,
                                double exact_objective = -1.0,
                                const ScalingConfig& base = {});

struct CalibrationEntry {
  std::string instance;
  uint64_t content_hash = 0;
  double eta = 0.0;         // smallest grid eta with sinkhorn ratio <= target
  int64_t B = 0;            // smallest power-of-two B with batched KM ratio <= target
  double auction_eps = 0.0; // largest tested epsilon still yielding the exact objective
  bool has_assignment_params = false;  // B and auction_eps only apply to unit squares
  bool ok = false;
  std::string error;
};

// FNV-1a over the instance's dimensions, costs, supplies and demands.
uint64_t instance_content_hash(const OTInstance& inst);

// CSV-backed calibration cache keyed by (instance name, content hash).
class CalibrationCache {
 public:
  CalibrationCache() = default;
  explicit CalibrationCache(std::string path);  // loads the file if present

  const CalibrationEntry* find(const std::string& name, uint64_t hash) const;
  void put(const CalibrationEntry& entry);  // replaces any entry with the same key
  void save() const;                        // no-op when constructed without a path

  const std::vector<CalibrationEntry>& entries() const { return entries_; }

 private:
  std::string path_;
  std::vector<CalibrationEntry> entries_;
};

// Calibrates every instance not already in the cache: smallest eta reaching
// the target ratio for the scaling solvers, and for unit assignment
// instances also the smallest quantization level B for batched KM and the
// largest still-exact auction epsilon (doubling searches). New entries are
// written back through the cache. Failures are recorded per instance.
std::vector<CalibrationEntry> calibrate_all(
    const std::vector<OTInstance>& instances, CalibrationCache* cache = nullptr,
    double target_ratio = 1.1);

// Standard solver roster for the CLI and the benchmark tools. Recognized
// names: netsimplex, km, batched_km, auction, auction_scaled, sinkhorn,
// greenkhorn. The calibration entry, when given, supplies eta / B /
// epsilon_final; otherwise library defaults are used. Scaling solvers are
// wrapped with rounding so their recorded objectives are feasible.
SolverSpec make_solver(const std::string& name,
                       const CalibrationEntry* calib = nullptr);

// One-line build/host description placed in CSV headers.
std::string environment_summary();

void write_records_csv(const std::vector<BenchRecord>& records,
                       const std::string& path);
std::vector<BenchRecord> read_records_csv(const std::string& path);
void write_profile_csv(const std::vector<ProfileCurve>& curves,
                       const std::string& path);
void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::string& path);

}  // namespace ot
