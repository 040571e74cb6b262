#include "ot/auction.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace ot {

namespace {

struct AuctionCore {
  const OTInstance& inst;
  int32_t n;
  double eps;
  std::vector<double>& prices;
  std::vector<int32_t> owner;        // column -> row
  std::vector<int32_t> assigned_to;  // row -> column
  std::priority_queue<int32_t, std::vector<int32_t>, std::greater<int32_t>>
      pending;
  int32_t unmatched;
  int64_t bids = 0;

  AuctionCore(const OTInstance& inst_, double eps_, std::vector<double>& p)
      : inst(inst_), n(inst_.n), eps(eps_), prices(p), owner(n, -1),
        assigned_to(n, -1), unmatched(n) {
    for (int32_t i = 0; i < n; ++i) pending.push(i);
  }

  // value of column j for row i under current prices
  double value(int32_t i, int32_t j) const {
    return -static_cast<double>(inst.cost_at(i, j)) - prices[j];
  }

  double best_value(int32_t i) const {
    double best = -std::numeric_limits<double>::infinity();
    for (int32_t j = 0; j < n; ++j) best = std::max(best, value(i, j));
    return best;
  }

  void bid(int32_t i) {
    int32_t best_j = 0;
    double best = -std::numeric_limits<double>::infinity();
    double second = best;
    for (int32_t j = 0; j < n; ++j) {
      const double v = value(i, j);
      if (v > best) {
        second = best;
        best = v;
        best_j = j;
      } else if (v > second) {
        second = v;
      }
    }
    if (n == 1) second = best;
    prices[best_j] += (best - second) + eps;

    const int32_t displaced = owner[best_j];
    if (displaced >= 0) {
      assigned_to[displaced] = -1;
      pending.push(displaced);
    } else {
      --unmatched;
    }
    owner[best_j] = i;
    assigned_to[i] = best_j;
    ++bids;
  }

  // Greedy endgame: with at most two rows free, accept a completion only if
  // each added edge is within eps of that row's best value, so the
  // eps-complementary-slackness certificate covers the whole matching.
  bool try_complete() {
    std::vector<int32_t> rows, cols;
    for (int32_t i = 0; i < n; ++i)
      if (assigned_to[i] < 0) rows.push_back(i);
    for (int32_t j = 0; j < n; ++j)
      if (owner[j] < 0) cols.push_back(j);
    assert(rows.size() == cols.size() && rows.size() <= 2);
    if (rows.empty()) return true;

    auto edge_ok = [&](int32_t i, int32_t j) {
      return value(i, j) >= best_value(i) - eps - 1e-9;
    };
    auto commit = [&](int32_t i, int32_t j) {
      assigned_to[i] = j;
      owner[j] = i;
      --unmatched;
    };

    if (rows.size() == 1) {
      if (!edge_ok(rows[0], cols[0])) return false;
      commit(rows[0], cols[0]);
      return true;
    }

    const int64_t straight =
        inst.cost_at(rows[0], cols[0]) + inst.cost_at(rows[1], cols[1]);
    const int64_t crossed =
        inst.cost_at(rows[0], cols[1]) + inst.cost_at(rows[1], cols[0]);
    const bool straight_first = straight <= crossed;
    for (int pass = 0; pass < 2; ++pass) {
      const bool take_straight = (pass == 0) == straight_first;
      const int32_t j0 = take_straight ? cols[0] : cols[1];
      const int32_t j1 = take_straight ? cols[1] : cols[0];
      if (edge_ok(rows[0], j0) && edge_ok(rows[1], j1)) {
        commit(rows[0], j0);
        commit(rows[1], j1);
        return true;
      }
    }
    return false;
  }

#ifndef NDEBUG
  void check_eps_cs() const {
    for (int32_t i = 0; i < n; ++i) {
      if (assigned_to[i] < 0) continue;
      assert(value(i, assigned_to[i]) >= best_value(i) - eps - 1e-6);
    }
  }
#endif

  // returns true when a perfect matching was reached within the budgets
  bool run(int64_t max_bids, std::chrono::steady_clock::time_point t0,
           double time_budget_s) {
    while (unmatched > 0) {
      if (unmatched <= 2 && try_complete()) break;
      if (bids >= max_bids) return false;
      if (time_budget_s > 0.0 && (bids & 0x3FF) == 0 &&
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                  .count() > time_budget_s)
        return false;

      int32_t i = pending.top();
      pending.pop();
      if (assigned_to[i] >= 0) continue;  // displaced and re-pushed stale
      bid(i);
#ifndef NDEBUG
      if (bids % n == 0) check_eps_cs();
#endif
    }
#ifndef NDEBUG
    check_eps_cs();
#endif
    return true;
  }
};

SolveResult finish(const OTInstance& inst, const AuctionCore& core,
                   double eps_effective, bool complete, int64_t bids,
                   std::chrono::steady_clock::time_point t0,
                   std::vector<double>* prices_out, Matching* matching_out) {
  std::vector<Flow::Entry> entries;
  for (int32_t i = 0; i < core.n; ++i)
    if (core.assigned_to[i] >= 0) entries.push_back({i, core.assigned_to[i], 1.0});

  const bool exact = complete && eps_effective * core.n < 1.0;
  SolveResult res = make_result(inst, Flow(inst.n, inst.m, std::move(entries)),
                                bids, exact, complete);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (prices_out) *prices_out = core.prices;
  if (matching_out) matching_out->row_to_col = core.assigned_to;
  return res;
}

void require_auctionable(const OTInstance& inst, const char* who) {
  if (auto err = validate_instance(inst))
    throw std::invalid_argument(std::string(who) + ": " + *err);
  if (!inst.unit_caps())
    throw std::invalid_argument(std::string(who) +
                                ": requires a unit-capacity square instance");
}

}  // namespace

SolveResult solve_auction(const OTInstance& inst, const AuctionConfig& config,
                          std::vector<double>* prices_out,
                          Matching* matching_out) {
  require_auctionable(inst, "solve_auction");
  if (!(config.epsilon > 0.0))
    throw std::invalid_argument("solve_auction: epsilon must be positive");

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> prices(inst.m, 0.0);
  AuctionCore core(inst, config.epsilon, prices);
  const bool complete = core.run(config.max_bids, t0, config.time_budget_s);
  return finish(inst, core, config.epsilon, complete, core.bids, t0,
                prices_out, matching_out);
}

SolveResult solve_auction_scaled(const OTInstance& inst,
                                 const AuctionScaledConfig& config,
                                 std::vector<double>* prices_out) {
  require_auctionable(inst, "solve_auction_scaled");
  if (!(config.theta > 1.0))
    throw std::invalid_argument("solve_auction_scaled: theta must exceed 1");

  const double eps_final = config.epsilon_final > 0.0
                               ? config.epsilon_final
                               : 1.0 / (inst.n + 1);
  double eps = config.epsilon0 > 0.0
                   ? config.epsilon0
                   : std::max(static_cast<double>(inst.max_cost()) / 2.0,
                              eps_final);
  eps = std::max(eps, eps_final);

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> prices(inst.m, 0.0);
  int64_t bids_total = 0;
  bool complete = false;

  // prices persist across rounds, assignments reset
  while (true) {
    AuctionCore core(inst, eps, prices);
    complete = core.run(config.max_bids - bids_total, t0, config.time_budget_s);
    bids_total += core.bids;
    if (!complete || eps <= eps_final) {
      return finish(inst, core, eps, complete, bids_total, t0, prices_out,
                    nullptr);
    }
    eps = std::max(eps / config.theta, eps_final);
  }
}

}  // namespace ot
