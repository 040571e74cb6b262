#include "ot/hungarian.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <limits>
#include <stdexcept>

namespace ot {

namespace {

constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;

void require_unit_square(const OTInstance& inst, const char* who) {
  if (auto err = validate_instance(inst))
    throw std::invalid_argument(std::string(who) + ": " + *err);
  if (!inst.unit_caps())
    throw std::invalid_argument(std::string(who) +
                                ": requires a unit-capacity square instance");
}

Flow matching_flow(int32_t n, const std::vector<int32_t>& row_to_col) {
  std::vector<Flow::Entry> entries;
  entries.reserve(n);
  for (int32_t i = 0; i < n; ++i)
    if (row_to_col[i] >= 0) entries.push_back({i, row_to_col[i], 1.0});
  return Flow(n, n, std::move(entries));
}

}  // namespace

QuantizedCosts quantize_costs(const std::vector<int64_t>& cost, int64_t B) {
  if (B <= 0) throw std::invalid_argument("quantize_costs: B must be positive");
  QuantizedCosts q;
  q.B = B;
  q.N = cost.empty() ? 0 : *std::max_element(cost.begin(), cost.end());
  if (q.N <= 0) {
    q.N = 1;
    q.chat = cost;
    q.lossless = true;
    return q;
  }
  if (B > std::numeric_limits<int64_t>::max() / q.N)
    throw std::invalid_argument("quantize_costs: B * max cost overflows");
  q.chat.resize(cost.size());
  q.lossless = true;
  for (size_t a = 0; a < cost.size(); ++a) {
    q.chat[a] = cost[a] * B / q.N;
    if (q.chat[a] * q.N != cost[a] * B) q.lossless = false;
  }
  return q;
}

SolveResult solve_km(const OTInstance& inst, DualPotentials* duals,
                     Matching* matching, double time_budget_s) {
  require_unit_square(inst, "solve_km");
  const int32_t n = inst.n;
  const int64_t* C = inst.cost.data();
  const auto t0 = std::chrono::steady_clock::now();

  // col n is the virtual start column of each augmenting search
  std::vector<int64_t> u(n, 0), v(n + 1, 0), minv(n);
  std::vector<int32_t> p(n + 1, -1), way(n, -1);
  std::vector<char> used(n + 1, 0);

  for (int32_t i = 0; i < n; ++i) {
    p[n] = i;
    int32_t j0 = n;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int32_t i0 = p[j0];
      const int64_t* row = C + static_cast<size_t>(i0) * n;
      int64_t delta = kInf;
      int32_t j1 = -1;
      for (int32_t j = 0; j < n; ++j) {
        if (used[j]) continue;
        const int64_t cur = row[j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int32_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != -1);
    do {
      const int32_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != n);

    if (time_budget_s > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count() > time_budget_s) {
      std::vector<int32_t> partial(n, -1);
      for (int32_t j = 0; j < n; ++j)
        if (p[j] >= 0) partial[p[j]] = j;
      SolveResult res =
          make_result(inst, matching_flow(n, partial), i + 1, false, false);
      res.wall_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
      return res;
    }
  }

  std::vector<int32_t> row_to_col(n, -1);
  for (int32_t j = 0; j < n; ++j) row_to_col[p[j]] = j;

  if (duals) {
    duals->u = u;
    duals->v.assign(v.begin(), v.begin() + n);
  }
  if (matching) matching->row_to_col = row_to_col;

  SolveResult res = make_result(inst, matching_flow(n, row_to_col), n,
                                /*exact=*/true, /*converged=*/true);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

namespace {

// One augmenting round of the batched solver: grow the reachable set from the
// free rows over tight edges, adjusting duals whenever the search saturates,
// until some free column becomes reachable. Multi-source version of the
// classic Hungarian search; slack[j] = min over reached i of chat - u - v.
struct BatchedSearch {
  int32_t n;
  const int64_t* chat;
  std::vector<int64_t>& u;
  std::vector<int64_t>& v;
  const std::vector<int32_t>& match_row;
  const std::vector<int32_t>& match_col;

  std::vector<char> reach_row, reach_col;
  std::vector<int64_t> slack;
  std::vector<int32_t> queue;
  int64_t adjustments = 0;

  explicit BatchedSearch(int32_t n_, const int64_t* chat_,
                         std::vector<int64_t>& u_, std::vector<int64_t>& v_,
                         const std::vector<int32_t>& mr,
                         const std::vector<int32_t>& mc)
      : n(n_), chat(chat_), u(u_), v(v_), match_row(mr), match_col(mc),
        reach_row(n_, 0), reach_col(n_, 0), slack(n_, kInf) {}

  void relax_from(int32_t i) {
    const int64_t* row = chat + static_cast<size_t>(i) * n;
    const int64_t ui = u[i];
    for (int32_t j = 0; j < n; ++j) {
      if (reach_col[j]) continue;
      const int64_t s = row[j] - ui - v[j];
      if (s < slack[j]) slack[j] = s;
    }
  }

  // returns once a free column is reachable in the tight subgraph
  void run() {
    for (int32_t i = 0; i < n; ++i)
      if (match_row[i] < 0) {
        reach_row[i] = 1;
        queue.push_back(i);
      }
    size_t head = 0;
    bool found = false;
    while (!found) {
      while (head < queue.size()) relax_from(queue[head++]);

      // absorb all zero-slack columns, enqueueing their matched rows
      bool progressed = false;
      for (int32_t j = 0; j < n; ++j) {
        if (reach_col[j] || slack[j] != 0) continue;
        reach_col[j] = 1;
        progressed = true;
        const int32_t i2 = match_col[j];
        if (i2 < 0) {
          found = true;
        } else if (!reach_row[i2]) {
          reach_row[i2] = 1;
          queue.push_back(i2);
        }
      }
      if (found) break;
      if (progressed || head < queue.size()) continue;

      int64_t delta = kInf;
      for (int32_t j = 0; j < n; ++j)
        if (!reach_col[j] && slack[j] < delta) delta = slack[j];
      assert(delta > 0 && delta < kInf);
      ++adjustments;
      for (int32_t i = 0; i < n; ++i)
        if (reach_row[i]) u[i] += delta;
      for (int32_t j = 0; j < n; ++j) {
        if (reach_col[j])
          v[j] -= delta;
        else
          slack[j] -= delta;
      }
    }
  }
};

// Hopcroft-Karp style batch augmentation over the tight subgraph: layered
// BFS from the free rows, then DFS extraction of a maximal vertex-disjoint
// set of shortest augmenting paths.
struct TightPhase {
  int32_t n;
  std::vector<int32_t> adj_start;
  std::vector<int32_t> adj;
  std::vector<int32_t> dist;
  std::vector<int32_t> it;
  std::vector<int32_t>& match_row;
  std::vector<int32_t>& match_col;
  int32_t limit = 0;

  TightPhase(int32_t n_, const int64_t* chat, const std::vector<int64_t>& u,
             const std::vector<int64_t>& v, std::vector<int32_t>& mr,
             std::vector<int32_t>& mc)
      : n(n_), adj_start(n_ + 1, 0), dist(n_), it(n_), match_row(mr),
        match_col(mc) {
    std::vector<int32_t> degree(n, 0);
    for (int32_t i = 0; i < n; ++i) {
      const int64_t* row = chat + static_cast<size_t>(i) * n;
      for (int32_t j = 0; j < n; ++j)
        if (row[j] - u[i] - v[j] == 0) ++degree[i];
    }
    for (int32_t i = 0; i < n; ++i) adj_start[i + 1] = adj_start[i] + degree[i];
    adj.resize(adj_start[n]);
    std::vector<int32_t> fill(adj_start.begin(), adj_start.end() - 1);
    for (int32_t i = 0; i < n; ++i) {
      const int64_t* row = chat + static_cast<size_t>(i) * n;
      for (int32_t j = 0; j < n; ++j)
        if (row[j] - u[i] - v[j] == 0) adj[fill[i]++] = j;
    }
  }

  bool bfs() {
    std::vector<int32_t> q;
    std::fill(dist.begin(), dist.end(), -1);
    for (int32_t i = 0; i < n; ++i)
      if (match_row[i] < 0) {
        dist[i] = 0;
        q.push_back(i);
      }
    limit = std::numeric_limits<int32_t>::max();
    for (size_t head = 0; head < q.size(); ++head) {
      const int32_t i = q[head];
      if (dist[i] >= limit) continue;
      for (int32_t a = adj_start[i]; a < adj_start[i + 1]; ++a) {
        const int32_t j = adj[a];
        const int32_t i2 = match_col[j];
        if (i2 < 0) {
          limit = std::min(limit, dist[i] + 1);
        } else if (dist[i2] < 0) {
          dist[i2] = dist[i] + 1;
          q.push_back(i2);
        }
      }
    }
    return limit != std::numeric_limits<int32_t>::max();
  }

  bool dfs(int32_t i) {
    for (int32_t& a = it[i]; a < adj_start[i + 1]; ++a) {
      const int32_t j = adj[a];
      const int32_t i2 = match_col[j];
      if (i2 < 0) {
        if (dist[i] + 1 != limit) continue;
        match_col[j] = i;
        match_row[i] = j;
        return true;
      }
      if (dist[i2] == dist[i] + 1 && dfs(i2)) {
        match_col[j] = i;
        match_row[i] = j;
        return true;
      }
    }
    dist[i] = -1;
    return false;
  }

  // augments along a maximal vertex-disjoint set, returns how many paths
  int32_t augment_all() {
    if (!bfs()) return 0;
    std::copy(adj_start.begin(), adj_start.end() - 1, it.begin());
    int32_t paths = 0;
    for (int32_t i = 0; i < n; ++i)
      if (match_row[i] < 0 && dist[i] == 0 && dfs(i)) ++paths;
    return paths;
  }
};

}  // namespace

SolveResult solve_batched_km(const OTInstance& inst,
                             const BatchedKMConfig& config,
                             DualPotentials* duals, QuantizedCosts* quantized) {
  require_unit_square(inst, "solve_batched_km");
  const int32_t n = inst.n;
  const auto t0 = std::chrono::steady_clock::now();

  QuantizedCosts q = quantize_costs(inst.cost, config.B);
  const int64_t* chat = q.chat.data();

  std::vector<int64_t> u(n, 0), v(n, 0);
  for (int32_t i = 0; i < n; ++i) {
    const int64_t* row = chat + static_cast<size_t>(i) * n;
    u[i] = *std::min_element(row, row + n);
  }
  for (int32_t j = 0; j < n; ++j) {
    int64_t lo = kInf;
    for (int32_t i = 0; i < n; ++i)
      lo = std::min(lo, chat[static_cast<size_t>(i) * n + j] - u[i]);
    v[j] = lo;
  }

  std::vector<int32_t> match_row(n, -1), match_col(n, -1);
  int32_t matched = 0;
  int64_t phases = 0, adjustments = 0;
  bool budget_ok = true;

  while (matched < n) {
    if (config.time_budget_s > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count() > config.time_budget_s) {
      budget_ok = false;
      break;
    }
    BatchedSearch search(n, chat, u, v, match_row, match_col);
    search.run();
    adjustments += search.adjustments;

    TightPhase phase(n, chat, u, v, match_row, match_col);
    const int32_t paths = phase.augment_all();
    if (paths <= 0)
      throw std::logic_error("batched km: no augmenting path after search");
    matched += paths;
    ++phases;

#ifndef NDEBUG
    for (int32_t i = 0; i < n; ++i) {
      const int64_t* row = chat + static_cast<size_t>(i) * n;
      for (int32_t j = 0; j < n; ++j) assert(row[j] - u[i] - v[j] >= 0);
      if (match_row[i] >= 0)
        assert(row[match_row[i]] - u[i] - v[match_row[i]] == 0);
    }
#endif
  }

  if (duals) {
    duals->u = u;
    duals->v = v;
  }
  if (quantized) *quantized = q;

  SolveResult res =
      make_result(inst, matching_flow(n, match_row), phases + adjustments,
                  /*exact=*/q.lossless && budget_ok, budget_ok);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

}  // namespace ot
