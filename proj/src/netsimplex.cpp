#include "ot/netsimplex.hpp"

#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ot {

namespace {

// Specialized primal network simplex over the transportation network
//
//   supply node i (0..n-1)  --- arc i*m+j, cost C[i][j] --->  demand node n+j
//
// plus an artificial root (node n+m) connected to every node: supply nodes
// point at the root with cost 0, the root points at demand nodes with cost
// M = 1 + N*(n+m). The initial basis is the star rooted there, carrying each
// node's full supply/demand, which is feasible and lets every real arc price
// itself against the big M.
//
// The spanning tree is kept in the usual parent / pred-arc / thread /
// rev-thread / succ-num / last-succ representation so a pivot costs the
// depth of the cycle plus the size of the re-hung subtree. Entering arcs are
// chosen by block search: scan a window of ~sqrt(#arcs) arcs cyclically and
// take the most negative reduced cost seen; the leaving arc is the last
// blocking arc in cycle order, so the basis stays strongly feasible.
//
// Everything is integral: costs, flows, potentials, reduced costs. No
// tolerances enter the optimality test.
class Simplex {
 public:
  Simplex(const OTInstance& inst, const NetSimplexConfig& cfg)
      : inst_(inst),
        n_(inst.n),
        m_(inst.m),
        real_arcs_(static_cast<int64_t>(inst.n) * inst.m),
        all_arcs_(real_arcs_ + inst.n + inst.m),
        node_count_(inst.n + inst.m + 1),
        root_(inst.n + inst.m),
        cfg_(cfg) {
    big_m_ = 1 + std::max<int64_t>(inst.max_cost(), 0) *
                     (static_cast<int64_t>(n_) + m_);
    flow_.assign(all_arcs_, 0);
    state_.assign(all_arcs_, kStateLower);
    pi_.assign(node_count_, 0);
    parent_.assign(node_count_, 0);
    pred_.assign(node_count_, 0);
    thread_.assign(node_count_, 0);
    rev_thread_.assign(node_count_, 0);
    succ_num_.assign(node_count_, 0);
    last_succ_.assign(node_count_, 0);
    forward_.assign(node_count_, 0);
  }

  // Runs pivots until no entering arc remains or a budget expires.
  // Returns true when optimal.
  bool run() {
    init_basis();

    const int64_t block =
        std::max<int64_t>(cfg_.min_block_size,
                          static_cast<int64_t>(cfg_.block_size_factor *
                                               std::sqrt(static_cast<double>(real_arcs_))));
    block_size_ = block;

    const bool timed = cfg_.time_budget_s > 0.0;
    const auto deadline =
        std::chrono::steady_clock::now() +
        std::chrono::duration<double>(timed ? cfg_.time_budget_s : 0.0);

    while (find_entering_arc()) {
      ++pivots_;
      if (cfg_.max_pivots > 0 && pivots_ > cfg_.max_pivots) return false;
      if (timed && (pivots_ & 0xFFF) == 0 &&
          std::chrono::steady_clock::now() > deadline)
        return false;

      find_join_node();
      find_leaving_arc();
      change_flow();
      update_tree_structure();
      update_potential();
    }
    return true;
  }

  Flow extract_flow() const {
    std::vector<Flow::Entry> entries;
    for (int64_t a = 0; a < real_arcs_; ++a)
      if (flow_[a] > 0)
        entries.push_back({static_cast<int32_t>(a / m_),
                           static_cast<int32_t>(a % m_),
                           static_cast<double>(flow_[a])});
    return Flow(n_, m_, std::move(entries));
  }

  bool artificial_flow_clear() const {
    for (int64_t a = real_arcs_; a < all_arcs_; ++a)
      if (flow_[a] != 0) return false;
    return true;
  }

  std::vector<int64_t> potentials() const {
    return std::vector<int64_t>(pi_.begin(), pi_.begin() + n_ + m_);
  }

  int64_t pivots() const { return pivots_; }

 private:
  static constexpr int8_t kStateTree = 0;
  static constexpr int8_t kStateLower = 1;
  static constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;

  int64_t arc_cost(int64_t a) const {
    if (a < real_arcs_) return inst_.cost[a];
    return a - real_arcs_ < n_ ? 0 : big_m_;
  }
  int32_t arc_source(int64_t a) const {
    if (a < real_arcs_) return static_cast<int32_t>(a / m_);
    const int32_t u = static_cast<int32_t>(a - real_arcs_);
    return u < n_ ? u : root_;
  }
  int32_t arc_target(int64_t a) const {
    if (a < real_arcs_) return n_ + static_cast<int32_t>(a % m_);
    const int32_t u = static_cast<int32_t>(a - real_arcs_);
    return u < n_ ? root_ : u;
  }

  void init_basis() {
    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = node_count_;
    last_succ_[root_] = root_ - 1;
    pi_[root_] = 0;

    for (int32_t u = 0; u < root_; ++u) {
      const int64_t e = real_arcs_ + u;
      parent_[u] = root_;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      state_[e] = kStateTree;
      if (u < n_) {
        forward_[u] = 1;  // supply arc u -> root, cost 0
        pi_[u] = 0;
        flow_[e] = inst_.supplies[u];
      } else {
        forward_[u] = 0;  // demand arc root -> u, cost M
        pi_[u] = big_m_;
        flow_[e] = inst_.demands[u - n_];
      }
    }
  }

  // Block search over the real arcs only; artificial arcs never re-enter.
  bool find_entering_arc() {
    int64_t min_rc = 0;
    int64_t a = next_arc_;
    int32_t i = static_cast<int32_t>(a / m_);
    int32_t j = static_cast<int32_t>(a % m_);
    int64_t cnt = block_size_;
    for (int64_t scanned = 0; scanned < real_arcs_; ++scanned) {
      if (state_[a] != kStateTree) {
        const int64_t rc = inst_.cost[a] + pi_[i] - pi_[n_ + j];
        if (rc < min_rc) {
          min_rc = rc;
          in_arc_ = a;
        }
      }
      ++a;
      ++j;
      if (j == m_) {
        j = 0;
        ++i;
      }
      if (a == real_arcs_) {
        a = 0;
        i = 0;
        j = 0;
      }
      if (--cnt == 0) {
        if (min_rc < 0) {
          next_arc_ = a;
          return true;
        }
        cnt = block_size_;
      }
    }
    if (min_rc < 0) {
      next_arc_ = a;
      return true;
    }
    return false;
  }

  void find_join_node() {
    int32_t u = arc_source(in_arc_);
    int32_t v = arc_target(in_arc_);
    while (u != v) {
      if (succ_num_[u] < succ_num_[v])
        u = parent_[u];
      else
        v = parent_[v];
    }
    join_ = u;
  }

  // The entering arc always sits at its lower bound (the network is
  // uncapacitated), so the cycle is oriented source -> target. Arcs pointing
  // against the cycle bound the push. Ties break toward the last blocking
  // arc in cycle order (Cunningham's rule): it keeps the basis strongly
  // feasible, which is what stops degenerate pivot storms on instances with
  // many equal costs, and it is just as deterministic as any index rule.
  void find_leaving_arc() {
    const int32_t first = arc_source(in_arc_);
    const int32_t second = arc_target(in_arc_);
    delta_ = kInf;
    int side = 0;
    for (int32_t u = first; u != join_; u = parent_[u]) {
      if (!forward_[u]) continue;
      const int64_t d = flow_[pred_[u]];
      if (d < delta_) {
        delta_ = d;
        u_out_ = u;
        side = 1;
      }
    }
    for (int32_t u = second; u != join_; u = parent_[u]) {
      if (forward_[u]) continue;
      const int64_t d = flow_[pred_[u]];
      if (d <= delta_) {
        delta_ = d;
        u_out_ = u;
        side = 2;
      }
    }
    if (side == 0)
      throw std::logic_error("unbounded pivot cycle; instance not validated?");
    if (side == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
  }

  void change_flow() {
    if (delta_ > 0) {
      flow_[in_arc_] += delta_;
      for (int32_t u = arc_source(in_arc_); u != join_; u = parent_[u])
        flow_[pred_[u]] += forward_[u] ? -delta_ : delta_;
      for (int32_t u = arc_target(in_arc_); u != join_; u = parent_[u])
        flow_[pred_[u]] += forward_[u] ? delta_ : -delta_;
    }
    state_[in_arc_] = kStateTree;
    state_[pred_[u_out_]] = kStateLower;
    assert(flow_[pred_[u_out_]] == 0);
  }

  // Re-hangs the subtree cut off by the leaving arc below the entering arc,
  // keeping the threaded preorder and all derived counters consistent.
  void update_tree_structure() {
    const int32_t old_rev_thread = rev_thread_[u_out_];
    const int32_t old_succ_num = succ_num_[u_out_];
    const int32_t old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    int32_t u = last_succ_[u_in_];
    int32_t right = thread_[u];
    const int32_t last =
        old_rev_thread == v_in_ ? thread_[last_succ_[u_out_]] : thread_[v_in_];

    // re-thread the stem path u_in .. u_out, reversing parent pointers
    thread_[v_in_] = u_in_;
    dirty_revs_.clear();
    dirty_revs_.push_back(v_in_);
    int32_t stem = u_in_;
    int32_t par_stem = v_in_;
    while (stem != u_out_) {
      const int32_t new_stem = parent_[stem];
      thread_[u] = new_stem;
      dirty_revs_.push_back(u);

      const int32_t w = rev_thread_[stem];
      thread_[w] = right;
      rev_thread_[right] = w;

      parent_[stem] = par_stem;
      par_stem = stem;
      stem = new_stem;

      u = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem]
                                                   : last_succ_[stem];
      right = thread_[u];
    }
    parent_[u_out_] = par_stem;
    thread_[u] = last;
    rev_thread_[last] = u;
    last_succ_[u_out_] = u;

    if (old_rev_thread != v_in_) {
      thread_[old_rev_thread] = right;
      rev_thread_[right] = old_rev_thread;
    }
    for (const int32_t x : dirty_revs_) rev_thread_[thread_[x]] = x;

    // pred arcs, directions and subtree counters along the reversed stem
    int32_t tmp_sc = 0;
    const int32_t tmp_ls = last_succ_[u_out_];
    u = u_out_;
    while (u != u_in_) {
      const int32_t w = parent_[u];
      pred_[u] = pred_[w];
      forward_[u] = !forward_[w];
      tmp_sc += succ_num_[u] - succ_num_[w];
      succ_num_[u] = tmp_sc;
      last_succ_[w] = tmp_ls;
      u = w;
    }
    pred_[u_in_] = in_arc_;
    forward_[u_in_] = (u_in_ == arc_source(in_arc_));
    succ_num_[u_in_] = old_succ_num;

    int32_t up_limit_in = -1;
    int32_t up_limit_out = -1;
    if (last_succ_[join_] == v_in_)
      up_limit_out = join_;
    else
      up_limit_in = join_;

    for (u = v_in_; u != up_limit_in && last_succ_[u] == v_in_; u = parent_[u])
      last_succ_[u] = last_succ_[u_out_];

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ;
           u = parent_[u])
        last_succ_[u] = old_rev_thread;
    } else {
      for (u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ;
           u = parent_[u])
        last_succ_[u] = last_succ_[u_out_];
    }

    for (u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  // Only the re-hung subtree's potentials change, by the entering arc's
  // former reduced cost (with sign by orientation).
  void update_potential() {
    const int64_t c = arc_cost(pred_[u_in_]);
    const int64_t sigma = forward_[u_in_] ? pi_[v_in_] - pi_[u_in_] - c
                                          : pi_[v_in_] - pi_[u_in_] + c;
    const int32_t end = thread_[last_succ_[u_in_]];
    for (int32_t u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  const OTInstance& inst_;
  const int32_t n_, m_;
  const int64_t real_arcs_, all_arcs_;
  const int32_t node_count_, root_;
  const NetSimplexConfig cfg_;

  int64_t big_m_ = 0;
  int64_t block_size_ = 0;
  int64_t next_arc_ = 0;
  int64_t pivots_ = 0;

  std::vector<int64_t> flow_;
  std::vector<int8_t> state_;
  std::vector<int64_t> pi_;
  std::vector<int32_t> parent_;
  std::vector<int64_t> pred_;
  std::vector<int32_t> thread_;
  std::vector<int32_t> rev_thread_;
  std::vector<int32_t> succ_num_;
  std::vector<int32_t> last_succ_;
  std::vector<int8_t> forward_;
  std::vector<int32_t> dirty_revs_;

  int64_t in_arc_ = -1;
  int32_t join_ = -1, u_in_ = -1, v_in_ = -1, u_out_ = -1, v_out_ = -1;
  int64_t delta_ = 0;
};

}  // namespace

SolveResult solve_network_simplex(const OTInstance& inst,
                                  const NetSimplexConfig& config,
                                  NetSimplexCertificate* cert) {
  if (auto err = validate_instance(inst))
    throw std::invalid_argument("solve_network_simplex: " + *err);

  const auto t0 = std::chrono::steady_clock::now();
  Simplex simplex(inst, config);
  const bool optimal = simplex.run();

  if (optimal && !simplex.artificial_flow_clear())
    throw std::logic_error("artificial flow left in an optimal basis");

#ifndef NDEBUG
  if (optimal) {
    const auto pot = simplex.potentials();
    for (int32_t i = 0; i < inst.n; ++i)
      for (int32_t j = 0; j < inst.m; ++j)
        assert(inst.cost_at(i, j) + pot[i] - pot[inst.n + j] >= 0);
  }
#endif

  SolveResult res = make_result(inst, simplex.extract_flow(), simplex.pivots(),
                                optimal, optimal);
  res.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  if (cert) cert->potentials = simplex.potentials();
  return res;
}

}  // namespace ot
