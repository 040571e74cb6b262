#ifndef OT_AUCTION_HPP
#define OT_AUCTION_HPP

#include <cstdint>
#include <vector>

#include "ot/core.hpp"
#include "ot/hungarian.hpp"

namespace ot {

struct AuctionConfig {
  double epsilon = 1.0;
  // total bid budget; exceeding it returns the partial matching with
  // converged = false
  int64_t max_bids = 1000000000;
  double time_budget_s = 0.0;
};

// Bertsekas auction for the assignment problem, run on rewards R = -C.
// Unmatched bidders act in Gauss-Seidel order (lowest index first); a bid on
// the best-value column raises its price by (best - second best) + epsilon.
// Epsilon-complementary slackness holds for every matched row throughout:
//   R[i][j(i)] - p[j(i)] >= max_k (R[i][k] - p[k]) - epsilon
// which bounds the final objective by OPT + n * epsilon; with integral costs
// and epsilon < 1/n the result is exact.
//
// Endgame rule: once all but two rows are matched the remaining 2x2 (or 1x1)
// completion is taken greedily, cheaper pairing first, but only if the
// completed edges themselves satisfy epsilon-complementary slackness at the
// current prices; otherwise bidding continues. That keeps the guarantee above
// unconditional. iterations counts bids.
SolveResult solve_auction(const OTInstance& inst, const AuctionConfig& config,
                          std::vector<double>* prices_out = nullptr,
                          Matching* matching_out = nullptr);

struct AuctionScaledConfig {
  double epsilon0 = 0.0;       // <= 0 picks N / 2
  double theta = 4.0;          // epsilon divisor between rounds
  double epsilon_final = 0.0;  // <= 0 picks 1 / (n + 1), i.e. exact
  int64_t max_bids = 1000000000;
  double time_budget_s = 0.0;
};

// Epsilon scaling: repeated auction rounds with epsilon divided by theta,
// prices carried between rounds, all assignments reset at each step. Final
// guarantees are those of solve_auction at epsilon_final. iterations counts
// bids across all rounds.
SolveResult solve_auction_scaled(const OTInstance& inst,
                                 const AuctionScaledConfig& config = {},
                                 std::vector<double>* prices_out = nullptr);

}  // namespace ot

#endif
