#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tfmlab/game.hpp"
#include "tfmlab/mechanisms.hpp"

namespace tfm {

// {0} u {user bids} u {user bids +- 1/1000}, nonnegative, sorted, distinct.
std::vector<Rational> default_shill_grid(const BidProfile& bids);

// Every feasible block for a BP: user subsets of S_j of size <= k padded with
// up to shill_budget shill transactions whose bids come from the grid. Shills
// take serials 0..s-1 in ascending bid order, so equal-bid shills remain
// distinct while permutations of one multiset are not double counted.
std::vector<Block> enumerate_strategies(const GameStructure& gs, const BidProfile& bids, int bp,
                                        int shill_budget, const std::vector<Rational>& shill_grid,
                                        std::uint64_t guard = 1'000'000);

struct DeviationWitness {
  int bp = -1;
  Block block;          // the improving block
  Rational old_payoff;  // payoff under the checked allocation
  Rational new_payoff;  // payoff after the unilateral deviation
  Rational gain() const { return new_payoff - old_payoff; }
};

struct BpGameVerdict {
  bool is_nash = false;
  std::optional<DeviationWitness> deviation;

  // Set by strong_bpic_check only.
  std::optional<bool> strong_bpic;
  std::optional<Allocation> counter_equilibrium;  // a Nash profile neither
                                                  // equivalent to nor dominated
                                                  // by the intended allocation
  Allocation intended;
  std::vector<Rational> shill_grid;  // verdicts hold relative to this grid
  int shill_budget = 0;
  std::uint64_t joint_profiles = 0;  // profiles scanned exhaustively
};

// Is `alloc` a Nash equilibrium among BPs at fixed user bids? Deviations
// range over enumerate_strategies; the first strict improvement (in BP-then-
// block canonical order) is returned as a witness.
BpGameVerdict is_nash(const Tfm& tfm, const GameStructure& gs, const BidProfile& bids,
                      const Allocation& alloc, int shill_budget,
                      const std::vector<Rational>& shill_grid);

// Strong BPIC at one bid vector: (1) the inclusion rule's allocation is a
// Nash equilibrium; (2) every joint Nash profile is either equivalent to it
// (same multiset of positive confirmed bids) or Pareto dominated by it in
// revenues. The joint profile space is scanned exhaustively under the guard.
BpGameVerdict strong_bpic_check(const Tfm& tfm, const GameStructure& gs, const BidProfile& bids,
                                int shill_budget, const std::vector<Rational>& shill_grid,
                                std::uint64_t enumeration_guard = 30'000'000);

// Weak dominance in every BP revenue, strict somewhere.
bool pareto_dominates(const Tfm& tfm, const BidProfile& bids, const Allocation& a,
                      const Allocation& b);

}  // namespace tfm
