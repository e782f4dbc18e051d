#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tfmlab/game.hpp"
#include "tfmlab/rational.hpp"

namespace tfm {

// The matroid of feasible transaction sets: A is independent iff A can be
// partitioned into blocks B_j subseteq S_j with |B_j| <= k. Independence is
// decided by a capacitated bipartite matching, which also yields a witnessing
// block assignment.
struct FeasibilityMatroid {
  int n_elements = 0;
  std::vector<std::vector<int>> eligibility;  // per BP, sorted element lists
  int capacity = 1;                           // k

  static FeasibilityMatroid from_game(const GameStructure& gs);

  // Uniform matroid of the given rank (one BP eligible for everything).
  static FeasibilityMatroid uniform(int n_elements, int rank);

  int n_bps() const { return static_cast<int>(eligibility.size()); }
};

// Incremental element -> BP assignment respecting eligibility and the per-BP
// capacity. try_add augments along alternating paths; a failed add leaves the
// assignment untouched.
class CapacitatedMatcher {
 public:
  explicit CapacitatedMatcher(const FeasibilityMatroid& m);

  bool try_add(int element);
  void reset();

  // Blocks of the current assignment, element-sorted per BP.
  std::vector<std::vector<int>> blocks() const;
  int assigned_count() const { return assigned_; }

 private:
  bool augment(int element, std::vector<char>& visited);

  const FeasibilityMatroid* m_;
  std::vector<std::vector<int>> members_;  // bp -> assigned elements
  std::vector<int> owner_;                 // element -> bp, -1 if unassigned
  int assigned_ = 0;
};

bool is_independent(const FeasibilityMatroid& m, const std::vector<int>& elements);

// Independence for every subset of an <=25-element ground set, as a bitmask
// table (index = subset mask). Downward closure prunes most matching calls.
std::vector<char> independence_table(const FeasibilityMatroid& m);

struct BasisResult {
  std::vector<int> elements;                // sorted
  std::vector<std::vector<int>> assignment; // per BP, element-sorted
  Rational weight;                          // sum of weights over elements
};

// Greedy maximum-weight independent set: descending weight, ties broken by
// ascending element index; zero-weight elements are still added while
// independence permits, so the result is a maximal independent set. The
// assignment is the matching witness.
BasisResult max_weight_basis(const FeasibilityMatroid& m, const std::vector<Rational>& weights);

// Same greedy, but ordered by integer rank keys (higher key wins, ties by
// ascending index). Lets callers on a fixed bid grid skip rational compares.
BasisResult max_weight_basis_ranked(const FeasibilityMatroid& m, std::span<const int> rank_keys);

// t_x(w_-x): the minimum weight at which x belongs to some maximum-weight
// independent set, holding other weights fixed. The candidate set {0} u {w_y}
// suffices because membership can only flip where w_x crosses a competitor.
// nullopt encodes +infinity (x is not independent even as a singleton).
std::optional<Rational> threshold_bid(const FeasibilityMatroid& m, int element,
                                      const std::vector<Rational>& weights);

// Enumerates every maximum-weight independent set (guard: <= 20 elements) and
// checks that all of them share one multiset of positive weights.
bool lex_optimality_check(const FeasibilityMatroid& m, const std::vector<Rational>& weights);

struct CoveringResult {
  bool holds = false;
  Rational slack;        // basis weight minus the threshold sum
  Rational basis_weight; // sum over the greedy maximum-weight basis
  Rational threshold_sum;
};

// Revenue covering: sum of w over the max-weight basis >= sum of thresholds
// over any independent set A. Elements with infinite threshold are excluded
// from the sum (they cannot appear in an independent A anyway).
CoveringResult revenue_covering_check(const FeasibilityMatroid& m,
                                      const std::vector<Rational>& weights,
                                      const std::vector<int>& independent_set);

}  // namespace tfm
