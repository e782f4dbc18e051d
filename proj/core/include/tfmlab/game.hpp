#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfmlab/rational.hpp"

namespace tfm {

/// Thrown when an operation is handed an infeasible allocation.
class FeasibilityError : public std::invalid_argument {
 public:
  explicit FeasibilityError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an enumeration guard would be exceeded.
class GuardError : public std::runtime_error {
 public:
  explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

// A game structure: n users (each one transaction), m block producers, the
// per-BP sets S_j of user transactions a BP may include, and the block size k.
struct GameStructure {
  int n_users = 0;
  int n_bps = 0;
  int block_size = 1;                          // k
  std::vector<std::vector<int>> eligibility;   // S_j, 0-based, sorted, unique

  static GameStructure bp_symmetric(int n_users, int n_bps, int block_size);

  // True iff S_j = {0..n-1} for every BP.
  bool bp_symmetric_setting() const;

  void validate() const;  // throws std::invalid_argument
};

// One transaction reference: either a user's transaction or a shill
// transaction fabricated by a BP. Shills are identified by (bp, serial) so
// equal-bid shills stay distinguishable.
struct TxRef {
  enum class Origin : std::uint8_t { User, Shill };

  Origin origin = Origin::User;
  int user = -1;    // set when origin == User
  int bp = -1;      // set when origin == Shill
  int serial = 0;   // set when origin == Shill
  Rational bid;

  static TxRef user_tx(int user, Rational bid) {
    TxRef t;
    t.origin = Origin::User;
    t.user = user;
    t.bid = bid;
    return t;
  }
  static TxRef shill_tx(int bp, int serial, Rational bid) {
    TxRef t;
    t.origin = Origin::Shill;
    t.bp = bp;
    t.serial = serial;
    t.bid = bid;
    return t;
  }

  bool is_user() const { return origin == Origin::User; }
  bool is_shill() const { return origin == Origin::Shill; }

  friend bool operator==(const TxRef& a, const TxRef& b) {
    if (a.origin != b.origin) return false;
    if (a.is_user()) return a.user == b.user && a.bid == b.bid;
    return a.bp == b.bp && a.serial == b.serial && a.bid == b.bid;
  }

  // Canonical order: users by index, then shills by (bp, serial), then bid.
  friend bool operator<(const TxRef& a, const TxRef& b) {
    if (a.origin != b.origin) return a.is_user();
    if (a.is_user()) {
      if (a.user != b.user) return a.user < b.user;
      return a.bid < b.bid;
    }
    if (a.bp != b.bp) return a.bp < b.bp;
    if (a.serial != b.serial) return a.serial < b.serial;
    return a.bid < b.bid;
  }

  std::string str() const;
};

using Block = std::vector<TxRef>;

// A profile of block choices, one block per BP.
struct Allocation {
  std::vector<Block> blocks;

  Allocation() = default;
  explicit Allocation(int n_bps) : blocks(n_bps) {}
  int n_bps() const { return static_cast<int>(blocks.size()); }
};

using Profile = std::vector<Rational>;
using BidProfile = Profile;
using ValuationProfile = Profile;

struct FeasibilityCheck {
  enum class Violation {
    None,
    BlockCount,     // wrong number of blocks
    BlockSize,      // |B_j| > k
    Eligibility,    // user tx outside S_j
    ShillOwnership, // shill tx created by a different BP
    DuplicateTx,    // same tx twice within one block
    NegativeBid,
  };

  bool ok = true;
  Violation violation = Violation::None;
  int bp = -1;
  std::string detail;

  explicit operator bool() const { return ok; }
  static const char* violation_name(Violation v);
};

// True iff every block obeys the size cap, eligibility, and shill ownership.
FeasibilityCheck is_feasible(const GameStructure& gs, const Allocation& alloc);

// T(B): every distinct transaction included at least once, canonical order.
std::vector<TxRef> included_txs(const Allocation& alloc);

// User-origin projection of T(B): sorted user indices.
std::vector<int> included_users(const Allocation& alloc);

// As included_txs, but validates feasibility first and names the violated
// constraint on failure.
std::vector<TxRef> included_txs_checked(const GameStructure& gs, const Allocation& alloc);

// Sum of valuations over confirmed users. Shill transactions carry no value.
Rational welfare(const std::vector<int>& confirmed_users, const ValuationProfile& valuations);

}  // namespace tfm
