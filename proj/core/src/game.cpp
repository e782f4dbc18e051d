#include "tfmlab/game.hpp"

#include <algorithm>
#include <set>

namespace tfm {

GameStructure GameStructure::bp_symmetric(int n_users, int n_bps, int block_size) {
  GameStructure gs;
  gs.n_users = n_users;
  gs.n_bps = n_bps;
  gs.block_size = block_size;
  std::vector<int> all(n_users);
  for (int i = 0; i < n_users; ++i) all[i] = i;
  gs.eligibility.assign(n_bps, all);
  return gs;
}

bool GameStructure::bp_symmetric_setting() const {
  for (const auto& s : eligibility) {
    if (static_cast<int>(s.size()) != n_users) return false;
  }
  return true;
}

void GameStructure::validate() const {
  if (n_users < 0) throw std::invalid_argument("n_users must be >= 0");
  if (n_bps < 1) throw std::invalid_argument("n_bps must be >= 1");
  if (block_size < 1) throw std::invalid_argument("block_size must be >= 1");
  if (static_cast<int>(eligibility.size()) != n_bps)
    throw std::invalid_argument("eligibility must have one entry per BP");
  for (int j = 0; j < n_bps; ++j) {
    const auto& s = eligibility[j];
    for (std::size_t t = 0; t < s.size(); ++t) {
      if (s[t] < 0 || s[t] >= n_users)
        throw std::invalid_argument("S_" + std::to_string(j + 1) + " contains an out-of-range user index");
      if (t > 0 && s[t] <= s[t - 1])
        throw std::invalid_argument("S_" + std::to_string(j + 1) + " must be sorted and duplicate-free");
    }
  }
}

std::string TxRef::str() const {
  if (is_user()) return "user(" + std::to_string(user + 1) + ", bid " + bid.str() + ")";
  return "shill(bp " + std::to_string(bp + 1) + ", serial " + std::to_string(serial) +
         ", bid " + bid.str() + ")";
}

const char* FeasibilityCheck::violation_name(Violation v) {
  switch (v) {
    case Violation::None: return "none";
    case Violation::BlockCount: return "block-count";
    case Violation::BlockSize: return "block-size";
    case Violation::Eligibility: return "eligibility";
    case Violation::ShillOwnership: return "shill-ownership";
    case Violation::DuplicateTx: return "duplicate-tx";
    case Violation::NegativeBid: return "negative-bid";
  }
  return "unknown";
}

namespace {

FeasibilityCheck fail(FeasibilityCheck::Violation v, int bp, std::string detail) {
  FeasibilityCheck c;
  c.ok = false;
  c.violation = v;
  c.bp = bp;
  c.detail = std::move(detail);
  return c;
}

}  // namespace

FeasibilityCheck is_feasible(const GameStructure& gs, const Allocation& alloc) {
  using V = FeasibilityCheck::Violation;
  if (alloc.n_bps() != gs.n_bps)
    return fail(V::BlockCount, -1,
                "allocation has " + std::to_string(alloc.n_bps()) + " blocks, expected " +
                    std::to_string(gs.n_bps));
  for (int j = 0; j < gs.n_bps; ++j) {
    const Block& block = alloc.blocks[j];
    if (static_cast<int>(block.size()) > gs.block_size)
      return fail(V::BlockSize, j,
                  "block " + std::to_string(j + 1) + " holds " + std::to_string(block.size()) +
                      " txs, cap is " + std::to_string(gs.block_size));
    const auto& elig = gs.eligibility[j];
    for (std::size_t a = 0; a < block.size(); ++a) {
      const TxRef& tx = block[a];
      if (tx.bid.is_negative())
        return fail(V::NegativeBid, j, tx.str() + " has a negative bid");
      if (tx.is_user()) {
        if (!std::binary_search(elig.begin(), elig.end(), tx.user))
          return fail(V::Eligibility, j,
                      tx.str() + " is outside S_" + std::to_string(j + 1));
      } else if (tx.bp != j) {
        return fail(V::ShillOwnership, j,
                    tx.str() + " was not created by BP " + std::to_string(j + 1));
      }
      for (std::size_t b = a + 1; b < block.size(); ++b) {
        if (tx == block[b])
          return fail(V::DuplicateTx, j,
                      tx.str() + " appears twice in block " + std::to_string(j + 1));
      }
    }
  }
  return {};
}

std::vector<TxRef> included_txs(const Allocation& alloc) {
  std::vector<TxRef> txs;
  for (const Block& block : alloc.blocks)
    txs.insert(txs.end(), block.begin(), block.end());
  std::sort(txs.begin(), txs.end());
  txs.erase(std::unique(txs.begin(), txs.end()), txs.end());
  return txs;
}

std::vector<int> included_users(const Allocation& alloc) {
  std::set<int> users;
  for (const Block& block : alloc.blocks)
    for (const TxRef& tx : block)
      if (tx.is_user()) users.insert(tx.user);
  return {users.begin(), users.end()};
}

std::vector<TxRef> included_txs_checked(const GameStructure& gs, const Allocation& alloc) {
  const FeasibilityCheck check = is_feasible(gs, alloc);
  if (!check)
    throw FeasibilityError(std::string("infeasible allocation (") +
                           FeasibilityCheck::violation_name(check.violation) + "): " + check.detail);
  return included_txs(alloc);
}

Rational welfare(const std::vector<int>& confirmed_users, const ValuationProfile& valuations) {
  Rational total;
  for (int user : confirmed_users) {
    if (user < 0 || user >= static_cast<int>(valuations.size()))
      throw std::out_of_range("confirmed user index outside the valuation profile");
    total += valuations[user];
  }
  return total;
}

}  // namespace tfm
