#include "tfmlab/bp_game.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <numeric>

namespace tfm {

std::vector<Rational> default_shill_grid(const BidProfile& bids) {
  const Rational step(1, 1000);
  std::vector<Rational> grid;
  grid.push_back(Rational(0));
  for (const Rational& b : bids) {
    grid.push_back(b);
    grid.push_back(b + step);
    if (b >= step) grid.push_back(b - step);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    r = r * (n - i) / (i + 1);
    if (r > cap) return cap + 1;
  }
  return r;
}

std::uint64_t count_blocks(std::size_t elig, int k, int budget, std::size_t grid,
                           std::uint64_t cap) {
  std::uint64_t total = 0;
  for (int u = 0; u <= k && u <= static_cast<int>(elig); ++u) {
    const std::uint64_t subsets = binomial(elig, u, cap);
    std::uint64_t shill_choices = 0;
    for (int s = 0; s <= std::min(budget, k - u); ++s)
      shill_choices += binomial(grid + s - 1, s, cap);  // multisets of size s
    total += subsets * shill_choices;
    if (total > cap) return cap + 1;
  }
  return total;
}

}  // namespace

std::vector<Block> enumerate_strategies(const GameStructure& gs, const BidProfile& bids, int bp,
                                        int shill_budget, const std::vector<Rational>& shill_grid,
                                        std::uint64_t guard) {
  gs.validate();
  if (bp < 0 || bp >= gs.n_bps) throw std::out_of_range("bp index outside the game");
  if (shill_budget < 0) throw std::invalid_argument("shill_budget must be >= 0");
  const auto& elig = gs.eligibility[bp];
  const int k = gs.block_size;

  const std::uint64_t count =
      count_blocks(elig.size(), k, shill_budget, shill_grid.size(), guard);
  if (count > guard)
    throw GuardError("enumerate_strategies: BP " + std::to_string(bp + 1) + " has more than " +
                     std::to_string(guard) + " feasible blocks on this grid");

  std::vector<Block> blocks;
  blocks.reserve(count);

  Block user_part;
  std::vector<int> shill_idx;  // non-decreasing grid indices

  const auto emit = [&]() {
    Block block = user_part;
    for (std::size_t s = 0; s < shill_idx.size(); ++s)
      block.push_back(TxRef::shill_tx(bp, static_cast<int>(s), shill_grid[shill_idx[s]]));
    blocks.push_back(std::move(block));
  };
  // Multisets of grid bids in lexicographic order, sizes 0..budget_left.
  const auto gen_shills = [&](int budget_left, auto&& self) -> void {
    emit();
    if (static_cast<int>(shill_idx.size()) == budget_left) return;
    const int start = shill_idx.empty() ? 0 : shill_idx.back();
    for (int g = start; g < static_cast<int>(shill_grid.size()); ++g) {
      shill_idx.push_back(g);
      self(budget_left, self);
      shill_idx.pop_back();
    }
  };

  const std::size_t n_elig = elig.size();
  for (std::size_t mask = 0; mask < (std::size_t(1) << n_elig); ++mask) {
    const int users = __builtin_popcountll(mask);
    if (users > k) continue;
    user_part.clear();
    for (std::size_t t = 0; t < n_elig; ++t)
      if ((mask >> t) & 1u) user_part.push_back(TxRef::user_tx(elig[t], bids[elig[t]]));
    shill_idx.clear();
    gen_shills(std::min(shill_budget, k - users), gen_shills);
  }
  return blocks;
}

namespace {

// Exhaustive-scan engine. All bids are rescaled to a common integer scale
// D * lcm(1..m) so every payment, revenue, and payoff in any rule composition
// is an exact int64; Rational appears only at the API boundary.
class ProfileScanner {
 public:
  ProfileScanner(const Tfm& tfm, const GameStructure& gs, const BidProfile& bids,
                 std::vector<std::vector<Block>> block_lists)
      : tfm_(tfm), gs_(gs), lists_(std::move(block_lists)) {
    needs_drop_ = tfm.confirmation == ConfirmationRule::Spa ||
                  tfm.payment == PaymentRule::Spa ||
                  tfm.distribution == DistributionRule::EqSpa ||
                  tfm.distribution == DistributionRule::ShapleySpa ||
                  tfm.distribution == DistributionRule::SerialSpa;
    spa_dist_ = tfm.distribution == DistributionRule::EqSpa ||
                tfm.distribution == DistributionRule::ShapleySpa ||
                tfm.distribution == DistributionRule::SerialSpa;

    long long denom_lcm = 1;
    const auto fold = [&denom_lcm](const Rational& r) {
      denom_lcm = std::lcm(denom_lcm, r.den());
      if (denom_lcm > (1LL << 40)) throw RationalOverflow();
    };
    for (const Rational& b : bids) fold(b);
    for (const auto& list : lists_)
      for (const Block& block : list)
        for (const TxRef& tx : block)
          if (tx.is_shill()) fold(tx.bid);
    long long payoff_lcm = 1;
    for (int j = 1; j <= gs.n_bps; ++j) payoff_lcm = std::lcm(payoff_lcm, (long long)j);
    scale_ = Rational(denom_lcm * payoff_lcm);

    user_bid_.resize(gs.n_users);
    for (int i = 0; i < gs.n_users; ++i) user_bid_[i] = scaled(bids[i]);

    descs_.resize(lists_.size());
    for (std::size_t j = 0; j < lists_.size(); ++j) {
      descs_[j].reserve(lists_[j].size());
      for (const Block& block : lists_[j]) descs_[j].push_back(make_desc(block));
    }
  }

  int n_bps() const { return gs_.n_bps; }
  std::size_t list_size(int j) const { return lists_[j].size(); }
  const Block& block_of(int j, std::size_t idx) const { return lists_[j][idx]; }

  Rational to_rational(long long v) const { return Rational(v) / scale_; }

  struct Eval {
    std::array<long long, 8> payoff{};
    std::array<long long, 8> revenue{};
  };

  void eval(const std::size_t* idx, Eval& out) const {
    const int m = gs_.n_bps;
    std::uint32_t user_union = 0;
    int shill_count = 0;
    for (int j = 0; j < m; ++j) {
      const BlockDesc& d = descs_[j][idx[j]];
      user_union |= d.user_mask;
      shill_count += d.n_shills;
    }

    // Locate the dropped transaction for the SPA rules.
    bool have_drop = false;
    long long drop_bid = 0;
    bool drop_is_user = false;
    int drop_user = -1, drop_bp = -1, drop_serial = -1;
    if (needs_drop_) {
      for (std::uint32_t rest = user_union; rest;) {
        const int u = __builtin_ctz(rest);
        rest &= rest - 1;
        consider_drop(user_bid_[u], true, u, -1, -1, have_drop, drop_bid, drop_is_user, drop_user,
                      drop_bp, drop_serial);
      }
      for (int j = 0; j < m; ++j) {
        const BlockDesc& d = descs_[j][idx[j]];
        for (int s = 0; s < d.n_shills; ++s)
          consider_drop(d.shill_bid[s], false, -1, j, d.shill_serial[s], have_drop, drop_bid,
                        drop_is_user, drop_user, drop_bp, drop_serial);
      }
    }

    const bool spa_conf = tfm_.confirmation == ConfirmationRule::Spa;
    const bool spa_pay = tfm_.payment == PaymentRule::Spa;
    const auto tx_payment = [&](long long bid, bool confirmed, bool is_drop) -> long long {
      if (!confirmed) return 0;
      if (!spa_pay) return bid;
      return is_drop ? 0 : drop_bid;
    };

    Eval e;

    // Per-BP shill payments (paid by the owner).
    for (int j = 0; j < m; ++j) {
      const BlockDesc& d = descs_[j][idx[j]];
      for (int s = 0; s < d.n_shills; ++s) {
        const bool is_drop =
            have_drop && !drop_is_user && drop_bp == j && drop_serial == d.shill_serial[s];
        const bool confirmed = !(spa_conf && is_drop);
        e.payoff[j] -= tx_payment(d.shill_bid[s], confirmed, is_drop);
      }
    }
    (void)shill_count;

    // Distribution-rule contributions.
    if (tfm_.distribution != DistributionRule::Null) {
      const long long L = scale_per_bp_lcm();
      const auto credit_all = [&](long long amount, int owner_bp) {
        const long long share = amount / m;  // exact: scale carries lcm(1..m)
        (void)L;
        for (int j = 0; j < m; ++j) {
          e.revenue[j] += share;
          if (j != owner_bp) e.payoff[j] += share;
        }
      };
      const auto credit_includers = [&](long long amount, int owner_bp, std::uint32_t user,
                                        int shill_bp) {
        // Shapley: split among includers; Serial: first includer only.
        if (tfm_.distribution == DistributionRule::SerialFpa ||
            tfm_.distribution == DistributionRule::SerialSpa) {
          int first = shill_bp;
          if (shill_bp < 0)
            for (int j = 0; j < m; ++j)
              if (descs_[j][idx[j]].user_mask & user) {
                first = j;
                break;
              }
          e.revenue[first] += amount;
          if (first != owner_bp) e.payoff[first] += amount;
          return;
        }
        if (shill_bp >= 0) {
          e.revenue[shill_bp] += amount;
          if (shill_bp != owner_bp) e.payoff[shill_bp] += amount;
          return;
        }
        int includers = 0;
        for (int j = 0; j < m; ++j)
          if (descs_[j][idx[j]].user_mask & user) ++includers;
        const long long share = amount / includers;  // exact: lcm(1..m) | scale
        for (int j = 0; j < m; ++j)
          if (descs_[j][idx[j]].user_mask & user) {
            e.revenue[j] += share;
            e.payoff[j] += share;
          }
      };

      const bool eq = tfm_.distribution == DistributionRule::EqFpa ||
                      tfm_.distribution == DistributionRule::EqSpa;
      for (std::uint32_t rest = user_union; rest;) {
        const int u = __builtin_ctz(rest);
        rest &= rest - 1;
        const bool is_drop = have_drop && drop_is_user && drop_user == u;
        if (spa_dist_ && is_drop) continue;
        const long long amount = spa_dist_ ? drop_bid : user_bid_[u];
        if (eq)
          credit_all(amount, -1);
        else
          credit_includers(amount, -1, std::uint32_t(1) << u, -1);
      }
      for (int j = 0; j < m; ++j) {
        const BlockDesc& d = descs_[j][idx[j]];
        for (int s = 0; s < d.n_shills; ++s) {
          const bool is_drop =
              have_drop && !drop_is_user && drop_bp == j && drop_serial == d.shill_serial[s];
          if (spa_dist_ && is_drop) continue;
          const long long amount = spa_dist_ ? drop_bid : d.shill_bid[s];
          if (eq)
            credit_all(amount, j);
          else
            credit_includers(amount, j, 0, j);
        }
      }
    }

    out = e;
  }

  // Sorted positive confirmed bids at the integer scale (equivalence key).
  std::vector<long long> confirmed_multiset(const std::size_t* idx) const {
    const int m = gs_.n_bps;
    std::uint32_t user_union = 0;
    for (int j = 0; j < m; ++j) user_union |= descs_[j][idx[j]].user_mask;

    bool have_drop = false;
    long long drop_bid = 0;
    bool drop_is_user = false;
    int drop_user = -1, drop_bp = -1, drop_serial = -1;
    if (tfm_.confirmation == ConfirmationRule::Spa) {
      for (std::uint32_t rest = user_union; rest;) {
        const int u = __builtin_ctz(rest);
        rest &= rest - 1;
        consider_drop(user_bid_[u], true, u, -1, -1, have_drop, drop_bid, drop_is_user, drop_user,
                      drop_bp, drop_serial);
      }
      for (int j = 0; j < m; ++j) {
        const BlockDesc& d = descs_[j][idx[j]];
        for (int s = 0; s < d.n_shills; ++s)
          consider_drop(d.shill_bid[s], false, -1, j, d.shill_serial[s], have_drop, drop_bid,
                        drop_is_user, drop_user, drop_bp, drop_serial);
      }
    }

    std::vector<long long> bids;
    for (std::uint32_t rest = user_union; rest;) {
      const int u = __builtin_ctz(rest);
      rest &= rest - 1;
      if (have_drop && drop_is_user && drop_user == u) continue;
      if (user_bid_[u] > 0) bids.push_back(user_bid_[u]);
    }
    for (int j = 0; j < gs_.n_bps; ++j) {
      const BlockDesc& d = descs_[j][idx[j]];
      for (int s = 0; s < d.n_shills; ++s) {
        if (have_drop && !drop_is_user && drop_bp == j && drop_serial == d.shill_serial[s])
          continue;
        if (d.shill_bid[s] > 0) bids.push_back(d.shill_bid[s]);
      }
    }
    std::sort(bids.begin(), bids.end());
    return bids;
  }

 private:
  struct BlockDesc {
    std::uint32_t user_mask = 0;
    int n_shills = 0;
    std::array<long long, 8> shill_bid{};
    std::array<int, 8> shill_serial{};
  };

  long long scaled(const Rational& r) const {
    return r.num() * (scale_.num() / r.den());
  }

  long long scale_per_bp_lcm() const { return scale_.num(); }

  BlockDesc make_desc(const Block& block) const {
    BlockDesc d;
    for (const TxRef& tx : block) {
      if (tx.is_user()) {
        d.user_mask |= std::uint32_t(1) << tx.user;
      } else {
        if (d.n_shills >= 8) throw GuardError("block holds more than 8 shill transactions");
        d.shill_bid[d.n_shills] = scaled(tx.bid);
        d.shill_serial[d.n_shills] = tx.serial;
        ++d.n_shills;
      }
    }
    return d;
  }

  // Keep the transaction that drops first under the SPA order.
  static void consider_drop(long long bid, bool is_user, int user, int bp, int serial,
                            bool& have, long long& best_bid, bool& best_is_user, int& best_user,
                            int& best_bp, int& best_serial) {
    bool before;
    if (!have) {
      before = true;
    } else if (bid != best_bid) {
      before = bid < best_bid;
    } else if (is_user != best_is_user) {
      before = !is_user;  // shills drop before users
    } else if (is_user) {
      before = user > best_user;  // higher user index drops first
    } else if (bp != best_bp) {
      before = bp > best_bp;
    } else {
      before = serial > best_serial;
    }
    if (before) {
      have = true;
      best_bid = bid;
      best_is_user = is_user;
      best_user = user;
      best_bp = bp;
      best_serial = serial;
    }
  }

  Tfm tfm_;
  GameStructure gs_;
  std::vector<std::vector<Block>> lists_;
  std::vector<std::vector<BlockDesc>> descs_;
  std::vector<long long> user_bid_;
  Rational scale_{1};
  bool needs_drop_ = false;
  bool spa_dist_ = false;
};

Block normalized(const Block& block) {
  Block b = block;
  std::sort(b.begin(), b.end());
  return b;
}

// Index of `block` in `list`, appending it when missing.
std::size_t ensure_block(std::vector<Block>& list, const Block& block) {
  const Block key = normalized(block);
  for (std::size_t i = 0; i < list.size(); ++i)
    if (normalized(list[i]) == key) return i;
  list.push_back(block);
  return list.size() - 1;
}

std::vector<std::vector<Block>> strategy_lists(const GameStructure& gs, const BidProfile& bids,
                                               int shill_budget,
                                               const std::vector<Rational>& shill_grid,
                                               std::uint64_t per_bp_guard) {
  std::vector<std::vector<Block>> lists;
  lists.reserve(gs.n_bps);
  for (int j = 0; j < gs.n_bps; ++j)
    lists.push_back(enumerate_strategies(gs, bids, j, shill_budget, shill_grid, per_bp_guard));
  return lists;
}

}  // namespace

BpGameVerdict is_nash(const Tfm& tfm, const GameStructure& gs, const BidProfile& bids,
                      const Allocation& alloc, int shill_budget,
                      const std::vector<Rational>& shill_grid) {
  tfm.validate();
  const FeasibilityCheck check = is_feasible(gs, alloc);
  if (!check)
    throw FeasibilityError(std::string("is_nash: infeasible allocation (") +
                           FeasibilityCheck::violation_name(check.violation) + "): " +
                           check.detail);

  auto lists = strategy_lists(gs, bids, shill_budget, shill_grid, 1'000'000);
  std::vector<std::size_t> at(gs.n_bps);
  for (int j = 0; j < gs.n_bps; ++j) at[j] = ensure_block(lists[j], alloc.blocks[j]);

  ProfileScanner scanner(tfm, gs, bids, std::move(lists));
  ProfileScanner::Eval base;
  scanner.eval(at.data(), base);

  BpGameVerdict verdict;
  verdict.intended = alloc;
  verdict.shill_grid = shill_grid;
  verdict.shill_budget = shill_budget;
  verdict.is_nash = true;

  std::vector<std::size_t> idx = at;
  for (int j = 0; j < gs.n_bps && verdict.is_nash; ++j) {
    for (std::size_t b = 0; b < scanner.list_size(j); ++b) {
      if (b == at[j]) continue;
      idx[j] = b;
      ProfileScanner::Eval e;
      scanner.eval(idx.data(), e);
      ++verdict.joint_profiles;
      if (e.payoff[j] > base.payoff[j]) {
        verdict.is_nash = false;
        DeviationWitness w;
        w.bp = j;
        w.block = scanner.block_of(j, b);
        w.old_payoff = scanner.to_rational(base.payoff[j]);
        w.new_payoff = scanner.to_rational(e.payoff[j]);
        verdict.deviation = std::move(w);
        break;
      }
    }
    idx[j] = at[j];
  }
  return verdict;
}

BpGameVerdict strong_bpic_check(const Tfm& tfm, const GameStructure& gs, const BidProfile& bids,
                                int shill_budget, const std::vector<Rational>& shill_grid,
                                std::uint64_t enumeration_guard) {
  tfm.validate();
  gs.validate();
  const Allocation intended = run_inclusion(tfm, gs, bids);

  BpGameVerdict verdict = is_nash(tfm, gs, bids, intended, shill_budget, shill_grid);
  if (!verdict.is_nash) {
    verdict.strong_bpic = false;
    return verdict;
  }

  auto lists = strategy_lists(gs, bids, shill_budget, shill_grid, enumeration_guard);
  std::vector<std::size_t> at(gs.n_bps);
  std::uint64_t total = 1;
  for (int j = 0; j < gs.n_bps; ++j) {
    at[j] = ensure_block(lists[j], intended.blocks[j]);
    total *= lists[j].size();
    if (total > enumeration_guard)
      throw GuardError("strong_bpic_check: joint strategy space exceeds the guard (" +
                       std::to_string(enumeration_guard) + " profiles)");
  }

  const int m = gs.n_bps;
  std::vector<std::size_t> sizes(m);
  for (int j = 0; j < m; ++j) sizes[j] = lists[j].size();

  ProfileScanner scanner(tfm, gs, bids, std::move(lists));

  // Opponent-profile strides: key_j = sum over h != j of idx[h] * stride[j][h].
  std::vector<std::vector<std::uint64_t>> stride(m, std::vector<std::uint64_t>(m, 0));
  std::vector<std::uint64_t> key_space(m, 1);
  for (int j = 0; j < m; ++j) {
    std::uint64_t s = 1;
    for (int h = m - 1; h >= 0; --h) {
      if (h == j) continue;
      stride[j][h] = s;
      s *= sizes[h];
    }
    key_space[j] = s;
  }

  constexpr long long kUnset = std::numeric_limits<long long>::min();
  std::vector<std::vector<long long>> best(m);
  for (int j = 0; j < m; ++j) best[j].assign(key_space[j], kUnset);

  std::vector<std::size_t> idx(m, 0);
  ProfileScanner::Eval e;
  const auto for_each_profile = [&](auto&& body) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      body();
      int j = m - 1;
      while (j >= 0 && ++idx[j] == sizes[j]) {
        idx[j] = 0;
        --j;
      }
      if (j < 0) break;
    }
  };

  // Pass 1: per-BP best responses against every opponent profile.
  for_each_profile([&]() {
    scanner.eval(idx.data(), e);
    for (int j = 0; j < m; ++j) {
      std::uint64_t key = 0;
      for (int h = 0; h < m; ++h)
        if (h != j) key += idx[h] * stride[j][h];
      if (e.payoff[j] > best[j][key]) best[j][key] = e.payoff[j];
    }
  });

  ProfileScanner::Eval intended_eval;
  scanner.eval(at.data(), intended_eval);
  const std::vector<long long> intended_multiset = scanner.confirmed_multiset(at.data());

  // Pass 2: every joint Nash profile must be equivalent to the intended
  // allocation or Pareto dominated by it (in revenues).
  bool ok = true;
  std::optional<Allocation> counter;
  for_each_profile([&]() {
    if (!ok) return;
    scanner.eval(idx.data(), e);
    for (int j = 0; j < m; ++j) {
      std::uint64_t key = 0;
      for (int h = 0; h < m; ++h)
        if (h != j) key += idx[h] * stride[j][h];
      if (e.payoff[j] != best[j][key]) return;  // not a Nash profile
    }
    if (scanner.confirmed_multiset(idx.data()) == intended_multiset) return;
    bool weakly = true;
    bool strictly = false;
    for (int j = 0; j < m; ++j) {
      if (intended_eval.revenue[j] < e.revenue[j]) weakly = false;
      if (intended_eval.revenue[j] > e.revenue[j]) strictly = true;
    }
    if (weakly && strictly) return;  // dominated
    ok = false;
    Allocation a(m);
    for (int j = 0; j < m; ++j) a.blocks[j] = scanner.block_of(j, idx[j]);
    counter = std::move(a);
  });

  verdict.strong_bpic = ok;
  verdict.counter_equilibrium = std::move(counter);
  verdict.joint_profiles = total;
  return verdict;
}

bool pareto_dominates(const Tfm& tfm, const BidProfile& bids, const Allocation& a,
                      const Allocation& b) {
  const std::vector<Rational> ra = distribute(tfm, a, bids);
  const std::vector<Rational> rb = distribute(tfm, b, bids);
  if (ra.size() != rb.size())
    throw std::invalid_argument("pareto_dominates: allocations disagree on the BP count");
  bool weakly = true;
  bool strictly = false;
  for (std::size_t j = 0; j < ra.size(); ++j) {
    if (ra[j] < rb[j]) weakly = false;
    if (ra[j] > rb[j]) strictly = true;
  }
  return weakly && strictly;
}

}  // namespace tfm
