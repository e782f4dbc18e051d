#include "tfmlab/mechanisms.hpp"

#include <algorithm>
#include <stdexcept>

namespace tfm {

void Tfm::validate() const {
  const bool fpa_dist = distribution == DistributionRule::EqFpa ||
                        distribution == DistributionRule::ShapleyFpa ||
                        distribution == DistributionRule::SerialFpa;
  if (fpa_dist && (confirmation != ConfirmationRule::Fpa || payment != PaymentRule::Fpa))
    throw std::invalid_argument(
        std::string("invalid TFM: distribution rule ") + rule_name(distribution) +
        " requires FPA confirmation and FPA payment (weak budget balance)");
}

std::string Tfm::name() const {
  return std::string(rule_name(inclusion)) + "/" + rule_name(confirmation) + "/" +
         rule_name(payment) + "/" + rule_name(distribution);
}

const char* rule_name(InclusionRule r) {
  return r == InclusionRule::WelfareMax ? "wm" : "serial";
}
const char* rule_name(ConfirmationRule r) { return r == ConfirmationRule::Fpa ? "fpa" : "spa"; }
const char* rule_name(PaymentRule r) { return r == PaymentRule::Fpa ? "fpa" : "spa"; }
const char* rule_name(DistributionRule r) {
  switch (r) {
    case DistributionRule::EqFpa: return "eq-fpa";
    case DistributionRule::EqSpa: return "eq-spa";
    case DistributionRule::ShapleyFpa: return "shapley-fpa";
    case DistributionRule::ShapleySpa: return "shapley-spa";
    case DistributionRule::SerialFpa: return "serial-fpa";
    case DistributionRule::SerialSpa: return "serial-spa";
    case DistributionRule::Null: return "null";
  }
  return "?";
}

std::optional<InclusionRule> parse_inclusion_rule(const std::string& s) {
  if (s == "wm") return InclusionRule::WelfareMax;
  if (s == "serial") return InclusionRule::SerialDictatorship;
  return std::nullopt;
}
std::optional<ConfirmationRule> parse_confirmation_rule(const std::string& s) {
  if (s == "fpa") return ConfirmationRule::Fpa;
  if (s == "spa") return ConfirmationRule::Spa;
  return std::nullopt;
}
std::optional<PaymentRule> parse_payment_rule(const std::string& s) {
  if (s == "fpa") return PaymentRule::Fpa;
  if (s == "spa") return PaymentRule::Spa;
  return std::nullopt;
}
std::optional<DistributionRule> parse_distribution_rule(const std::string& s) {
  if (s == "eq-fpa") return DistributionRule::EqFpa;
  if (s == "eq-spa") return DistributionRule::EqSpa;
  if (s == "shapley-fpa") return DistributionRule::ShapleyFpa;
  if (s == "shapley-spa") return DistributionRule::ShapleySpa;
  if (s == "serial-fpa") return DistributionRule::SerialFpa;
  if (s == "serial-spa") return DistributionRule::SerialSpa;
  if (s == "null") return DistributionRule::Null;
  return std::nullopt;
}

bool spa_drops_before(const TxRef& a, const TxRef& b) {
  if (a.bid != b.bid) return a.bid < b.bid;
  if (a.is_shill() != b.is_shill()) return a.is_shill();
  if (a.is_user()) return a.user > b.user;
  if (a.bp != b.bp) return a.bp > b.bp;
  return a.serial > b.serial;
}

std::vector<int> Outcome::confirmed_users() const {
  std::vector<int> users;
  for (const TxRef& tx : confirmed)
    if (tx.is_user()) users.push_back(tx.user);
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  return users;
}

Rational Outcome::total_payments() const {
  // Derivable only inside evaluate (shill payments tracked there); kept as a
  // field-free helper for user payments.
  Rational total;
  for (const Rational& p : user_payments) total += p;
  return total;
}

namespace {

void check_bids(const Allocation& alloc, const BidProfile& bids) {
  for (const Block& block : alloc.blocks)
    for (const TxRef& tx : block) {
      if (tx.is_user()) {
        if (tx.user < 0 || tx.user >= static_cast<int>(bids.size()))
          throw std::invalid_argument("allocation references a user outside the bid profile");
        if (tx.bid != bids[tx.user])
          throw std::invalid_argument("user tx bid diverges from the bid profile");
      }
    }
}

struct EvalCore {
  std::vector<TxRef> included;
  int dropped = -1;  // index into included, -1 when nothing is dropped/priced
  bool spa_tie = false;
  std::vector<char> confirmed;  // per included tx
  std::vector<Rational> tx_payment;

  Rational lowest_bid() const { return included[dropped].bid; }
};

EvalCore run_core(const Tfm& tfm, const Allocation& alloc, const BidProfile& bids) {
  check_bids(alloc, bids);
  EvalCore core;
  core.included = included_txs(alloc);

  const bool needs_drop =
      tfm.confirmation == ConfirmationRule::Spa || tfm.payment == PaymentRule::Spa ||
      tfm.distribution == DistributionRule::EqSpa ||
      tfm.distribution == DistributionRule::ShapleySpa ||
      tfm.distribution == DistributionRule::SerialSpa;
  if (needs_drop && !core.included.empty()) {
    core.dropped = 0;
    for (std::size_t i = 1; i < core.included.size(); ++i)
      if (spa_drops_before(core.included[i], core.included[core.dropped]))
        core.dropped = static_cast<int>(i);
    int tied = 0;
    for (const TxRef& tx : core.included)
      if (tx.bid == core.included[core.dropped].bid) ++tied;
    core.spa_tie = tied > 1;
  }

  core.confirmed.assign(core.included.size(), 1);
  if (tfm.confirmation == ConfirmationRule::Spa && core.dropped >= 0)
    core.confirmed[core.dropped] = 0;

  core.tx_payment.assign(core.included.size(), Rational(0));
  for (std::size_t i = 0; i < core.included.size(); ++i) {
    if (!core.confirmed[i]) continue;  // ex post IR: unconfirmed pay nothing
    if (tfm.payment == PaymentRule::Fpa) {
      core.tx_payment[i] = core.included[i].bid;
    } else {
      core.tx_payment[i] =
          static_cast<int>(i) == core.dropped ? Rational(0) : core.lowest_bid();
    }
  }
  return core;
}

// Revenue contribution of each included tx to each BP, as (full, others-only)
// running sums. others-only skips contributions a BP earns from its own txs.
void accumulate_distribution(const Tfm& tfm, const Allocation& alloc, const EvalCore& core,
                             std::vector<Rational>& revenues, std::vector<Rational>& others_only) {
  const int m = alloc.n_bps();
  revenues.assign(m, Rational(0));
  others_only.assign(m, Rational(0));
  if (tfm.distribution == DistributionRule::Null) return;

  const bool spa_version = tfm.distribution == DistributionRule::EqSpa ||
                           tfm.distribution == DistributionRule::ShapleySpa ||
                           tfm.distribution == DistributionRule::SerialSpa;

  for (std::size_t i = 0; i < core.included.size(); ++i) {
    const TxRef& tx = core.included[i];
    if (spa_version && static_cast<int>(i) == core.dropped) continue;
    const Rational amount = spa_version ? core.lowest_bid() : tx.bid;

    std::vector<int> includers;
    for (int j = 0; j < m; ++j)
      if (std::find(alloc.blocks[j].begin(), alloc.blocks[j].end(), tx) != alloc.blocks[j].end())
        includers.push_back(j);

    const auto credit = [&](int j, const Rational& share) {
      revenues[j] += share;
      if (!(tx.is_shill() && tx.bp == j)) others_only[j] += share;
    };

    switch (tfm.distribution) {
      case DistributionRule::EqFpa:
      case DistributionRule::EqSpa: {
        const Rational share = amount / Rational(m);
        for (int j = 0; j < m; ++j) credit(j, share);
        break;
      }
      case DistributionRule::ShapleyFpa:
      case DistributionRule::ShapleySpa: {
        const Rational share = amount / Rational(static_cast<long long>(includers.size()));
        for (int j : includers) credit(j, share);
        break;
      }
      case DistributionRule::SerialFpa:
      case DistributionRule::SerialSpa:
        credit(includers.front(), amount);
        break;
      case DistributionRule::Null:
        break;
    }
  }
}

}  // namespace

Allocation run_inclusion(const Tfm& tfm, const GameStructure& gs, const BidProfile& bids) {
  if (static_cast<int>(bids.size()) != gs.n_users)
    throw std::invalid_argument("bid profile size mismatch");
  Allocation alloc(gs.n_bps);
  if (tfm.inclusion == InclusionRule::WelfareMax) {
    const BasisResult basis = max_weight_basis(FeasibilityMatroid::from_game(gs), bids);
    for (int j = 0; j < gs.n_bps; ++j)
      for (int user : basis.assignment[j])
        alloc.blocks[j].push_back(TxRef::user_tx(user, bids[user]));
  } else {
    std::vector<char> taken(gs.n_users, 0);
    for (int j = 0; j < gs.n_bps; ++j) {
      std::vector<int> remaining;
      for (int user : gs.eligibility[j])
        if (!taken[user]) remaining.push_back(user);
      std::stable_sort(remaining.begin(), remaining.end(),
                       [&](int a, int b) { return bids[a] > bids[b]; });
      const int take = std::min<int>(gs.block_size, static_cast<int>(remaining.size()));
      for (int t = 0; t < take; ++t) {
        alloc.blocks[j].push_back(TxRef::user_tx(remaining[t], bids[remaining[t]]));
        taken[remaining[t]] = 1;
      }
      std::sort(alloc.blocks[j].begin(), alloc.blocks[j].end());
    }
  }
  return alloc;
}

std::vector<TxRef> confirm(const Tfm& tfm, const Allocation& alloc, const BidProfile& bids) {
  const EvalCore core = run_core(tfm, alloc, bids);
  std::vector<TxRef> out;
  for (std::size_t i = 0; i < core.included.size(); ++i)
    if (core.confirmed[i]) out.push_back(core.included[i]);
  return out;
}

std::vector<Rational> payments(const Tfm& tfm, const Allocation& alloc, const BidProfile& bids) {
  const EvalCore core = run_core(tfm, alloc, bids);
  std::vector<Rational> out(bids.size(), Rational(0));
  for (std::size_t i = 0; i < core.included.size(); ++i)
    if (core.included[i].is_user()) out[core.included[i].user] = core.tx_payment[i];
  return out;
}

std::vector<Rational> distribute(const Tfm& tfm, const Allocation& alloc, const BidProfile& bids) {
  const EvalCore core = run_core(tfm, alloc, bids);
  std::vector<Rational> revenues;
  std::vector<Rational> others_only;
  accumulate_distribution(tfm, alloc, core, revenues, others_only);

  Rational revenue_total;
  Rational payment_total;
  for (const Rational& r : revenues) revenue_total += r;
  for (const Rational& p : core.tx_payment) payment_total += p;
  if (revenue_total > payment_total)
    throw std::logic_error("distribution rule bug: BP revenue exceeds collected payments");
  return revenues;
}

Outcome evaluate(const Tfm& tfm, const GameStructure& gs, const BidProfile& bids,
                 const Allocation& alloc) {
  const FeasibilityCheck check = is_feasible(gs, alloc);
  if (!check)
    throw FeasibilityError(std::string("infeasible allocation (") +
                           FeasibilityCheck::violation_name(check.violation) + "): " + check.detail);

  const EvalCore core = run_core(tfm, alloc, bids);
  Outcome outcome;
  outcome.spa_tie = core.spa_tie;
  outcome.user_payments.assign(gs.n_users, Rational(0));

  std::vector<Rational> shill_cost(gs.n_bps, Rational(0));
  Rational payment_total;
  for (std::size_t i = 0; i < core.included.size(); ++i) {
    const TxRef& tx = core.included[i];
    if (core.confirmed[i]) outcome.confirmed.push_back(tx);
    const Rational& p = core.tx_payment[i];
    if (core.confirmed[i] && p > tx.bid)
      throw std::logic_error("payment rule bug: charge exceeds the bid");
    if (tx.is_user())
      outcome.user_payments[tx.user] = p;
    else
      shill_cost[tx.bp] += p;
    payment_total += p;
  }

  std::vector<Rational> others_only;
  accumulate_distribution(tfm, alloc, core, outcome.revenues, others_only);

  Rational revenue_total;
  for (const Rational& r : outcome.revenues) revenue_total += r;
  if (revenue_total > payment_total)
    throw std::logic_error("distribution rule bug: BP revenue exceeds collected payments");

  outcome.bp_payoffs.resize(gs.n_bps);
  for (int j = 0; j < gs.n_bps; ++j) outcome.bp_payoffs[j] = others_only[j] - shill_cost[j];
  return outcome;
}

Rational user_utility(const Tfm& tfm, const GameStructure& gs, int user, const Rational& valuation,
                      const BidProfile& bids, const Allocation& alloc) {
  const Outcome outcome = evaluate(tfm, gs, bids, alloc);
  bool confirmed = false;
  for (const TxRef& tx : outcome.confirmed)
    if (tx.is_user() && tx.user == user) confirmed = true;
  Rational u;
  if (confirmed) u += valuation;
  u -= outcome.user_payments[user];
  return u;
}

bool allocations_equivalent(const Allocation& a, const Allocation& b, const Tfm& tfm,
                            const BidProfile& bids) {
  const auto multiset_of = [&](const Allocation& alloc) {
    std::vector<Rational> bids_of_confirmed;
    for (const TxRef& tx : confirm(tfm, alloc, bids))
      if (tx.bid.is_positive()) bids_of_confirmed.push_back(tx.bid);
    std::sort(bids_of_confirmed.begin(), bids_of_confirmed.end());
    return bids_of_confirmed;
  };
  return multiset_of(a) == multiset_of(b);
}

}  // namespace tfm
