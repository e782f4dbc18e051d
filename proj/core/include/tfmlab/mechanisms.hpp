#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tfmlab/game.hpp"
#include "tfmlab/matroid.hpp"

namespace tfm {

enum class InclusionRule { WelfareMax, SerialDictatorship };
enum class ConfirmationRule { Fpa, Spa };
enum class PaymentRule { Fpa, Spa };
enum class DistributionRule { EqFpa, EqSpa, ShapleyFpa, ShapleySpa, SerialFpa, SerialSpa, Null };

// A transaction fee mechanism: inclusion, confirmation, payment, and
// distribution rules. Only weakly budget-balanced compositions are valid;
// validate() rejects the rest (an "-fpa" distribution credits revenue for the
// dropped transaction that SPA confirmation or payment never collects).
struct Tfm {
  InclusionRule inclusion = InclusionRule::WelfareMax;
  ConfirmationRule confirmation = ConfirmationRule::Fpa;
  PaymentRule payment = PaymentRule::Fpa;
  DistributionRule distribution = DistributionRule::EqFpa;

  void validate() const;

  static Tfm fpa_eq() { return {InclusionRule::WelfareMax, ConfirmationRule::Fpa, PaymentRule::Fpa, DistributionRule::EqFpa}; }
  static Tfm spa_eq() { return {InclusionRule::WelfareMax, ConfirmationRule::Spa, PaymentRule::Spa, DistributionRule::EqSpa}; }
  static Tfm fpa_shapley() { return {InclusionRule::WelfareMax, ConfirmationRule::Fpa, PaymentRule::Fpa, DistributionRule::ShapleyFpa}; }
  static Tfm spa_shapley() { return {InclusionRule::WelfareMax, ConfirmationRule::Spa, PaymentRule::Spa, DistributionRule::ShapleySpa}; }
  static Tfm fpa_serial() { return {InclusionRule::SerialDictatorship, ConfirmationRule::Fpa, PaymentRule::Fpa, DistributionRule::SerialFpa}; }
  static Tfm spa_serial() { return {InclusionRule::SerialDictatorship, ConfirmationRule::Spa, PaymentRule::Spa, DistributionRule::SerialSpa}; }
  static Tfm fpa_null() { return {InclusionRule::WelfareMax, ConfirmationRule::Fpa, PaymentRule::Fpa, DistributionRule::Null}; }

  std::string name() const;

  friend bool operator==(const Tfm&, const Tfm&) = default;
};

const char* rule_name(InclusionRule r);
const char* rule_name(ConfirmationRule r);
const char* rule_name(PaymentRule r);
const char* rule_name(DistributionRule r);
std::optional<InclusionRule> parse_inclusion_rule(const std::string& s);
std::optional<ConfirmationRule> parse_confirmation_rule(const std::string& s);
std::optional<PaymentRule> parse_payment_rule(const std::string& s);
std::optional<DistributionRule> parse_distribution_rule(const std::string& s);

struct Outcome {
  std::vector<TxRef> confirmed;        // canonical order
  std::vector<Rational> user_payments; // per user
  std::vector<Rational> revenues;      // per BP, full distribution-rule revenue
  // Paper payoff: revenue earned from transactions other than the BP's own,
  // minus the payments the BP makes for its own shill transactions.
  std::vector<Rational> bp_payoffs;
  bool spa_tie = false;                // several txs tied at the dropped bid

  std::vector<int> confirmed_users() const;
  Rational total_payments() const;     // users plus shills
};

// The recommended allocation for a bid profile (shill-free).
Allocation run_inclusion(const Tfm& tfm, const GameStructure& gs, const BidProfile& bids);

std::vector<TxRef> confirm(const Tfm& tfm, const Allocation& alloc, const BidProfile& bids);
std::vector<Rational> payments(const Tfm& tfm, const Allocation& alloc, const BidProfile& bids);
std::vector<Rational> distribute(const Tfm& tfm, const Allocation& alloc, const BidProfile& bids);

Outcome evaluate(const Tfm& tfm, const GameStructure& gs, const BidProfile& bids,
                 const Allocation& alloc);

// Quasi-linear user payoff v_i * [i confirmed] - p_i.
Rational user_utility(const Tfm& tfm, const GameStructure& gs, int user, const Rational& valuation,
                      const BidProfile& bids, const Allocation& alloc);

// Two allocations are equivalent when the multisets of positive bids of their
// confirmed transactions coincide (confirmation rule taken from the TFM).
bool allocations_equivalent(const Allocation& a, const Allocation& b, const Tfm& tfm,
                            const BidProfile& bids);

// The dropped-transaction order used by the SPA rules: lowest bid first; on
// ties shills drop before user txs, users drop by descending index, shills by
// descending (bp, serial).
bool spa_drops_before(const TxRef& a, const TxRef& b);

}  // namespace tfm
