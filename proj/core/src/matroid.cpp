#include "tfmlab/matroid.hpp"

#include <algorithm>
#include <numeric>

namespace tfm {

FeasibilityMatroid FeasibilityMatroid::from_game(const GameStructure& gs) {
  FeasibilityMatroid m;
  m.n_elements = gs.n_users;
  m.eligibility = gs.eligibility;
  m.capacity = gs.block_size;
  return m;
}

FeasibilityMatroid FeasibilityMatroid::uniform(int n_elements, int rank) {
  FeasibilityMatroid m;
  m.n_elements = n_elements;
  m.capacity = rank;
  std::vector<int> all(n_elements);
  std::iota(all.begin(), all.end(), 0);
  m.eligibility.push_back(std::move(all));
  return m;
}

CapacitatedMatcher::CapacitatedMatcher(const FeasibilityMatroid& m)
    : m_(&m), members_(m.eligibility.size()), owner_(m.n_elements, -1) {}

void CapacitatedMatcher::reset() {
  for (auto& v : members_) v.clear();
  std::fill(owner_.begin(), owner_.end(), -1);
  assigned_ = 0;
}

bool CapacitatedMatcher::augment(int element, std::vector<char>& visited) {
  for (int j = 0; j < m_->n_bps(); ++j) {
    if (visited[j]) continue;
    if (!std::binary_search(m_->eligibility[j].begin(), m_->eligibility[j].end(), element))
      continue;
    visited[j] = 1;
    if (static_cast<int>(members_[j].size()) < m_->capacity) {
      members_[j].push_back(element);
      owner_[element] = j;
      return true;
    }
    for (std::size_t t = 0; t < members_[j].size(); ++t) {
      const int shifted = members_[j][t];
      if (augment(shifted, visited)) {
        members_[j][t] = element;
        owner_[element] = j;
        return true;
      }
    }
  }
  return false;
}

bool CapacitatedMatcher::try_add(int element) {
  std::vector<char> visited(m_->n_bps(), 0);
  if (!augment(element, visited)) return false;
  ++assigned_;
  return true;
}

std::vector<std::vector<int>> CapacitatedMatcher::blocks() const {
  std::vector<std::vector<int>> out = members_;
  for (auto& b : out) std::sort(b.begin(), b.end());
  return out;
}

bool is_independent(const FeasibilityMatroid& m, const std::vector<int>& elements) {
  CapacitatedMatcher matcher(m);
  for (int e : elements) {
    if (e < 0 || e >= m.n_elements)
      throw std::out_of_range("element outside the matroid ground set");
    if (!matcher.try_add(e)) return false;
  }
  return true;
}

std::vector<char> independence_table(const FeasibilityMatroid& m) {
  if (m.n_elements > 25)
    throw GuardError("independence_table: ground set of " + std::to_string(m.n_elements) +
                     " exceeds the 25-element enumeration guard");
  const std::size_t size = std::size_t(1) << m.n_elements;
  std::vector<char> indep(size, 0);
  indep[0] = 1;
  std::vector<int> elems;
  for (std::size_t mask = 1; mask < size; ++mask) {
    // Downward closure: all one-element-removed subsets must be independent.
    bool candidate = true;
    for (int e = 0; e < m.n_elements && candidate; ++e)
      if ((mask >> e) & 1u) candidate = indep[mask & ~(std::size_t(1) << e)];
    if (!candidate) continue;
    elems.clear();
    for (int e = 0; e < m.n_elements; ++e)
      if ((mask >> e) & 1u) elems.push_back(e);
    indep[mask] = is_independent(m, elems) ? 1 : 0;
  }
  return indep;
}

namespace {

BasisResult greedy(const FeasibilityMatroid& m, const std::vector<int>& order,
                   const std::vector<Rational>* weights) {
  CapacitatedMatcher matcher(m);
  BasisResult result;
  for (int e : order) {
    if (matcher.try_add(e)) {
      result.elements.push_back(e);
      if (weights) result.weight += (*weights)[e];
    }
  }
  std::sort(result.elements.begin(), result.elements.end());
  result.assignment = matcher.blocks();
  return result;
}

}  // namespace

BasisResult max_weight_basis(const FeasibilityMatroid& m, const std::vector<Rational>& weights) {
  if (static_cast<int>(weights.size()) != m.n_elements)
    throw std::invalid_argument("weight vector size mismatch");
  for (const Rational& w : weights)
    if (w.is_negative()) throw std::invalid_argument("weights must be nonnegative");
  std::vector<int> order(m.n_elements);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return weights[a] > weights[b]; });
  return greedy(m, order, &weights);
}

BasisResult max_weight_basis_ranked(const FeasibilityMatroid& m, std::span<const int> rank_keys) {
  if (static_cast<int>(rank_keys.size()) != m.n_elements)
    throw std::invalid_argument("rank key vector size mismatch");
  std::vector<int> order(m.n_elements);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rank_keys[a] > rank_keys[b]; });
  return greedy(m, order, nullptr);
}

std::optional<Rational> threshold_bid(const FeasibilityMatroid& m, int element,
                                      const std::vector<Rational>& weights) {
  if (element < 0 || element >= m.n_elements)
    throw std::out_of_range("element outside the matroid ground set");
  if (!is_independent(m, {element})) return std::nullopt;

  std::vector<Rational> candidates;
  candidates.push_back(Rational(0));
  for (int y = 0; y < m.n_elements; ++y)
    if (y != element) candidates.push_back(weights[y]);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<Rational> w = weights;
  std::vector<int> order(m.n_elements);
  for (const Rational& z : candidates) {
    w[element] = z;
    // Favorable tie-break: x precedes equal-weight competitors, matching the
    // existential "belongs to some maximum-weight independent set".
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (w[a] != w[b]) return w[a] > w[b];
      if ((a == element) != (b == element)) return a == element;
      return a < b;
    });
    const BasisResult basis = greedy(m, order, &w);
    if (std::binary_search(basis.elements.begin(), basis.elements.end(), element)) return z;
  }
  // Unreachable: at z = max candidate the favorable tie-break always admits x.
  return std::nullopt;
}

bool lex_optimality_check(const FeasibilityMatroid& m, const std::vector<Rational>& weights) {
  if (m.n_elements > 20)
    throw GuardError("lex_optimality_check: ground set of " + std::to_string(m.n_elements) +
                     " exceeds the 20-element enumeration guard");
  const std::vector<char> indep = independence_table(m);

  Rational best;
  bool any = false;
  std::vector<Rational> mask_weight(indep.size());
  for (std::size_t mask = 0; mask < indep.size(); ++mask) {
    if (!indep[mask]) continue;
    Rational w;
    for (int e = 0; e < m.n_elements; ++e)
      if ((mask >> e) & 1u) w += weights[e];
    mask_weight[mask] = w;
    if (!any || w > best) {
      best = w;
      any = true;
    }
  }

  std::vector<Rational> reference;
  bool have_reference = false;
  for (std::size_t mask = 0; mask < indep.size(); ++mask) {
    if (!indep[mask] || mask_weight[mask] != best) continue;
    std::vector<Rational> multiset;
    for (int e = 0; e < m.n_elements; ++e)
      if (((mask >> e) & 1u) && weights[e].is_positive()) multiset.push_back(weights[e]);
    std::sort(multiset.begin(), multiset.end());
    if (!have_reference) {
      reference = std::move(multiset);
      have_reference = true;
    } else if (multiset != reference) {
      return false;
    }
  }
  return true;
}

CoveringResult revenue_covering_check(const FeasibilityMatroid& m,
                                      const std::vector<Rational>& weights,
                                      const std::vector<int>& independent_set) {
  CoveringResult result;
  result.basis_weight = max_weight_basis(m, weights).weight;
  for (int x : independent_set) {
    const std::optional<Rational> t = threshold_bid(m, x, weights);
    if (t) result.threshold_sum += *t;
  }
  result.slack = result.basis_weight - result.threshold_sum;
  result.holds = !result.slack.is_negative();
  return result;
}

}  // namespace tfm
