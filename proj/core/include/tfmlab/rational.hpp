#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tfm {

/// Thrown when a reduced numerator or denominator no longer fits in 64 bits.
class RationalOverflow : public std::overflow_error {
 public:
  RationalOverflow()
      : std::overflow_error("rational overflow: reduced value exceeds 64 bits") {}
};

// Exact rational number on int64 numerator/denominator, always normalized
// (den > 0, gcd(|num|, den) == 1). Intermediates go through 128 bits; a
// reduced result that still does not fit throws RationalOverflow instead of
// wrapping. All equilibrium, feasibility, and tie logic in this project runs
// on this type; doubles appear only inside Monte Carlo estimators.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(long long n) : num_(n) {}  // NOLINT: implicit by design
  Rational(long long num, long long den) { *this = make(num, den); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_positive() const { return num_ > 0; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  // "p" for integers, "p/q" otherwise.
  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) {
      s += '/';
      s += std::to_string(den_);
    }
    return s;
  }

  // Accepts "p" or "p/q" with an optional leading minus. No whitespace.
  static std::optional<Rational> parse(std::string_view text);

  friend Rational operator-(const Rational& a) {
    Rational r;
    r.num_ = -a.num_;
    r.den_ = a.den_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const i128 lhs = i128(a.num_) * b.den_;
    const i128 rhs = i128(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  using i128 = __int128;
  using u128 = unsigned __int128;

  static u128 gcd_u128(u128 a, u128 b) {
    while (b != 0) {
      const u128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational make(i128 num, i128 den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const u128 a = num < 0 ? u128(-num) : u128(num);
    const u128 g = a == 0 ? u128(den) : gcd_u128(a, u128(den));
    num /= i128(g);
    den /= i128(g);
    constexpr i128 lo = std::numeric_limits<std::int64_t>::min();
    constexpr i128 hi = std::numeric_limits<std::int64_t>::max();
    if (num < lo || num > hi || den > hi) throw RationalOverflow();
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline std::optional<Rational> Rational::parse(std::string_view text) {
  const auto parse_int = [](std::string_view s, long long& out) {
    if (s.empty()) return false;
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-') {
      neg = true;
      i = 1;
      if (s.size() == 1) return false;
    }
    unsigned long long acc = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
      const unsigned long long digit = static_cast<unsigned long long>(s[i] - '0');
      if (acc > (0x7fffffffffffffffULL - digit) / 10) return false;
      acc = acc * 10 + digit;
    }
    out = neg ? -static_cast<long long>(acc) : static_cast<long long>(acc);
    return true;
  };
  const std::size_t slash = text.find('/');
  long long num = 0;
  long long den = 1;
  if (slash == std::string_view::npos) {
    if (!parse_int(text, num)) return std::nullopt;
  } else {
    if (!parse_int(text.substr(0, slash), num)) return std::nullopt;
    if (!parse_int(text.substr(slash + 1), den)) return std::nullopt;
    if (den <= 0) return std::nullopt;
  }
  try {
    return Rational(num, den);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace tfm

template <>
struct std::hash<tfm::Rational> {
  std::size_t operator()(const tfm::Rational& r) const noexcept {
    const std::uint64_t a = static_cast<std::uint64_t>(r.num());
    const std::uint64_t b = static_cast<std::uint64_t>(r.den());
    std::uint64_t h = a * 0x9e3779b97f4a7c15ULL;
    h ^= (b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    return static_cast<std::size_t>(h);
  }
};
