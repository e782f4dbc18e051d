#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <tfmlab/rational.hpp>
#include <tfmlab/rng.hpp>

using tfm::Rational;

TEST_CASE("rational normalization and arithmetic") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, 4) == Rational(-1, 2));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(1, 2) - Rational(1, 3) == Rational(1, 6));
  CHECK(Rational(3, 4) * Rational(2, 9) == Rational(1, 6));
  CHECK(Rational(3, 4) / Rational(3, 2) == Rational(1, 2));
  CHECK(-Rational(5, 3) == Rational(-5, 3));
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
}

TEST_CASE("rational ordering is exact") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(-1, 3));
  CHECK(Rational(10001, 10000) > Rational(1));
  CHECK(Rational(2, 6) == Rational(1, 3));
  // Cross-multiplication that would overflow 64 bits must still compare.
  const Rational big(4611686018427387904LL, 3);
  const Rational big2(4611686018427387903LL, 3);
  CHECK(big2 < big);
}

TEST_CASE("rational overflow throws instead of wrapping") {
  const Rational big(4611686018427387904LL);  // 2^62
  CHECK_THROWS_AS(big * Rational(4), tfm::RationalOverflow);
  CHECK_NOTHROW(big * Rational(1, 2));
}

TEST_CASE("rational parse and str round-trip") {
  CHECK(Rational::parse("3/4") == Rational(3, 4));
  CHECK(Rational::parse("-3/4") == Rational(-3, 4));
  CHECK(Rational::parse("42") == Rational(42));
  CHECK(Rational::parse("0") == Rational(0));
  CHECK(!Rational::parse(""));
  CHECK(!Rational::parse("1/0"));
  CHECK(!Rational::parse("1/-2"));
  CHECK(!Rational::parse("a/b"));
  CHECK(!Rational::parse("1.5"));
  CHECK(Rational(3, 4).str() == "3/4");
  CHECK(Rational(-7).str() == "-7");
  CHECK(Rational(8, 4).str() == "2");
  // parse . str is the identity on normalized values
  for (long long n = -6; n <= 6; ++n)
    for (long long d = 1; d <= 5; ++d) {
      const Rational r(n, d);
      CHECK(Rational::parse(r.str()) == r);
    }
}

TEST_CASE("rational to_double") {
  CHECK(Rational(1, 2).to_double() == doctest::Approx(0.5));
  CHECK(Rational(-1, 3).to_double() == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("counter rng is stateless and worker-count independent") {
  const tfm::CounterRng a(7, 3);
  const tfm::CounterRng b(7, 3);
  CHECK(a.uniform(0) == b.uniform(0));
  CHECK(a.uniform(123456) == b.uniform(123456));
  CHECK(a.uniform(0) != a.uniform(1));
  CHECK(tfm::CounterRng(7, 3).bits(5) != tfm::CounterRng(7, 4).bits(5));
  CHECK(tfm::CounterRng(7, 3).bits(5) != tfm::CounterRng(8, 3).bits(5));
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform(i);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("counter rng looks uniform") {
  const tfm::CounterRng rng(42, 0);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.uniform(i);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}
