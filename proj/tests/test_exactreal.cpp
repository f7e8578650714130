#include <doctest.h>

#include <random>

#include "bracketlab/errors.hpp"
#include "bracketlab/exactreal.hpp"

using namespace bracketlab;
using namespace bracketlab::exact;

namespace {

// floor(x * 10^digits) for x = sqrt(k), by integer square root.
Integer scaled_sqrt(unsigned long k, unsigned digits) {
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, 2 * digits);
  Integer v = scale * k, r;
  mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
  return r;
}

Integer scaled_floor(const Real& x, unsigned digits) {
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  return (x * Real(scale)).floor_certified();
}

// e by partial sums of 1/k!, exact to far more than 40 digits after 60 terms.
Rational e_series() {
  Rational sum = 0, term = 1;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) term /= k;
    sum += term;
  }
  return sum;
}

Real sqrt_of(unsigned long k) { return Real(ConstantTag::sqrt(k)); }

}  // namespace

TEST_CASE("rational refinement") {
  const Real third(Rational(1, 3));
  const Real r = third.refine(64);
  CHECK(r.enclosure().contains(Rational(1, 3)));
  CHECK(r.enclosure().width() <= std::ldexp(1.0, -62));
}

TEST_CASE("sqrt(2) against integer square root") {
  const Real r = sqrt_of(2).refine(160);
  CHECK(scaled_floor(r, 40) == scaled_sqrt(2, 40));
  for (unsigned long k : {3UL, 5UL, 7UL, 1000003UL}) CHECK(scaled_floor(sqrt_of(k), 30) == scaled_sqrt(k, 30));
}

TEST_CASE("pi refinement nests") {
  const Real pi(ConstantTag::pi());
  const Real p32 = pi.refine(32), p64 = pi.refine(64);
  CHECK(p32.enclosure().contains(p64.enclosure()));
  CHECK(scaled_floor(pi, 30) == Integer("3141592653589793238462643383279"));
}

TEST_CASE("e against the factorial series") {
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, 40);
  const Rational s = e_series() * Rational(scale);
  Integer expected;
  mpz_fdiv_q(expected.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
  CHECK(scaled_floor(Real(ConstantTag::euler_e()), 40) == expected);
}

TEST_CASE("floor and frac examples") {
  CHECK(Real(Rational(5, 2)).floor_certified() == 2);
  CHECK(Real(Rational(-1, 2)).floor_certified() == -1);
  CHECK(sqrt_of(2).floor_certified() == 1);
  CHECK(*Real(Rational(-1, 2)).frac_certified().as_rational() == Rational(1, 2));
  CHECK(*Real(7LL).frac_certified().as_rational() == 0);
  const Real f = sqrt_of(2).frac_certified();
  CHECK(f.floor_certified() == 0);
  CHECK(std::abs(f.approx() - 0.41421356237309504880) < 1e-15);
}

TEST_CASE("algebraic identities stay exact") {
  CHECK(*(sqrt_of(2) * sqrt_of(2)).as_rational() == 2);
  CHECK(*(sqrt_of(2) * sqrt_of(3) - sqrt_of(6)).as_rational() == 0);
  const Real x = (sqrt_of(2) - Real(1LL)).inverse();  // 1 + sqrt(2)
  CHECK(*(x - sqrt_of(2)).as_rational() == 1);
  CHECK((sqrt_of(2) * sqrt_of(2)).floor_certified() == 2);
}

TEST_CASE("transcendental operations") {
  const Real two(2LL);
  CHECK(scaled_floor(two.pow(Rational(1, 2)), 30) == scaled_sqrt(2, 30));
  CHECK(scaled_floor(Real(Rational(27)).pow(Rational(2, 3)), 5) == 900000);
  const Real l = two.log();
  CHECK(std::abs(l.approx() - 0.69314718055994530942) < 1e-15);
  CHECK(scaled_floor(Real(1LL).exp(), 30) == scaled_floor(Real(ConstantTag::euler_e()), 30));
}

TEST_CASE("undecidable floors raise") {
  const Real z = Real(2LL).log().exp() - Real(2LL);
  CHECK_THROWS_AS((void)z.floor_certified(512), Error);
  try {
    (void)z.floor_certified(512);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FloorUndecidable);
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS((void)(Real(1LL) / Real(0LL)), Error);
  CHECK_THROWS_AS((void)Real(-1LL).log(), Error);
  CHECK_THROWS_AS((void)parse_constant("0.5"), Error);
  CHECK(parse_constant("sqrt(4)") == ConstantTag::rational(2));
}

TEST_CASE("enclosure soundness on random rationals") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> num(-1000000, 1000000), den(1, 1000000);
  for (int i = 0; i < 10000; ++i) {
    const Rational a = make_rational(num(rng), den(rng));
    const Rational b = make_rational(num(rng), den(rng));
    for (int p : {64, 128, 256}) CHECK_UNARY(Interval::enclose(a, p).contains(a));
    const Real s = Real(a) * Real(b) + Real(a);
    REQUIRE(s.as_rational());
    CHECK(*s.as_rational() == a * b + a);
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
    CHECK(Real(a).floor_certified() == fl);
  }
}

TEST_CASE("monotone refinement and floor/frac coherence") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(2, 97), scale(1, 1000);
  for (int i = 0; i < 200; ++i) {
    unsigned long k = static_cast<unsigned long>(pick(rng));
    const Real x = sqrt_of(k) * Real(static_cast<long long>(scale(rng))) + Real(ConstantTag::pi());
    for (int p : {64, 128, 256}) {
      CHECK(x.refine(2 * p).enclosure().width() <= x.refine(p).enclosure().width());
    }
    const Real rebuilt = Real(x.floor_certified()) + x.frac_certified();
    CHECK((rebuilt - x).enclosure().contains_zero());
  }
}
