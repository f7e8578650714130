#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bracketlab/equidist.hpp"
#include "bracketlab/errors.hpp"

using namespace bracketlab;
using namespace bracketlab::equidist;
using exact::Integer;
using exact::make_rational;

namespace {

Rational mod1(const Rational& x) {
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return x - Rational(f);
}

// Sup over [alpha, beta) with endpoints at 0, 1, the sample values and their
// right limits; counts use sorted samples and binary search.
Rational brute_force(std::vector<Rational> pts) {
  for (auto& p : pts) p = mod1(p);
  std::sort(pts.begin(), pts.end());
  const Rational N(static_cast<long>(pts.size()));
  struct End {
    Rational v;
    bool plus;
  };
  std::vector<End> lows{{0, false}}, highs{{1, false}};
  for (const auto& x : pts) {
    lows.push_back({x, false});
    lows.push_back({x, true});
    highs.push_back({x, false});
    highs.push_back({x, true});
  }
  Rational best = 0;
  for (const auto& a : lows) {
    // first index counted: p >= a (or p > a for a+)
    const auto first = a.plus ? std::upper_bound(pts.begin(), pts.end(), a.v) : std::lower_bound(pts.begin(), pts.end(), a.v);
    for (const auto& b : highs) {
      if (b.v < a.v) continue;
      if (b.v == a.v && a.plus && !b.plus) continue;
      const auto last = b.plus ? std::upper_bound(pts.begin(), pts.end(), b.v) : std::lower_bound(pts.begin(), pts.end(), b.v);
      const long count = std::max<long>(0, static_cast<long>(last - first));
      Rational dev = Rational(count) / N - (b.v - a.v);
      if (dev < 0) dev = -dev;
      if (dev > best) best = dev;
    }
  }
  return best;
}

Polynomial poly(const std::string& text) { return Polynomial::from_json(text); }

}  // namespace

TEST_CASE("discrepancy examples") {
  CHECK(discrepancy(std::vector<Rational>{0, Rational(1, 2)}).value == Rational(1, 2));
  std::vector<Rational> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(Rational(i, 10));
  CHECK(discrepancy(grid).value == Rational(1, 10));
  const auto single = discrepancy(std::vector<Rational>{Rational(1, 3)});
  CHECK(single.value == 1);
  CHECK_THROWS_AS(discrepancy(std::vector<Rational>{}), Error);
}

TEST_CASE("witness interval reproduces the value") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> num(0, 40);
  for (int t = 0; t < 50; ++t) {
    std::vector<Rational> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(Rational(num(rng), 41));
    const auto r = discrepancy(pts);
    long count = 0;
    for (const auto& p : pts) {
      const Rational x = mod1(p);
      count += r.closed ? (x >= r.alpha && x <= r.beta) : (x > r.alpha && x < r.beta);
    }
    Rational dev = make_rational(count, static_cast<long>(pts.size())) - (r.beta - r.alpha);
    if (dev < 0) dev = -dev;
    CHECK(dev == r.value);
  }
}

TEST_CASE("exact algorithm equals brute force") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<long> size(1, 200), den(1, 64);
  for (int t = 0; t < 100; ++t) {
    const long N = size(rng);
    std::vector<Rational> pts;
    for (long i = 0; i < N; ++i) {
      const long d = den(rng);
      pts.push_back(Rational(std::uniform_int_distribution<long>(-2 * d, 3 * d)(rng), d));
      pts.back().canonicalize();
    }
    CHECK(discrepancy(pts).value == brute_force(pts));
  }
}

TEST_CASE("golden rotation") {
  const double phi = (std::sqrt(5.0) - 1) / 2;
  for (long N : {100L, 1000L, 10000L, 100000L}) {
    std::vector<double> pts;
    for (long n = 0; n < N; ++n) pts.push_back(std::fmod(n * phi, 1.0));
    CHECK(discrepancy(pts).D <= 3 * std::log(static_cast<double>(N)) / static_cast<double>(N));
  }
}

TEST_CASE("distance to the nearest integer") {
  CHECK(*distance_to_integer(Real(Rational(1, 2))).as_rational() == Rational(1, 2));
  CHECK(*distance_to_integer(Real(Rational(-13, 4))).as_rational() == Rational(1, 4));
  CHECK(std::abs(distance_to_integer(Real(exact::ConstantTag::sqrt(2))).approx() - 0.41421356237309505) < 1e-15);
}

TEST_CASE("Weyl dichotomy examples") {
  const auto half = weyl_dichotomy({ExactNumber(0), ExactNumber(Rational(1, 2))}, 100, 0.1);
  CHECK_FALSE(half.equidistributed);
  CHECK(half.ell == 2);
  CHECK(half.max_defect == 0.0);
  const ExactNumber phi = (ExactNumber::from(exact::ConstantTag::sqrt(5)) - ExactNumber(1)).scaled(Rational(1, 2));
  CHECK(weyl_dichotomy({ExactNumber(0), phi}, 10000, 0.05).equidistributed);
  const auto c = weyl_dichotomy({ExactNumber::from(exact::ConstantTag::sqrt(2))}, 50, 0.1);
  CHECK_FALSE(c.equidistributed);
  CHECK(c.ell == 1);
  CHECK(c.max_defect == 0.0);
  const auto q = weyl_dichotomy({ExactNumber(0), ExactNumber(Rational(1, 3)), ExactNumber(Rational(1, 4))}, 1000, 0.05);
  CHECK(q.ell == 12);
  CHECK_THROWS_AS(weyl_dichotomy({ExactNumber(0)}, 10, 0.7), Error);
}

TEST_CASE("polynomial parsing and evaluation") {
  const auto p = poly("[[0, 1], [2, 0, 3]]");  // y + 2x + 3x y^2
  CHECK(p.dim() == 2);
  CHECK(p.degree() == 3);
  const double x[2] = {0.5, 0.25};
  CHECK(p.eval(x) == doctest::Approx(0.25 + 1.0 + 3 * 0.5 * 0.0625));
  CHECK(poly("[\"1/2\", \"sqrt(2)\"]").max_abs_coefficient() == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(poly("[[1], 2]"), Error);
}

TEST_CASE("sublevel examples") {
  const auto lin = sublevel_measure(poly("[\"-1/2\", 1]"), 0.1, SublevelMethod::Grid, 100000);
  CHECK(std::abs(lin.measure - 0.2) <= lin.error_bar + 1e-12);
  const auto xy = sublevel_measure(poly("[[0, 0], [0, 1]]"), 0.01, SublevelMethod::Grid, 1000000);
  const double exact_xy = 0.01 * (1 - std::log(0.01));
  CHECK(std::abs(xy.measure - exact_xy) <= xy.error_bar);
  CHECK(std::abs(xy.measure - exact_xy) <= 0.05 * exact_xy);
  const auto all = sublevel_measure(poly("[[0, 0], [0, 1]]"), 1.5, SublevelMethod::Grid, 1000);
  CHECK(all.measure == 1.0);
  CHECK(all.error_bar == 0.0);
}

TEST_CASE("grid and Monte Carlo agree") {
  for (const char* text : {"[[0, 0], [0, 1]]", "[\"-1/3\", 0, 1]", "[[\"-1/4\", 1], [1, 0]]", "[[[0, 0], [0, 1]], [[0, 0], [0, 0]]]"}) {
    const auto p = poly(text);
    const auto g = sublevel_measure(p, 0.05, SublevelMethod::Grid, 400000);
    const auto m = sublevel_measure(p, 0.05, SublevelMethod::MonteCarlo, 400000, 17);
    CHECK_MESSAGE(std::abs(g.measure - m.measure) <= g.error_bar + m.error_bar, text);
  }
}

TEST_CASE("coefficient and sup norms") {
  const auto one = coefficient_sup_equivalence(poly("[1]"));
  CHECK(one.coef_over_sup == doctest::Approx(1.0));
  CHECK(one.sup_over_coef == doctest::Approx(1.0));
  const auto x = coefficient_sup_equivalence(poly("[0, 1]"));
  CHECK(x.sup == doctest::Approx(1.0).epsilon(1e-8));
  const auto cap = coefficient_sup_equivalence(poly("[0, 1, -1]"));
  CHECK(cap.sup == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(cap.coef_over_sup == doctest::Approx(4.0).epsilon(1e-8));
  CHECK_THROWS_AS(coefficient_sup_equivalence(poly("[0, 0]")), Error);
  // sup of a quadratic in two variables by dense sampling as an independent check
  const auto q = poly("[[\"-1/2\", 1], [1, -3]]");
  double dense = 0;
  for (int i = 0; i <= 400; ++i)
    for (int j = 0; j <= 400; ++j) {
      const double pt[2] = {i / 400.0, j / 400.0};
      dense = std::max(dense, std::abs(q.eval(pt)));
    }
  CHECK(sup_norm(q) >= dense - 1e-12);
  CHECK(sup_norm(q) <= dense + 1e-2);
}
