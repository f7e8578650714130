#include <doctest.h>

#include <cmath>
#include <random>

#include "bracketlab/errors.hpp"
#include "bracketlab/taylor_error.hpp"

using namespace bracketlab;
using namespace bracketlab::taylor_error;
using hardy::parse_hardy;
using exact::Rational;

namespace {

ErrorProfile synthetic(std::vector<std::int64_t> values, long N = 1000000000) {
  ErrorProfile p;
  p.N = N;
  p.H = static_cast<long>(values.size());
  p.ell = 4;
  p.values = std::move(values);
  return p;
}

// Every h in [H] covered exactly once with the profile value.
bool partitions(const std::vector<Progression>& progs, const std::vector<std::int64_t>& values) {
  std::vector<int> hits(values.size(), 0);
  for (const auto& pr : progs) {
    for (long j = 0; j < pr.length; ++j) {
      const long h = pr.start + j * pr.step;
      if (h < 0 || h >= static_cast<long>(values.size())) return false;
      if (values[h] != pr.value) return false;
      ++hits[h];
    }
  }
  return std::all_of(hits.begin(), hits.end(), [](int c) { return c == 1; });
}

}  // namespace

TEST_CASE("exact Taylor expansions give zero profiles") {
  const auto t = parse_hardy("t");
  for (long N : {100L, 1000L, 123456L}) {
    const auto p = error_profile(t, N, 2, 50);
    CHECK(std::all_of(p.values.begin(), p.values.end(), [](auto v) { return v == 0; }));
  }
  const auto sq = parse_hardy("t^2");
  const auto p = error_profile(sq, 98765, 3, 200);
  CHECK(std::all_of(p.values.begin(), p.values.end(), [](auto v) { return v == 0; }));
}

TEST_CASE("profile against direct floors") {
  const auto f = parse_hardy("t^(3/2)");
  const auto p = error_profile(f, 1000000, 4, 1000);
  CHECK(std::all_of(p.values.begin(), p.values.end(), [](auto v) { return v >= -1 && v <= 1; }));
  // Independent oracle at a smaller centre: floor(sqrt((N+h)^3)) and the
  // Taylor polynomial with exact rational coefficients.
  const long N = 10000;
  const auto q = error_profile(f, N, 3, 100);
  for (long h = 0; h < 100; ++h) {
    Integer cube = Integer(N + h) * (N + h) * (N + h), root;
    mpz_sqrt(root.get_mpz_t(), cube.get_mpz_t());
    // f(N) = 10^6, f'(N) = 150, f''(N)/2 = 3/(8*100)
    const Rational P = Rational(1000000) + Rational(150 * h) + Rational(3 * h * h, 800);
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), P.get_num_mpz_t(), P.get_den_mpz_t());
    CHECK(q.values[h] == Integer(root - fl).get_si());
  }
}

TEST_CASE("classification examples") {
  const auto zero = classify(synthetic(std::vector<std::int64_t>(100, 0)), 2);
  CHECK(zero.kind == ClassKind::Sparse);
  CHECK(zero.support.empty());
  std::vector<std::int64_t> one(100, 0);
  one[7] = 1;
  ClassifyOptions o;
  o.eta = 0.9;
  const auto sp = classify(synthetic(one), 2, o);
  CHECK(sp.kind == ClassKind::Sparse);
  CHECK(sp.support == std::vector<long>{7});
  std::vector<std::int64_t> alt(100);
  for (int h = 0; h < 100; ++h) alt[h] = h % 2 == 0 ? 1 : 0;
  o.eta = 0.5;
  o.sparse_cap = 1;
  const auto st = classify(synthetic(alt), 2, o);
  CHECK(st.kind == ClassKind::Structured);
  CHECK(st.q == 2);
  CHECK(st.progressions.size() == 2);
  CHECK(partitions(st.progressions, alt));
  const auto small = classify(synthetic(alt, 10), 2, o);
  CHECK(small.kind == ClassKind::SmallN);
  CHECK(small.threshold == doctest::Approx(std::pow(100.0, 4.5 / 2)));
  auto bad = synthetic(alt);
  bad.ell = 2;
  CHECK_THROWS_AS(classify(bad, 2), Error);
}

TEST_CASE("seeded q is tried first") {
  std::vector<std::int64_t> v(120);
  for (int h = 0; h < 120; ++h) v[h] = h % 3 == 1 ? -1 : 0;
  ClassifyOptions o;
  o.sparse_cap = 0.1;
  o.seed_q = 3;
  const auto c = classify(synthetic(v), 2, o);
  CHECK(c.kind == ClassKind::Structured);
  CHECK(c.q == 3);
}

TEST_CASE("progression partitions reassemble the profile") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> val(-1, 1), len(1, 300), qd(1, 20);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::int64_t> v(static_cast<std::size_t>(len(rng)));
    for (auto& x : v) x = val(rng);
    const long q = qd(rng);
    CHECK(partitions(decompose(v, q), v));
  }
}

TEST_CASE("census examples") {
  const auto sq = count_profiles(parse_hardy("t^2"), 2, 3, 32, 1000, 1500, 7);
  CHECK(sq.distinct == 1);
  const auto f = parse_hardy("t^(3/2)");
  const auto one = count_profiles(f, 2, 4, 1, 1000, 3000, 1);
  CHECK(one.distinct <= 3);
  const auto c = count_profiles(f, 2, 4, 64, 100000, 102000, 1);
  CHECK(c.records.size() == 2000);
  CHECK(c.range_violations == 0);
  CHECK(c.tally.count(ClassKind::Overflow) == 0);
  CHECK(static_cast<double>(c.distinct) <= std::exp(5 * std::pow(64.0, 0.95)));
}

TEST_CASE("census growth fit") {
  const auto [slope, intercept] = fit_census_growth({{16, 20}, {64, 403}, {256, 162755}}, 0.5);
  // counts are round(exp(0.75 * H^0.5)) so the fit recovers the slope
  CHECK(slope == doctest::Approx(0.75).epsilon(0.01));
  CHECK(std::abs(intercept) < 0.05);
  CHECK_THROWS_AS(fit_census_growth({{16, 20}}, 0.5), Error);
}

TEST_CASE("monotonicity changes") {
  std::vector<double> sq, cubic, flat(10, 2.0);
  for (int i = 1; i <= 50; ++i) sq.push_back(i * i);
  for (int i = 0; i <= 60; ++i) {
    const double x = -3 + i * 0.1;
    cubic.push_back(x * x * x - 3 * x);  // turning points at -1 and 1
  }
  CHECK(monotonicity_changes(sq) == 0);
  CHECK(monotonicity_changes(cubic) == 2);
  CHECK(monotonicity_changes(flat) == 0);
  CHECK_THROWS_AS(monotonicity_changes({1.0, 2.0}), Error);
}

TEST_CASE("polynomials of degree six turn at most five times") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> coef(-1, 1);
  int tested = 0;
  while (tested < 100) {
    std::vector<double> c(7);
    for (auto& x : c) x = coef(rng);
    if (std::abs(c[6]) < 0.05) continue;  // 6th derivative 720*c6 keeps one sign
    std::vector<double> s;
    for (int i = 0; i <= 400; ++i) {
      const double x = -2 + i * 0.01;
      double v = 0;
      for (int j = 6; j >= 0; --j) v = v * x + c[j];
      s.push_back(v);
    }
    CHECK(monotonicity_changes(s) <= 5);
    ++tested;
  }
}
