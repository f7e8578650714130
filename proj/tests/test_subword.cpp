#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "bracketlab/errors.hpp"
#include "bracketlab/gp.hpp"
#include "bracketlab/subword.hpp"

using namespace bracketlab;
using namespace bracketlab::subword;
using gp::parse_gp;

namespace {

std::uint64_t naive_count(const std::vector<std::int64_t>& w, long H) {
  std::set<std::vector<std::int64_t>> seen;
  for (std::size_t i = 0; i + H <= w.size(); ++i) seen.emplace(w.begin() + i, w.begin() + i + H);
  return seen.size();
}

Word sturmian(const char* alpha, long long n) {
  return gp::generate_word(gp::sturmian_expr(parse_gp(alpha), parse_gp("0")), gp::Coding::identity(),
                           gp::IndexSource::identity(), n);
}

Word from_letters(std::vector<std::int64_t> letters) {
  Word w;
  w.letters = std::move(letters);
  return w;
}

ComplexityCurve curve_of(std::vector<std::uint64_t> p) {
  ComplexityCurve c;
  for (std::size_t i = 0; i < p.size(); ++i) c.H.push_back(static_cast<long>(i + 1));
  c.p = std::move(p);
  return c;
}

}  // namespace

TEST_CASE("factor count examples") {
  std::vector<std::int64_t> alt(100);
  for (int i = 0; i < 100; ++i) alt[i] = i % 2;
  CHECK(factor_count(alt, 3) == 2);
  const std::vector<std::int64_t> constant(500, 7);
  for (long H : {1L, 10L, 500L}) CHECK(factor_count(constant, H) == 1);
  CHECK_THROWS_AS(factor_count(constant, 501), Error);
  CHECK_THROWS_AS(factor_count(constant, 0), Error);
}

TEST_CASE("Sturmian prefix at H = 10") { CHECK(factor_count(sturmian("sqrt(2)-1", 1000000), 10) == 11); }

TEST_CASE("periodic word of period three") {
  std::vector<std::int64_t> w(999);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<std::int64_t>(i % 3);
  const auto c = complexity_curve(from_letters(w), 40);
  CHECK(c.p[0] == 3);
  for (std::size_t i = 1; i < c.p.size(); ++i) CHECK(c.p[i] == 3);
  CHECK(c.prefix_length == 999);
  CHECK_THROWS_AS(complexity_curve(from_letters(w), 500), Error);
  CHECK(c.to_csv().rfind("H,p\n1,3\n", 0) == 0);
}

TEST_CASE("factor count equals a sorted-set oracle") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> len(1, 10000), sigma(1, 5);
  for (int t = 0; t < 30; ++t) {
    const int n = t < 20 ? len(rng) / 10 + 1 : len(rng);
    const int s = sigma(rng);
    std::vector<std::int64_t> w(static_cast<std::size_t>(n));
    // some words are long runs of a short pattern so that counts saturate
    const int pattern = t % 3 == 0 ? 1 + t % 7 : 0;
    for (int i = 0; i < n; ++i) w[i] = pattern ? (i % pattern) * (i % 97 == 0 ? 1 : 0) : std::uniform_int_distribution<int>(0, s - 1)(rng);
    for (long H : {1L, 2L, 5L, 13L, 40L}) {
      if (H > n) continue;
      CHECK(factor_count(w, H) == naive_count(w, H));
    }
  }
}

TEST_CASE("large alphabets take the hashing path and stay exact") {
  std::mt19937_64 rng(5);
  std::vector<std::int64_t> w(5000);
  for (auto& x : w) x = static_cast<std::int64_t>(rng() % 1000000007ULL) - 500000000;
  // repeat a block so some factors coincide
  std::copy(w.begin(), w.begin() + 1000, w.begin() + 2500);
  for (long H : {3L, 8L, 50L, 400L}) CHECK(factor_count(w, H) == naive_count(w, H));
}

TEST_CASE("curve agrees with per-H counting") {
  const auto w = sturmian("sqrt(3)-1", 20000);
  std::vector<std::int64_t> mixed(w.letters);
  for (std::size_t i = 0; i < mixed.size(); i += 17) mixed[i] = 2;
  const auto c = complexity_curve(from_letters(mixed), 60);
  for (std::size_t i = 0; i < c.H.size(); ++i) CHECK(c.p[i] == factor_count(mixed, c.H[i]));
  // curve invariants
  for (std::size_t i = 1; i < c.p.size(); ++i) {
    CHECK(c.p[i] >= c.p[i - 1]);
    CHECK(c.p[i] <= 3 * c.p[i - 1]);
  }
}

TEST_CASE("Sturmian law for three slopes") {
  for (const char* alpha : {"sqrt(2)-1", "sqrt(3)-1", "(sqrt(5)-1)/2"}) {
    const auto c = complexity_curve(sturmian(alpha, 1000000), 200);
    bool all = true;
    for (std::size_t i = 0; i < c.H.size(); ++i) all = all && c.p[i] == static_cast<std::uint64_t>(c.H[i] + 1);
    CHECK_MESSAGE(all, alpha);
  }
}

TEST_CASE("low complexity implies eventual periodicity") {
  std::vector<std::int64_t> w = {5, 4, 3};
  for (int i = 0; i < 300; ++i) w.push_back(i % 4 == 0 ? 1 : 0);
  const auto c = complexity_curve(from_letters(w), 20);
  bool low = false;
  for (std::size_t i = 0; i < c.H.size(); ++i) low = low || c.p[i] <= static_cast<std::uint64_t>(c.H[i]);
  CHECK(low);
  const auto per = detect_period(w, 20);
  REQUIRE(per.has_value());
  CHECK(per->period == 4);
  CHECK(per->preperiod <= 3);
  CHECK_FALSE(detect_period(sturmian("sqrt(2)-1", 5000).letters, 50).has_value());
}

TEST_CASE("growth fit examples") {
  std::vector<std::uint64_t> lin, cst(30, 3), str;
  for (int H = 1; H <= 30; ++H) lin.push_back(static_cast<std::uint64_t>(H + 1));
  const auto a = fit_growth(curve_of(lin));
  CHECK(a.model == GrowthFit::Model::Polynomial);
  CHECK(std::abs(a.exponent - 1.0) < 0.15);
  CHECK_THROWS_AS(fit_growth(curve_of(cst)), Error);
  CHECK_THROWS_AS(fit_growth(curve_of({2, 3, 4})), Error);
  for (int H = 1; H <= 60; ++H) str.push_back(static_cast<std::uint64_t>(std::llround(std::exp(2 * std::sqrt(H)))));
  const auto s = fit_growth(curve_of(str));
  CHECK(s.model == GrowthFit::Model::Stretched);
  CHECK(std::abs(s.delta - 0.5) <= 0.05);
  CHECK(s.residuals.size() == str.size());
}

TEST_CASE("parametric counts") {
  const auto expr = gp::sturmian_expr(parse_gp("sqrt(2)-1"), parse_gp("0"));
  for (int d : {0, 1, 2}) {
    const auto r = parametric_prefix_count(expr, gp::Coding::identity(), d, 1, 200, 3);
    CHECK(r.distinct <= 2);
    CHECK(r.samples == 200);
  }
  const auto mod2 = gp::parse_coding("mod 2");
  const auto a = parametric_prefix_count(parse_gp("n"), mod2, 2, 32, 500, 9);
  const auto b = parametric_prefix_count(parse_gp("n"), mod2, 2, 32, 500, 9);
  CHECK(a.distinct == b.distinct);
  CHECK(a.distinct > 1);
  CHECK(a.distinct <= 500);
  CHECK_THROWS_AS(parametric_prefix_count(parse_gp("n"), mod2, 2, 32, 0, 9), Error);
}
