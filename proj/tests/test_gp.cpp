#include <doctest.h>

#include <functional>
#include <random>

#include "bracketlab/errors.hpp"
#include "bracketlab/gp.hpp"

using namespace bracketlab;
using namespace bracketlab::gp;

namespace {

Rational floor_q(const Rational& q) {
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(f);
}

// Plain recursive big-rational walk, independent of the Evaluator program.
Rational oracle(const Node& node, const Rational& n) {
  switch (node.kind) {
    case NodeKind::Constant: return node.constant.value();
    case NodeKind::VarN: return n;
    case NodeKind::Add: {
      Rational s = 0;
      for (const auto& c : node.children) s += oracle(*c, n);
      return s;
    }
    case NodeKind::Mul: {
      Rational p = 1;
      for (const auto& c : node.children) p *= oracle(*c, n);
      return p;
    }
    case NodeKind::IntPow: {
      const Rational b = oracle(*node.children[0], n);
      Rational p = 1;
      for (unsigned i = 0; i < node.exponent; ++i) p *= b;
      return p;
    }
    case NodeKind::Floor: return floor_q(oracle(*node.children[0], n));
    case NodeKind::Frac: {
      const Rational v = oracle(*node.children[0], n);
      return v - floor_q(v);
    }
  }
  return 0;
}

std::string random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 2);
  std::uniform_int_distribution<int> small(1, 9);
  switch (pick(rng)) {
    case 0: return "n";
    case 1: return std::to_string(small(rng)) + "/" + std::to_string(small(rng));
    case 2: return "-" + std::to_string(small(rng));
    case 3: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 4: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
    case 5: return random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1);
    case 6: return "floor(" + random_expr(rng, depth - 1) + ")";
    default: return "frac(" + random_expr(rng, depth - 1) + ")^2";
  }
}

std::vector<std::int64_t> letters(const Word& w) { return w.letters; }

}  // namespace

TEST_CASE("parser builds the expected trees") {
  const auto a = parse_gp("floor(sqrt(2)*n)");
  CHECK(a.root().kind == NodeKind::Floor);
  CHECK(a.root().children[0]->kind == NodeKind::Mul);
  const auto b = parse_gp("frac(1/2*n^2)");
  CHECK(b.root().kind == NodeKind::Frac);
  const auto& mul = *b.root().children[0];
  REQUIRE(mul.children.size() == 2);
  CHECK(mul.children[1]->kind == NodeKind::IntPow);
  CHECK(mul.children[1]->exponent == 2);
  const auto c = parse_gp("floor(sqrt(2)*n*floor(sqrt(3)*n))");
  int floors = 0;
  std::function<void(const Node&)> walk = [&](const Node& x) {
    floors += x.kind == NodeKind::Floor;
    for (const auto& ch : x.children) walk(*ch);
  };
  walk(c.root());
  CHECK(floors == 2);
}

TEST_CASE("printer round trip") {
  for (const char* text : {"floor(sqrt(2)*n)", "frac(1/2*n^2)", "floor(n/2) - 3*n + pi*e", "-7 + floor(-1*n)",
                           "frac(n*(n - 1)/2*(sqrt(2) - 1))"}) {
    const auto e = parse_gp(text);
    CHECK(parse_gp(e.to_string()) == e);
    CHECK(parse_gp(e.to_string()).to_string() == e.to_string());
  }
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_gp("0.5*n"), ParseError);
  CHECK_THROWS_AS(parse_gp("floor(n"), ParseError);
  CHECK_THROWS_AS(parse_gp("a"), ParseError);
  CHECK_THROWS_AS(parse_coding("bogus"), ParseError);
}

TEST_CASE("evaluation examples") {
  CHECK(*eval_gp(parse_gp("floor(sqrt(2)*n*floor(sqrt(3)*n))"), 1).as_rational() == 1);
  CHECK(*eval_gp(parse_gp("frac(1/3*n)"), 4).as_rational() == Rational(1, 3));
  CHECK(*eval_gp(parse_gp("floor(5/2*1)"), 0).as_rational() == 2);
  // floor(sqrt(2)*10^6) by integer square root of 2*10^12.
  Integer r, v("2000000000000");
  mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
  CHECK(*eval_gp(parse_gp("floor(sqrt(2)*n)"), 1000000).as_rational() == Rational(r));
}

TEST_CASE("Sturmian examples") {
  const auto s = sturmian_expr(parse_gp("sqrt(2)-1"), parse_gp("0"));
  CHECK(*eval_gp(s, 1).as_rational() == 0);
  CHECK(*eval_gp(s, 2).as_rational() == 1);
  const auto w = generate_word(s, Coding::identity(), IndexSource::identity(), 5);
  CHECK(letters(w) == std::vector<std::int64_t>{0, 0, 1, 0, 1});
  const auto half = generate_word(sturmian_expr(parse_gp("1/2"), parse_gp("0")), Coding::identity(),
                                  IndexSource::identity(), 8);
  CHECK(letters(half) == std::vector<std::int64_t>{0, 1, 0, 1, 0, 1, 0, 1});
  CHECK_THROWS_AS(sturmian_expr(parse_gp("n"), parse_gp("0")), Error);
}

TEST_CASE("word generation with codings") {
  const auto w = generate_word(parse_gp("floor(n/2)"), parse_coding("mod 2"), IndexSource::identity(), 6);
  CHECK(letters(w) == std::vector<std::int64_t>{0, 0, 1, 1, 0, 0});
  const auto c = generate_word(parse_gp("3"), Coding::identity(), IndexSource::identity(), 10);
  CHECK(std::all_of(c.letters.begin(), c.letters.end(), [](auto x) { return x == 3; }));
  const auto cells = parse_coding("cells [0,1/2)->a [1/2,1)->b");
  const auto cw = generate_word(parse_gp("frac(sqrt(2)*n)"), cells, IndexSource::identity(), 6);
  // frac(sqrt(2) n): 0, .414, .828, .243, .657, .071
  CHECK(letters(cw) == std::vector<std::int64_t>{0, 0, 1, 0, 1, 0});
  CHECK(cw.names.at(1) == "b");
  CHECK_THROWS_AS(generate_word(parse_gp("frac(sqrt(2)*n)"), Coding::identity(), IndexSource::identity(), 3), Error);
}

TEST_CASE("rational exactness against a tree-walk oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<long> nd(-50, 50);
  int checked = 0;
  while (checked < 10000) {
    const auto e = parse_gp(random_expr(rng, 3));
    CHECK(e.all_rational());
    Evaluator ev(e);
    for (int j = 0; j < 10; ++j, ++checked) {
      const long n = nd(rng);
      const Real got = ev(static_cast<long long>(n));
      REQUIRE(got.as_rational());
      CHECK(*got.as_rational() == oracle(e.root(), Rational(n)));
    }
  }
}

TEST_CASE("Sturmian letters are binary") {
  for (const char* alpha : {"sqrt(2)-1", "sqrt(3)-1", "(sqrt(5)-1)/2"}) {
    const auto w = generate_word(sturmian_expr(parse_gp(alpha), parse_gp("0")), Coding::identity(),
                                 IndexSource::identity(), 100001);
    CHECK(std::all_of(w.letters.begin(), w.letters.end(), [](auto x) { return x == 0 || x == 1; }));
  }
}

TEST_CASE("frac equals value minus floor") {
  for (const char* text : {"sqrt(2)*n^2", "pi*n + e", "sqrt(3)*n*floor(sqrt(5)*n)", "n/7 - sqrt(11)"}) {
    const auto x = parse_gp(text);
    const auto fr = BracketExpr::frac(x);
    const auto fl = BracketExpr::floor(x);
    for (long long n = 0; n < 300; n += 7) {
      const Real d = eval_gp(fr, n) - (eval_gp(x, n) - eval_gp(fl, n));
      CHECK(d.enclosure().contains_zero());
      CHECK(d.enclosure().width() < 1e-30);
    }
  }
}
