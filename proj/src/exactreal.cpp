#include "bracketlab/exactreal.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

#include "bracketlab/errors.hpp"

namespace bracketlab::exact {

namespace {

constexpr int kGuardBits = 32;
constexpr int kWorkingLimit = 8 * kPrecisionCap;
constexpr int kPointPrecision = 1 << 30;
constexpr std::size_t kMaxTerms = 64;
constexpr std::uint32_t kMaxTranscendentalPower = 64;
constexpr long kMaxIntegerPowerByMultiplication = 64;

[[noreturn]] void fail(ErrorKind kind, const char* op, const std::string& detail) {
  throw Error(kind, "exactreal", op, detail);
}

std::uint64_t isqrt_u64(std::uint64_t v) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(v)));
  while (static_cast<unsigned __int128>(r) * r > v) --r;
  while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= v) ++r;
  return r;
}

// k = outer^2 * inner with inner squarefree.
std::pair<std::uint64_t, std::uint64_t> split_square(std::uint64_t k) {
  std::uint64_t outer = 1;
  std::uint64_t inner = 1;
  std::uint64_t rest = k;
  for (std::uint64_t p = 2; static_cast<unsigned __int128>(p) * p * p <= rest; ++p) {
    int count = 0;
    while (rest % p == 0) {
      rest /= p;
      ++count;
    }
    for (int i = 0; i < count / 2; ++i) outer *= p;
    if (count % 2) inner *= p;
  }
  if (rest > 1) {
    const std::uint64_t r = isqrt_u64(rest);
    if (r * r == rest) {
      outer *= r;
    } else {
      inner *= rest;
    }
  }
  return {outer, inner};
}

}  // namespace

// ---------------------------------------------------------------------------
// Rationals

Rational make_rational(const Integer& p, const Integer& q) {
  if (q == 0) fail(ErrorKind::Domain, "make_rational", "zero denominator");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::optional<Rational> parse_rational(std::string_view text) {
  std::size_t i = 0;
  const auto digits = [&](std::size_t from) {
    std::size_t j = from;
    while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
    return j;
  };
  if (i < text.size() && text[i] == '-') ++i;
  const std::size_t num_end = digits(i);
  if (num_end == i) return std::nullopt;
  Integer num(std::string(text.substr(0, num_end)));
  if (num_end == text.size()) return Rational(num);
  if (text[num_end] != '/') return std::nullopt;
  const std::size_t den_end = digits(num_end + 1);
  if (den_end == num_end + 1 || den_end != text.size()) return std::nullopt;
  Integer den(std::string(text.substr(num_end + 1)));
  if (den == 0) return std::nullopt;
  return make_rational(num, den);
}

// ---------------------------------------------------------------------------
// BigFloat / Interval

BigFloat::BigFloat(int precision) {
  mpfr_init2(value_, std::max<int>(precision, MPFR_PREC_MIN));
  mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  if (this != &other) mpfr_swap(value_, other.value_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

Interval Interval::enclose(const Rational& q, int precision) {
  Interval r(precision);
  if (q.get_den() == 1) {
    mpfr_set_z(r.lo.get(), q.get_num_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi.get(), q.get_num_mpz_t(), MPFR_RNDU);
    return r;
  }
  mpfr_set_q(r.lo.get(), q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi.get(), q.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::enclose(long value, int precision) {
  Interval r(std::max(precision, 64));
  mpfr_set_si(r.lo.get(), value, MPFR_RNDD);
  mpfr_set_si(r.hi.get(), value, MPFR_RNDU);
  return r;
}

bool Interval::contains(const Rational& q) const {
  return mpfr_cmp_q(lo.get(), q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi.get(), q.get_mpq_t()) >= 0;
}

bool Interval::contains(const Interval& other) const {
  return mpfr_lessequal_p(lo.get(), other.lo.get()) && mpfr_greaterequal_p(hi.get(), other.hi.get());
}

bool Interval::contains_zero() const { return mpfr_sgn(lo.get()) <= 0 && mpfr_sgn(hi.get()) >= 0; }

int Interval::achieved_precision() const {
  if (mpfr_equal_p(lo.get(), hi.get())) return kPointPrecision;
  if (!mpfr_number_p(lo.get()) || !mpfr_number_p(hi.get())) return INT_MIN / 2;
  BigFloat ratio(64);
  mpfr_sub(ratio.get(), hi.get(), lo.get(), MPFR_RNDU);
  if (mpfr_cmpabs_ui(hi.get(), 1) > 0) {
    BigFloat scale(64);
    mpfr_abs(scale.get(), hi.get(), MPFR_RNDD);
    mpfr_div(ratio.get(), ratio.get(), scale.get(), MPFR_RNDU);
  }
  long exponent = 0;
  const double mantissa = mpfr_get_d_2exp(&exponent, ratio.get(), MPFR_RNDU);
  // log2(ratio) = log2(mantissa) + exponent, mantissa in [0.5, 1]
  const double log_ratio = std::log2(mantissa) + static_cast<double>(exponent);
  const double p = std::floor(2.0 - log_ratio - 1e-9);
  if (p > kPointPrecision) return kPointPrecision;
  if (p < -kPointPrecision) return -kPointPrecision;
  return static_cast<int>(p);
}

double Interval::width() const {
  BigFloat w(64);
  mpfr_sub(w.get(), hi.get(), lo.get(), MPFR_RNDU);
  return w.to_double(MPFR_RNDU);
}

double Interval::midpoint() const {
  BigFloat m(std::max(lo.precision(), hi.precision()) + 1);
  mpfr_add(m.get(), lo.get(), hi.get(), MPFR_RNDN);
  mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
  return m.to_double();
}

Interval add(const Interval& a, const Interval& b, int precision) {
  Interval r(precision);
  mpfr_add(r.lo.get(), a.lo.get(), b.lo.get(), MPFR_RNDD);
  mpfr_add(r.hi.get(), a.hi.get(), b.hi.get(), MPFR_RNDU);
  return r;
}

Interval mul(const Interval& a, const Interval& b, int precision) {
  Interval r(precision);
  BigFloat t(precision);
  const mpfr_srcptr xs[2] = {a.lo.get(), a.hi.get()};
  const mpfr_srcptr ys[2] = {b.lo.get(), b.hi.get()};
  bool first = true;
  for (auto x : xs) {
    for (auto y : ys) {
      mpfr_mul(t.get(), x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t.get(), r.lo.get())) mpfr_set(r.lo.get(), t.get(), MPFR_RNDD);
      mpfr_mul(t.get(), x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t.get(), r.hi.get())) mpfr_set(r.hi.get(), t.get(), MPFR_RNDU);
      first = false;
    }
  }
  return r;
}

Interval negate(const Interval& a, int precision) {
  Interval r(precision);
  mpfr_neg(r.lo.get(), a.hi.get(), MPFR_RNDD);
  mpfr_neg(r.hi.get(), a.lo.get(), MPFR_RNDU);
  return r;
}

Interval intersect(const Interval& a, const Interval& b) {
  Interval r;
  r.lo = mpfr_greater_p(a.lo.get(), b.lo.get()) ? a.lo : b.lo;
  r.hi = mpfr_less_p(a.hi.get(), b.hi.get()) ? a.hi : b.hi;
  if (mpfr_greater_p(r.lo.get(), r.hi.get())) return a;
  return r;
}

Interval round_outward(const Interval& a, int precision) {
  Interval r(precision);
  mpfr_set(r.lo.get(), a.lo.get(), MPFR_RNDD);
  mpfr_set(r.hi.get(), a.hi.get(), MPFR_RNDU);
  return r;
}

namespace {

Interval inverse_interval(const Interval& a, int precision) {
  Interval r(precision);
  mpfr_ui_div(r.lo.get(), 1, a.hi.get(), MPFR_RNDD);
  mpfr_ui_div(r.hi.get(), 1, a.lo.get(), MPFR_RNDU);
  return r;
}

Interval log_interval(const Interval& a, int precision) {
  Interval r(precision);
  mpfr_log(r.lo.get(), a.lo.get(), MPFR_RNDD);
  mpfr_log(r.hi.get(), a.hi.get(), MPFR_RNDU);
  return r;
}

Interval exp_interval(const Interval& a, int precision) {
  Interval r(precision);
  mpfr_exp(r.lo.get(), a.lo.get(), MPFR_RNDD);
  mpfr_exp(r.hi.get(), a.hi.get(), MPFR_RNDU);
  return r;
}

// x^(p/q) for x >= 0, q > 0.
Interval root_interval(const Interval& a, const Rational& exponent, int precision) {
  const unsigned long p = mpz_get_ui(exponent.get_num_mpz_t());
  const unsigned long q = exponent.get_den().get_ui();
  const int work = precision + kGuardBits;
  const auto power_root = [&](mpfr_srcptr x, mpfr_rnd_t rnd, BigFloat& out) {
    mpfr_pow_ui(out.get(), x, p, rnd);
    if (q != 1) mpfr_rootn_ui(out.get(), out.get(), q, rnd);
  };
  Interval r(precision);
  if (exponent >= 0) {
    BigFloat lo(work), hi(work);
    power_root(a.lo.get(), MPFR_RNDD, lo);
    power_root(a.hi.get(), MPFR_RNDU, hi);
    mpfr_set(r.lo.get(), lo.get(), MPFR_RNDD);
    mpfr_set(r.hi.get(), hi.get(), MPFR_RNDU);
  } else {
    BigFloat big(work), small(work);
    power_root(a.hi.get(), MPFR_RNDU, big);
    power_root(a.lo.get(), MPFR_RNDD, small);
    mpfr_ui_div(r.lo.get(), 1, big.get(), MPFR_RNDD);
    mpfr_ui_div(r.hi.get(), 1, small.get(), MPFR_RNDU);
  }
  return r;
}

struct MonomialKey {
  Monomial monomial;
  int precision;
  auto operator<=>(const MonomialKey&) const = default;
};

// The reference stays valid until the next call on the same thread.
const Interval& monomial_interval(const Monomial& m, int precision) {
  thread_local std::map<MonomialKey, Interval> cache;
  const MonomialKey key{m, precision};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (cache.size() > 4096) cache.clear();

  const int work = precision + 16;
  Interval acc = Interval::enclose(1L, work);
  if (m.radicand > 1) {
    Interval s(work);
    mpfr_set_ui(s.lo.get(), m.radicand, MPFR_RNDD);
    mpfr_set_ui(s.hi.get(), m.radicand, MPFR_RNDU);
    mpfr_sqrt(s.lo.get(), s.lo.get(), MPFR_RNDD);
    mpfr_sqrt(s.hi.get(), s.hi.get(), MPFR_RNDU);
    acc = mul(acc, s, work);
  }
  if (m.pi_power > 0) {
    Interval pi(work);
    mpfr_const_pi(pi.lo.get(), MPFR_RNDD);
    mpfr_const_pi(pi.hi.get(), MPFR_RNDU);
    mpfr_pow_ui(pi.lo.get(), pi.lo.get(), m.pi_power, MPFR_RNDD);
    mpfr_pow_ui(pi.hi.get(), pi.hi.get(), m.pi_power, MPFR_RNDU);
    acc = mul(acc, pi, work);
  }
  if (m.e_power > 0) {
    Interval e(work);
    mpfr_set_ui(e.lo.get(), m.e_power, MPFR_RNDN);
    mpfr_set_ui(e.hi.get(), m.e_power, MPFR_RNDN);
    mpfr_exp(e.lo.get(), e.lo.get(), MPFR_RNDD);
    mpfr_exp(e.hi.get(), e.hi.get(), MPFR_RNDU);
    acc = mul(acc, e, work);
  }
  return cache.emplace(key, std::move(acc)).first->second;
}

std::optional<std::pair<Monomial, std::uint64_t>> multiply_monomials(const Monomial& a, const Monomial& b) {
  const std::uint64_t g = std::gcd(a.radicand, b.radicand);
  const unsigned __int128 rad = static_cast<unsigned __int128>(a.radicand / g) * (b.radicand / g);
  if (rad > static_cast<unsigned __int128>(INT64_MAX)) return std::nullopt;
  const std::uint32_t pi = a.pi_power + b.pi_power;
  const std::uint32_t e = a.e_power + b.e_power;
  if (pi > kMaxTranscendentalPower || e > kMaxTranscendentalPower) return std::nullopt;
  return std::make_pair(Monomial{static_cast<std::uint64_t>(rad), pi, e}, g);
}

std::string monomial_text(const Monomial& m) {
  std::string out;
  const auto append = [&](const std::string& factor) {
    if (!out.empty()) out += "*";
    out += factor;
  };
  if (m.pi_power == 1) append("pi");
  if (m.pi_power > 1) append("pi^" + std::to_string(m.pi_power));
  if (m.e_power == 1) append("e");
  if (m.e_power > 1) append("e^" + std::to_string(m.e_power));
  if (m.radicand > 1) append("sqrt(" + std::to_string(m.radicand) + ")");
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ConstantTag

ConstantTag ConstantTag::rational(const Rational& value) {
  ConstantTag t;
  t.kind_ = Kind::Rational;
  t.value_ = value;
  t.value_.canonicalize();
  return t;
}

ConstantTag ConstantTag::rational(long p, long q) { return rational(make_rational(Integer(p), Integer(q))); }

ConstantTag ConstantTag::sqrt(std::uint64_t k) {
  const std::uint64_t r = isqrt_u64(k);
  if (r * r == k) return rational(Rational(Integer(static_cast<unsigned long>(r))));
  ConstantTag t;
  t.kind_ = Kind::Sqrt;
  t.radicand_ = k;
  return t;
}

ConstantTag ConstantTag::pi() {
  ConstantTag t;
  t.kind_ = Kind::Pi;
  return t;
}

ConstantTag ConstantTag::euler_e() {
  ConstantTag t;
  t.kind_ = Kind::Euler;
  return t;
}

std::string ConstantTag::to_string() const {
  switch (kind_) {
    case Kind::Rational: return exact::to_string(value_);
    case Kind::Sqrt: return "sqrt(" + std::to_string(radicand_) + ")";
    case Kind::Pi: return "pi";
    case Kind::Euler: return "e";
  }
  return {};
}

bool operator==(const ConstantTag& a, const ConstantTag& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case ConstantTag::Kind::Rational: return a.value_ == b.value_;
    case ConstantTag::Kind::Sqrt: return a.radicand_ == b.radicand_;
    default: return true;
  }
}

ConstantTag parse_constant(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text == "pi") return ConstantTag::pi();
  if (text == "e") return ConstantTag::euler_e();
  if (text.starts_with("sqrt(") && text.ends_with(")")) {
    const auto inner = text.substr(5, text.size() - 6);
    if (!inner.empty() && std::all_of(inner.begin(), inner.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
        inner.size() <= 18) {
      return ConstantTag::sqrt(std::stoull(std::string(inner)));
    }
    throw ParseError("exactreal", "parse_constant", 5, {"uint"}, "bad sqrt argument");
  }
  if (auto q = parse_rational(text)) return ConstantTag::rational(*q);
  throw ParseError("exactreal", "parse_constant", 0, {"p/q", "sqrt(k)", "pi", "e"},
                   "unrecognised constant '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// ExactNumber

ExactNumber::ExactNumber(const Rational& q) {
  if (q != 0) terms_.emplace_back(Monomial{}, q);
}

ExactNumber::ExactNumber(long value) : ExactNumber(Rational(value)) {}

ExactNumber ExactNumber::from(const ConstantTag& tag) {
  ExactNumber x;
  switch (tag.kind()) {
    case ConstantTag::Kind::Rational: return ExactNumber(tag.value());
    case ConstantTag::Kind::Sqrt: {
      const auto [outer, inner] = split_square(tag.radicand());
      if (inner == 1) return ExactNumber(Rational(Integer(static_cast<unsigned long>(outer))));
      x.terms_.emplace_back(Monomial{inner, 0, 0}, Rational(Integer(static_cast<unsigned long>(outer))));
      return x;
    }
    case ConstantTag::Kind::Pi: x.terms_.emplace_back(Monomial{1, 1, 0}, Rational(1)); return x;
    case ConstantTag::Kind::Euler: x.terms_.emplace_back(Monomial{1, 0, 1}, Rational(1)); return x;
  }
  return x;
}

bool ExactNumber::is_rational() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().first.is_unit());
}

std::optional<Rational> ExactNumber::as_rational() const {
  if (terms_.empty()) return Rational(0);
  if (is_rational()) return terms_.front().second;
  return std::nullopt;
}

bool ExactNumber::provably_irrational() const noexcept {
  bool has_sqrt = false;
  for (const auto& [m, c] : terms_) {
    if (m.pi_power || m.e_power) return false;
    if (m.radicand > 1) has_sqrt = true;
  }
  return has_sqrt;
}

ExactNumber ExactNumber::operator-() const {
  ExactNumber r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

ExactNumber operator+(const ExactNumber& a, const ExactNumber& b) {
  ExactNumber r;
  r.terms_.reserve(a.terms_.size() + b.terms_.size());
  auto i = a.terms_.begin();
  auto j = b.terms_.begin();
  while (i != a.terms_.end() || j != b.terms_.end()) {
    if (j == b.terms_.end() || (i != a.terms_.end() && i->first < j->first)) {
      r.terms_.push_back(*i++);
    } else if (i == a.terms_.end() || j->first < i->first) {
      r.terms_.push_back(*j++);
    } else {
      Rational c = i->second + j->second;
      if (c != 0) r.terms_.emplace_back(i->first, std::move(c));
      ++i;
      ++j;
    }
  }
  return r;
}

ExactNumber operator-(const ExactNumber& a, const ExactNumber& b) { return a + (-b); }

ExactNumber ExactNumber::scaled(const Rational& factor) const {
  if (factor == 0) return {};
  ExactNumber r = *this;
  for (auto& t : r.terms_) t.second *= factor;
  return r;
}

std::optional<ExactNumber> ExactNumber::try_multiply(const ExactNumber& other) const {
  if (is_zero() || other.is_zero()) return ExactNumber{};
  if (auto q = other.as_rational()) return scaled(*q);
  if (auto q = as_rational()) return other.scaled(*q);
  std::map<Monomial, Rational> acc;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) {
      auto prod = multiply_monomials(ma, mb);
      if (!prod) return std::nullopt;
      Rational c = ca * cb * Rational(Integer(static_cast<unsigned long>(prod->second)));
      acc[prod->first] += c;
    }
  }
  ExactNumber r;
  for (auto& [m, c] : acc) {
    if (c != 0) r.terms_.emplace_back(m, c);
  }
  if (r.terms_.size() > kMaxTerms) return std::nullopt;
  return r;
}

Interval ExactNumber::enclose(int precision) const {
  if (terms_.empty()) return Interval::enclose(0L, precision);
  if (is_rational()) return Interval::enclose(terms_.front().second, precision);
  const int work = precision + 8;
  Interval acc(work);
  BigFloat lo(work), hi(work);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (m.is_unit()) {
      const Interval q = Interval::enclose(c, work);
      mpfr_set(lo.get(), q.lo.get(), MPFR_RNDD);
      mpfr_set(hi.get(), q.hi.get(), MPFR_RNDU);
    } else {
      const Interval& mono = monomial_interval(m, work);
      // monomials are positive, so the sign of c decides which end is which
      const bool positive = c > 0;
      const bool integral = c.get_den() == 1;
      mpfr_srcptr low_src = positive ? mono.lo.get() : mono.hi.get();
      mpfr_srcptr high_src = positive ? mono.hi.get() : mono.lo.get();
      if (integral) {
        mpfr_mul_z(lo.get(), low_src, c.get_num_mpz_t(), MPFR_RNDD);
        mpfr_mul_z(hi.get(), high_src, c.get_num_mpz_t(), MPFR_RNDU);
      } else {
        mpfr_mul_q(lo.get(), low_src, c.get_mpq_t(), MPFR_RNDD);
        mpfr_mul_q(hi.get(), high_src, c.get_mpq_t(), MPFR_RNDU);
      }
    }
    if (first) {
      mpfr_set(acc.lo.get(), lo.get(), MPFR_RNDD);
      mpfr_set(acc.hi.get(), hi.get(), MPFR_RNDU);
      first = false;
    } else {
      mpfr_add(acc.lo.get(), acc.lo.get(), lo.get(), MPFR_RNDD);
      mpfr_add(acc.hi.get(), acc.hi.get(), hi.get(), MPFR_RNDU);
    }
  }
  return acc;
}

std::string ExactNumber::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    std::string body;
    if (m.is_unit()) {
      body = exact::to_string(mag);
    } else if (mag == 1) {
      body = monomial_text(m);
    } else {
      body = exact::to_string(mag) + "*" + monomial_text(m);
    }
    if (first) {
      out = negative ? "-" + body : body;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
    first = false;
  }
  return out;
}

bool operator==(const ExactNumber& a, const ExactNumber& b) { return a.terms_ == b.terms_; }

// ---------------------------------------------------------------------------
// Real

namespace detail {

enum class Op { Exact, Add, Mul, Neg, Inv, Log, Exp, Root };

struct Node {
  Op op = Op::Exact;
  ExactNumber exact;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
  std::optional<Rational> exponent;
  // Exact nodes fill the enclosure on first use; opaque nodes at construction.
  mutable std::once_flag once;
  mutable std::optional<Interval> enc;
  mutable int working = 0;
  mutable int prec = 0;
};

void set_enclosure(const Node& node, Interval enc, int working) {
  node.prec = enc.achieved_precision();
  node.enc = std::move(enc);
  node.working = working;
}

const Node& ready(const Node& node) {
  if (node.op == Op::Exact) {
    std::call_once(node.once, [&] {
      const int w = kDefaultPrecision + kGuardBits;
      set_enclosure(node, node.exact.enclose(w), w);
    });
  }
  return node;
}

std::optional<Interval> evaluate(const Node& node, int working);

// Enclosure of `node` recomputed from its children at `working` bits; nullopt
// when an operand enclosure still touches a singularity.
std::optional<Interval> combine(const Node& node, int working) {
  if (node.op == Op::Exact) return node.exact.enclose(working);
  auto x = evaluate(*node.a, working);
  if (!x) return std::nullopt;
  switch (node.op) {
    case Op::Add:
    case Op::Mul: {
      auto y = evaluate(*node.b, working);
      if (!y) return std::nullopt;
      return node.op == Op::Add ? add(*x, *y, working) : mul(*x, *y, working);
    }
    case Op::Neg: return negate(*x, working);
    case Op::Inv:
      if (x->contains_zero()) return std::nullopt;
      return inverse_interval(*x, working);
    case Op::Log:
      if (mpfr_sgn(x->lo.get()) <= 0) return std::nullopt;
      return log_interval(*x, working);
    case Op::Exp: return exp_interval(*x, working);
    case Op::Root:
      if (mpfr_sgn(x->lo.get()) < 0 || (*node.exponent < 0 && mpfr_sgn(x->lo.get()) == 0)) return std::nullopt;
      return root_interval(*x, *node.exponent, working);
    case Op::Exact: break;
  }
  return std::nullopt;
}

std::optional<Interval> evaluate(const Node& node, int working) {
  if (node.op == Op::Exact) return node.exact.enclose(working);
  if (node.working >= working) return *node.enc;
  auto enc = combine(node, working);
  if (!enc) return std::nullopt;
  return intersect(*enc, *node.enc);
}

std::shared_ptr<Node> clone(const Node& node) {
  auto copy = std::make_shared<Node>();
  copy->op = node.op;
  copy->exact = node.exact;
  copy->a = node.a;
  copy->b = node.b;
  copy->exponent = node.exponent;
  return copy;
}

struct Access {
  static Real make(std::shared_ptr<const Node> node) { return Real(std::move(node)); }
  static const Node& node(const Real& r) { return ready(*r.node_); }
  static const std::shared_ptr<const Node>& ptr(const Real& r) { return r.node_; }
};

}  // namespace detail

namespace {

using detail::Access;
using detail::Node;
using detail::Op;

Real make_exact(ExactNumber value) {
  auto node = std::make_shared<Node>();
  node->op = Op::Exact;
  node->exact = std::move(value);
  return Access::make(std::move(node));
}

Real make_opaque(Op op, const Real& a, const Real* b, std::optional<Rational> exponent = std::nullopt) {
  auto node = std::make_shared<Node>();
  node->op = op;
  node->a = Access::ptr(a);
  if (b) node->b = Access::ptr(*b);
  node->exponent = std::move(exponent);
  int w = std::max(kDefaultPrecision + kGuardBits, Access::node(a).working);
  if (b) w = std::max(w, Access::node(*b).working);
  while (true) {
    auto enc = detail::combine(*node, w);
    if (enc) {
      const int achieved = enc->achieved_precision();
      if (achieved >= kDefaultPrecision || w >= kWorkingLimit) {
        detail::set_enclosure(*node, std::move(*enc), w);
        break;
      }
    } else if (w >= kWorkingLimit) {
      fail(ErrorKind::PrecisionCapExceeded, "evaluate", "operand enclosure never separated from the singularity");
    }
    w *= 2;
  }
  if (!mpfr_number_p(node->enc->lo.get()) || !mpfr_number_p(node->enc->hi.get()))
    fail(ErrorKind::Domain, "evaluate", "result overflows the dyadic exponent range");
  return Access::make(std::move(node));
}

}  // namespace

Real::Real() : Real(Rational(0)) {}
Real::Real(const Rational& q) : node_(Access::ptr(make_exact(ExactNumber(q)))) {}
Real::Real(long long value) : Real(Rational(Integer(std::to_string(value)))) {}
Real::Real(const Integer& value) : Real(Rational(value)) {}
Real::Real(const ExactNumber& value) : node_(Access::ptr(make_exact(value))) {}
Real::Real(const ConstantTag& tag) : Real(ExactNumber::from(tag)) {}

bool Real::is_exact() const noexcept { return node_->op == Op::Exact; }

const ExactNumber* Real::exact() const noexcept { return is_exact() ? &node_->exact : nullptr; }

std::optional<Rational> Real::as_rational() const {
  if (!is_exact()) return std::nullopt;
  return node_->exact.as_rational();
}

bool Real::is_exact_integer() const {
  if (!is_exact()) return false;
  const auto& terms = node_->exact.terms();
  if (terms.empty()) return true;
  return terms.size() == 1 && terms.front().first.is_unit() && terms.front().second.get_den() == 1;
}

const Interval& Real::enclosure() const noexcept { return *Access::node(*this).enc; }

int Real::precision() const noexcept { return Access::node(*this).prec; }

std::string Real::to_string(int digits) const {
  if (is_exact()) return node_->exact.to_string();
  const Interval& enc = enclosure();
  char* buffer = nullptr;
  BigFloat mid(std::max(enc.lo.precision(), enc.hi.precision()) + 1);
  mpfr_add(mid.get(), enc.lo.get(), enc.hi.get(), MPFR_RNDN);
  mpfr_div_2ui(mid.get(), mid.get(), 1, MPFR_RNDN);
  mpfr_asprintf(&buffer, "%.*Rg", digits, mid.get());
  std::string out(buffer);
  mpfr_free_str(buffer);
  return out;
}

Real Real::refine(int precision, int cap) const {
  if (precision > cap) {
    fail(ErrorKind::PrecisionCapExceeded, "refine",
         "requested " + std::to_string(precision) + " bits, cap is " + std::to_string(cap));
  }
  precision = std::max(precision, 2);
  const Node& cur = Access::node(*this);
  if (cur.prec >= precision) {
    if (cur.prec >= kPointPrecision) return *this;
    auto node = detail::clone(cur);
    std::call_once(node->once, [] {});
    detail::set_enclosure(*node, round_outward(*cur.enc, precision + 1), std::min(cur.working, precision + 1));
    return Access::make(std::move(node));
  }
  int w = std::max(precision + kGuardBits, cur.working);
  while (true) {
    auto enc = detail::combine(cur, w);
    if (enc) {
      *enc = intersect(*enc, *cur.enc);
      if (enc->achieved_precision() >= precision) {
        auto node = detail::clone(cur);
        std::call_once(node->once, [] {});
        detail::set_enclosure(*node, std::move(*enc), w);
        return Access::make(std::move(node));
      }
    }
    if (w >= kWorkingLimit) {
      fail(ErrorKind::PrecisionCapExceeded, "refine",
           "could not reach " + std::to_string(precision) + " bits within the working limit");
    }
    w *= 2;
  }
}

namespace {

bool floor_of(const Interval& enc, Integer& m) {
  mpfr_get_z(m.get_mpz_t(), enc.lo.get(), MPFR_RNDD);
  const Integer next = m + 1;
  return mpfr_cmp_z(enc.hi.get(), next.get_mpz_t()) < 0;
}

// Certified floor together with the enclosure that certified it.
std::pair<Integer, Real> floor_with_witness(const Real& x, int cap) {
  Integer m;
  if (const ExactNumber* ex = x.exact()) {
    if (auto q = ex->as_rational()) {
      mpz_fdiv_q(m.get_mpz_t(), q->get_num_mpz_t(), q->get_den_mpz_t());
      return {m, x};
    }
    for (int p = kDefaultPrecision;; p = std::min(p * 2, cap)) {
      if (floor_of(ex->enclose(p + kGuardBits), m)) return {m, x};
      if (p >= cap) break;
    }
  } else {
    Real current = x;
    for (int p = kDefaultPrecision;; p = std::min(p * 2, cap)) {
      if (current.precision() < p) current = current.refine(p, std::max(cap, p));
      if (floor_of(current.enclosure(), m)) return {m, current};
      if (p >= cap) break;
    }
  }
  fail(ErrorKind::FloorUndecidable, "floor_certified",
       "enclosure of " + x.to_string(30) + " straddles an integer at " + std::to_string(cap) + " bits");
}

}  // namespace

Integer Real::floor_certified(int cap) const { return floor_with_witness(*this, cap).first; }

Real Real::frac_certified(int cap) const {
  auto [m, witness] = floor_with_witness(*this, cap);
  if (is_exact()) return make_exact(node_->exact - ExactNumber(Rational(m)));
  auto node = std::make_shared<Node>();
  node->op = Op::Add;
  node->a = node_;
  node->b = Access::ptr(make_exact(ExactNumber(Rational(-m))));
  const Interval& enc = witness.enclosure();
  const int w = std::max(enc.lo.precision(), enc.hi.precision()) + 8;
  Interval shifted(w);
  mpfr_sub_z(shifted.lo.get(), enc.lo.get(), m.get_mpz_t(), MPFR_RNDD);
  mpfr_sub_z(shifted.hi.get(), enc.hi.get(), m.get_mpz_t(), MPFR_RNDU);
  if (mpfr_sgn(shifted.lo.get()) < 0) mpfr_set_zero(shifted.lo.get(), 1);
  detail::set_enclosure(*node, std::move(shifted), Access::node(witness).working);
  return Access::make(std::move(node));
}

int Real::sign_certified(int cap) const {
  if (const ExactNumber* ex = exact()) {
    if (ex->is_zero()) return 0;
    if (auto q = ex->as_rational()) return sgn(*q);
    for (int p = kDefaultPrecision;; p = std::min(p * 2, cap)) {
      const Interval enc = ex->enclose(p + kGuardBits);
      if (mpfr_sgn(enc.lo.get()) > 0) return 1;
      if (mpfr_sgn(enc.hi.get()) < 0) return -1;
      if (p >= cap) break;
    }
  } else {
    Real current = *this;
    for (int p = kDefaultPrecision;; p = std::min(p * 2, cap)) {
      if (current.precision() < p) current = current.refine(p, std::max(cap, p));
      const Interval& enc = current.enclosure();
      if (mpfr_sgn(enc.lo.get()) > 0) return 1;
      if (mpfr_sgn(enc.hi.get()) < 0) return -1;
      if (p >= cap) break;
    }
  }
  fail(ErrorKind::Domain, "sign_certified", "sign of " + to_string(30) + " undecidable at the precision cap");
}

Real Real::operator-() const {
  if (is_exact()) return make_exact(-node_->exact);
  return make_opaque(Op::Neg, *this, nullptr);
}

Real operator+(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return make_exact(a.node_->exact + b.node_->exact);
  if (a.is_exact() && a.node_->exact.is_zero()) return b;
  if (b.is_exact() && b.node_->exact.is_zero()) return a;
  return make_opaque(Op::Add, a, &b);
}

Real operator-(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return make_exact(a.node_->exact - b.node_->exact);
  return a + (-b);
}

Real operator*(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) {
    if (auto prod = a.node_->exact.try_multiply(b.node_->exact)) return make_exact(std::move(*prod));
  }
  if (auto q = a.as_rational()) {
    if (*q == 0) return Real();
    if (*q == 1) return b;
  }
  if (auto q = b.as_rational()) {
    if (*q == 0) return Real();
    if (*q == 1) return a;
  }
  return make_opaque(Op::Mul, a, &b);
}

Real operator/(const Real& a, const Real& b) {
  if (auto q = b.as_rational()) {
    if (*q == 0) fail(ErrorKind::Domain, "divide", "division by exact zero");
    if (a.is_exact()) return make_exact(a.node_->exact.scaled(1 / *q));
  }
  return a * b.inverse();
}

Real Real::inverse() const {
  if (auto q = as_rational()) {
    if (*q == 0) fail(ErrorKind::Domain, "inverse", "inverse of exact zero");
    return Real(Rational(1 / *q));
  }
  if (is_exact()) {
    // a + b*sqrt(s): multiply by the conjugate.
    const auto& terms = node_->exact.terms();
    const bool quadratic = terms.size() <= 2 && std::all_of(terms.begin(), terms.end(), [&](const auto& t) {
                             return t.first.pi_power == 0 && t.first.e_power == 0 &&
                                    (t.first.is_unit() || t.first.radicand == terms.back().first.radicand);
                           });
    if (quadratic) {
      Rational a = 0, b = 0;
      const std::uint64_t s = terms.back().first.radicand;
      for (const auto& [m, c] : terms) (m.is_unit() ? a : b) = c;
      const Rational norm = a * a - b * b * Rational(Integer(static_cast<unsigned long>(s)));
      ExactNumber conj = ExactNumber(a) - ExactNumber::from(ConstantTag::sqrt(s)).scaled(b);
      return make_exact(conj.scaled(1 / norm));
    }
  }
  if (sign_certified() == 0) fail(ErrorKind::Domain, "inverse", "inverse of zero");
  return make_opaque(Op::Inv, *this, nullptr);
}

Real Real::log() const {
  if (auto q = as_rational(); q && *q == 1) return Real();
  if (sign_certified() <= 0) fail(ErrorKind::Domain, "log", "logarithm of non-positive value " + to_string(20));
  return make_opaque(Op::Log, *this, nullptr);
}

Real Real::exp() const {
  if (is_exact() && node_->exact.is_zero()) return Real(1);
  return make_opaque(Op::Exp, *this, nullptr);
}

Real Real::pow(const Rational& exponent) const {
  if (exponent == 0) return Real(1);
  if (exponent == 1) return *this;
  const bool integral = exponent.get_den() == 1;
  if (is_exact() && node_->exact.is_zero()) {
    if (exponent < 0) fail(ErrorKind::Domain, "pow", "zero to a negative power");
    return Real();
  }
  if (integral && abs(exponent.get_num()) <= kMaxIntegerPowerByMultiplication) {
    long e = exponent.get_num().get_si();
    const bool negative = e < 0;
    if (negative) e = -e;
    Real result(1);
    Real base = *this;
    while (e > 0) {
      if (e & 1) result = result * base;
      e >>= 1;
      if (e > 0) base = base * base;
    }
    return negative ? result.inverse() : result;
  }
  if (auto q = as_rational(); q && *q > 0) {
    const Integer& num = q->get_num();
    const Integer& den = q->get_den();
    const Integer p = abs(exponent.get_num());
    const unsigned long root = exponent.get_den().get_ui();
    const std::size_t bits = mpz_sizeinbase(num.get_mpz_t(), 2) + mpz_sizeinbase(den.get_mpz_t(), 2);
    if (p.fits_ulong_p() && bits * p.get_ui() <= (1u << 20)) {
      Integer np, dp, nr, dr;
      mpz_pow_ui(np.get_mpz_t(), num.get_mpz_t(), p.get_ui());
      mpz_pow_ui(dp.get_mpz_t(), den.get_mpz_t(), p.get_ui());
      const bool exact_num = mpz_root(nr.get_mpz_t(), np.get_mpz_t(), root) != 0;
      const bool exact_den = mpz_root(dr.get_mpz_t(), dp.get_mpz_t(), root) != 0;
      if (exact_num && exact_den) {
        Rational r = make_rational(nr, dr);
        return Real(exponent < 0 ? Rational(1 / r) : r);
      }
    }
  }
  const int s = sign_certified();
  if (s < 0) fail(ErrorKind::Domain, "pow", "non-integer power of negative value " + to_string(20));
  if (!exponent.get_num().fits_slong_p() || !exponent.get_den().fits_ulong_p()) {
    return (Real(exponent) * log()).exp();
  }
  return make_opaque(Op::Root, *this, nullptr, exponent);
}

Real Real::pow(const Real& exponent) const {
  if (auto q = exponent.as_rational()) return pow(*q);
  return (exponent * log()).exp();
}

}  // namespace bracketlab::exact
