// Adaptive-precision real arithmetic with certified floor and fractional part.
//
// A Real is an immutable expression handle together with an enclosure
// [lower, upper] whose endpoints are dyadic (MPFR) numbers. Two value shapes
// coexist:
//
//   * exact values: finite Q-linear combinations of monomials
//     pi^i * e^j * sqrt(s) with s squarefree. Rationals are the special case
//     with only the unit monomial. Sums, products, floors and fractional parts
//     of exact values stay exact, so e.g. frac(a*x) - a*frac(x) cancels to a
//     true zero instead of an interval straddling zero.
//   * opaque values: logarithms, exponentials, roots and inverses that do not
//     fold; their enclosure is recomputed from the expression tree at higher
//     working precision on demand.
//
// Invariant for every Real x:
//   lower <= value <= upper,
//   upper - lower <= 2^(2 - precision) * max(1, |upper|).
#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bracketlab::exact {

using Integer = mpz_class;
using Rational = mpq_class;

inline constexpr int kDefaultPrecision = 128;
inline constexpr int kPrecisionCap = 4096;

Rational make_rational(const Integer& p, const Integer& q);
std::string to_string(const Rational& q);
/// Parses "p", "-p" or "p/q" (q > 0) into a canonical rational.
std::optional<Rational> parse_rational(std::string_view text);

/// Owning wrapper around an mpfr_t.
class BigFloat {
 public:
  explicit BigFloat(int precision = 64);
  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  mpfr_ptr get() noexcept { return value_; }
  mpfr_srcptr get() const noexcept { return value_; }
  int precision() const noexcept { return static_cast<int>(mpfr_get_prec(value_)); }
  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(value_, rnd); }

 private:
  mpfr_t value_;
};

/// Closed interval with dyadic endpoints.
struct Interval {
  BigFloat lo;
  BigFloat hi;

  Interval() = default;
  explicit Interval(int precision) : lo(precision), hi(precision) {}

  static Interval enclose(const Rational& q, int precision);
  static Interval enclose(long value, int precision);

  bool contains(const Rational& q) const;
  bool contains(const Interval& other) const;
  bool contains_zero() const;
  /// Returns the largest p with width <= 2^(2-p) * max(1, |upper|); a huge value for points.
  int achieved_precision() const;
  double width() const;
  double midpoint() const;
};

Interval add(const Interval& a, const Interval& b, int precision);
Interval mul(const Interval& a, const Interval& b, int precision);
Interval negate(const Interval& a, int precision);
Interval intersect(const Interval& a, const Interval& b);
/// Rounds both endpoints outward to `precision` bits.
Interval round_outward(const Interval& a, int precision);

/// A literal real constant: p/q, sqrt(k) (k not a perfect square), pi or e.
class ConstantTag {
 public:
  enum class Kind { Rational, Sqrt, Pi, Euler };

  static ConstantTag rational(const Rational& value);
  static ConstantTag rational(long p, long q = 1);
  /// sqrt of a perfect square is normalised to the rational root.
  static ConstantTag sqrt(std::uint64_t k);
  static ConstantTag pi();
  static ConstantTag euler_e();

  Kind kind() const noexcept { return kind_; }
  const Rational& value() const noexcept { return value_; }
  std::uint64_t radicand() const noexcept { return radicand_; }
  std::string to_string() const;

  friend bool operator==(const ConstantTag& a, const ConstantTag& b);

 private:
  Kind kind_ = Kind::Rational;
  Rational value_{0};
  std::uint64_t radicand_ = 0;
};

/// Parses `p/q`, `sqrt(k)`, `pi`, `e` (whole text must match).
ConstantTag parse_constant(std::string_view text);

/// pi^pi_power * e^e_power * sqrt(radicand), radicand squarefree.
struct Monomial {
  std::uint64_t radicand = 1;
  std::uint32_t pi_power = 0;
  std::uint32_t e_power = 0;

  bool is_unit() const noexcept { return radicand == 1 && pi_power == 0 && e_power == 0; }
  auto operator<=>(const Monomial&) const = default;
};

/// Finite Q-linear combination of monomials. Terms are sorted and nonzero.
class ExactNumber {
 public:
  ExactNumber() = default;
  ExactNumber(const Rational& q);  // NOLINT(google-explicit-constructor)
  ExactNumber(long value);         // NOLINT(google-explicit-constructor)
  static ExactNumber from(const ConstantTag& tag);

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_rational() const noexcept;
  std::optional<Rational> as_rational() const;
  /// True when the value is a nonzero-sqrt combination, hence certainly irrational.
  bool provably_irrational() const noexcept;

  const std::vector<std::pair<Monomial, Rational>>& terms() const noexcept { return terms_; }

  ExactNumber operator-() const;
  friend ExactNumber operator+(const ExactNumber& a, const ExactNumber& b);
  friend ExactNumber operator-(const ExactNumber& a, const ExactNumber& b);
  ExactNumber scaled(const Rational& factor) const;
  /// Product; nullopt when the result leaves the supported monomial range.
  std::optional<ExactNumber> try_multiply(const ExactNumber& other) const;

  Interval enclose(int precision) const;
  std::string to_string() const;

  friend bool operator==(const ExactNumber& a, const ExactNumber& b);

 private:
  std::vector<std::pair<Monomial, Rational>> terms_;
};

namespace detail {
struct Node;
struct Access;
}

/// Immutable adaptive-precision real.
class Real {
 public:
  Real();
  Real(const Rational& q);        // NOLINT(google-explicit-constructor)
  Real(long long value);          // NOLINT(google-explicit-constructor)
  Real(int value) : Real(static_cast<long long>(value)) {}  // NOLINT(google-explicit-constructor)
  explicit Real(const Integer& value);
  explicit Real(const ExactNumber& value);
  explicit Real(const ConstantTag& tag);

  bool is_exact() const noexcept;
  /// The exact form, or nullptr for opaque values.
  const ExactNumber* exact() const noexcept;
  std::optional<Rational> as_rational() const;
  bool is_exact_integer() const;

  const Interval& enclosure() const noexcept;
  int precision() const noexcept;
  double approx() const { return enclosure().midpoint(); }
  std::string to_string(int digits = 20) const;

  /// Enclosure at `precision` bits nested inside the current one.
  /// Throws PrecisionCapExceeded above `cap`.
  Real refine(int precision, int cap = kPrecisionCap) const;

  /// Certified floor; doubles precision from 128 bits up to `cap`.
  Integer floor_certified(int cap = kPrecisionCap) const;
  Real frac_certified(int cap = kPrecisionCap) const;
  /// -1, 0 or +1; zero only for exact zero. Throws Domain if undecidable at the cap.
  int sign_certified(int cap = kPrecisionCap) const;

  Real operator-() const;
  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);

  Real inverse() const;
  Real log() const;
  Real exp() const;
  Real pow(const Rational& exponent) const;
  Real pow(const Real& exponent) const;

 private:
  explicit Real(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  friend struct detail::Access;

  std::shared_ptr<const detail::Node> node_;
};

inline Real refine(const Real& x, int precision) { return x.refine(precision); }
inline Integer floor_certified(const Real& x) { return x.floor_certified(); }
inline Real frac_certified(const Real& x) { return x.frac_certified(); }

}  // namespace bracketlab::exact
