// Discrepancy of finite point sets mod 1, the Weyl structure search for
// polynomial sequences, and measures of polynomial sublevel sets.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bracketlab/exactreal.hpp"

namespace bracketlab::equidist {

using exact::ExactNumber;
using exact::Rational;
using exact::Real;

struct DiscrepancyReport {
  Rational value;  // exact extreme discrepancy
  double D = 0;
  // Witness interval. Closed [alpha, beta] when `closed`, open (alpha, beta)
  // otherwise; the half-open intervals in the supremum approach it in the limit.
  Rational alpha;
  Rational beta;
  bool closed = true;
  std::size_t N = 0;
};

/// Points are reduced mod 1 first. O(N log N) after sorting.
DiscrepancyReport discrepancy(std::vector<Rational> points);
DiscrepancyReport discrepancy(const std::vector<double>& points);

/// Distance to the nearest integer; ties give exactly 1/2.
Real distance_to_integer(const Real& x);

struct WeylReport {
  bool equidistributed = false;
  double discrepancy = 0;
  double delta = 0;
  long N = 0;
  int degree = 0;
  std::vector<ExactNumber> beta;
  long ell = 0;                  // Structured branch only
  std::vector<double> defects;   // N^j * ||ell * beta_j|| for j = 1..d
  double max_defect = 0;
};

/// g(n) = sum_j beta_j n^j. Searches ell = 1..ell_cap exhaustively when the
/// discrepancy of (g(n) mod 1)_{n<N} is at least delta.
WeylReport weyl_dichotomy(const std::vector<ExactNumber>& beta, long N, double delta, long ell_cap = 10000);

/// Dense real polynomial in up to three variables on [0,1)^D.
class Polynomial {
 public:
  using Exponent = std::array<int, 3>;

  Polynomial() = default;
  Polynomial(int dim, std::vector<std::pair<Exponent, double>> terms);

  /// Nested arrays: D=1 [a0, a1, ...]; D=2 [[a00, a01, ...], ...] with
  /// a_ij the coefficient of x^i y^j; D=3 one more level. Entries are numbers
  /// or constant literals ("1/2", "sqrt(2)").
  static Polynomial from_json(const std::string& text);

  int dim() const noexcept { return dim_; }
  int degree() const noexcept;
  const std::vector<std::pair<Exponent, double>>& terms() const noexcept { return terms_; }
  double max_abs_coefficient() const noexcept;
  Polynomial scaled(double factor) const;

  double eval(const double* x) const;
  /// Enclosure of P over the box [lo, hi] (inflated for rounding).
  std::pair<double, double> range(const double* lo, const double* hi) const;

 private:
  int dim_ = 1;
  std::vector<std::pair<Exponent, double>> terms_;
};

/// sup |P| over [0,1]^D, computed by branch and bound to relative accuracy `tol`.
double sup_norm(const Polynomial& p, double tol = 1e-9);

enum class SublevelMethod { Grid, MonteCarlo };

struct SublevelReport {
  double epsilon = 0;
  double measure = 0;
  double error_bar = 0;
  SublevelMethod method = SublevelMethod::Grid;
  std::uint64_t cells_or_samples = 0;
};

/// Lebesgue measure of {x in [0,1)^D : |P(x)| < epsilon}. The grid method
/// refines boundary cells adaptively until `budget` cells have been classified.
SublevelReport sublevel_measure(const Polynomial& p, double epsilon, SublevelMethod method, std::uint64_t budget,
                                std::uint64_t seed = 0);

struct SupEquivalence {
  double coef_over_sup = 0;
  double sup_over_coef = 0;
  double sup = 0;
  double max_coef = 0;
};

SupEquivalence coefficient_sup_equivalence(const Polynomial& p, double tol = 1e-9);

}  // namespace bracketlab::equidist
