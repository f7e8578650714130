// Heisenberg group in coordinates of the second kind, the nilmanifold
// G/Gamma with Gamma = Z^3, polynomial orbits, and the circle suspension.
//
// Law: (x1, x2, x3)(y1, y2, y3) = (x1 + y1, x2 + y2, x3 + y3 + x1 y2).
#pragma once

#include <array>
#include <complex>
#include <vector>

#include "bracketlab/exactreal.hpp"

namespace bracketlab::nilheis {

using exact::ExactNumber;
using exact::Integer;
using exact::Real;

struct HeisElement {
  Real x1, x2, x3;

  static HeisElement identity() { return {}; }
};

HeisElement heis_mul(const HeisElement& a, const HeisElement& b);
HeisElement heis_inv(const HeisElement& g);
/// (n a, n b, n c + C(n,2) a b); negative n allowed.
HeisElement heis_pow(const HeisElement& g, const Integer& n);
inline HeisElement heis_pow(const HeisElement& g, long n) { return heis_pow(g, Integer(n)); }

struct Reduced {
  std::array<Real, 3> point;     // coordinates in [0,1)
  std::array<Integer, 3> gamma;  // g * gamma = point
};

/// Right multiplication by (p,0,0), then (0,q,0), then (0,0,r).
Reduced heis_reduce(const HeisElement& g);

/// g(n) = g0 g1^n g2^C(n,2) with g2 central.
class NilPolySeq {
 public:
  NilPolySeq(HeisElement g0, HeisElement g1, HeisElement g2 = {});

  HeisElement at(const Integer& n) const;
  const HeisElement& g0() const noexcept { return g0_; }
  const HeisElement& g1() const noexcept { return g1_; }
  const HeisElement& g2() const noexcept { return g2_; }

 private:
  HeisElement g0_, g1_, g2_;
};

inline constexpr long kOrbitLimit = 10'000'000;

enum class OrbitMethod { ClosedForm, Incremental };

/// tau(g(n) Gamma) for n < N.
std::vector<Reduced> poly_orbit(const NilPolySeq& seq, long N, OrbitMethod method = OrbitMethod::ClosedForm);
/// Midpoints of the reduced coordinates.
std::vector<std::array<double, 3>> orbit_points(const NilPolySeq& seq, long N);

struct OrbitStatistics {
  std::vector<double> magnitudes;  // |mean e(k1 x1 + k2 x2)| per frequency
  double box_discrepancy = 0;      // max over dyadic boxes of |count/N - volume|
  int box_depth = 0;
};

/// Frequencies must have zero third entry. Boxes are all products of dyadic
/// intervals of side 2^-j, j = 0..depth.
OrbitStatistics orbit_equidistribution(const std::vector<std::array<double, 3>>& points,
                                       const std::vector<std::array<long, 3>>& frequencies, int box_depth = 3);

/// Circle rotation by alpha suspended along p(n) = sum_j coefficients[j] n^j.
struct SuspensionSystem {
  ExactNumber alpha;
  std::vector<ExactNumber> coefficients;
};

/// frac(alpha p(n) - alpha frac(p(n))).
Real suspension_eval(const SuspensionSystem& sys, const Integer& n);
/// frac(alpha floor(p(n))), the value the suspension must reproduce.
Real suspension_direct(const SuspensionSystem& sys, const Integer& n);

}  // namespace bracketlab::nilheis
