#include "bracketlab/nilheis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bracketlab/errors.hpp"

namespace bracketlab::nilheis {

namespace {

[[noreturn]] void fail(ErrorKind kind, const char* op, const std::string& detail) {
  throw Error(kind, "nilheis", op, detail);
}

bool exactly_zero(const Real& x) { return x.is_exact() && x.exact()->is_zero(); }

Integer choose2(const Integer& n) { return n * (n - 1) / 2; }

Real eval_poly(const std::vector<ExactNumber>& coefficients, const Integer& n) {
  ExactNumber value;
  exact::Rational power(1);
  const exact::Rational nq(n);
  for (const auto& c : coefficients) {
    value = value + c.scaled(power);
    power *= nq;
  }
  return Real(value);
}

}  // namespace

HeisElement heis_mul(const HeisElement& a, const HeisElement& b) {
  return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3 + a.x1 * b.x2};
}

HeisElement heis_inv(const HeisElement& g) { return {-g.x1, -g.x2, g.x1 * g.x2 - g.x3}; }

HeisElement heis_pow(const HeisElement& g, const Integer& n) {
  const Real rn(n);
  return {rn * g.x1, rn * g.x2, rn * g.x3 + Real(choose2(n)) * g.x1 * g.x2};
}

Reduced heis_reduce(const HeisElement& g) {
  Reduced out;
  const Integer p = -g.x1.floor_certified();
  const Integer q = -g.x2.floor_certified();
  const Real x1 = g.x1 + Real(p);
  const Real x3 = g.x3 + x1 * Real(q);
  const Integer r = -x3.floor_certified();
  out.point = {x1, g.x2 + Real(q), x3 + Real(r)};
  out.gamma = {p, q, p * q + r};
  return out;
}

NilPolySeq::NilPolySeq(HeisElement g0, HeisElement g1, HeisElement g2)
    : g0_(std::move(g0)), g1_(std::move(g1)), g2_(std::move(g2)) {
  if (!exactly_zero(g2_.x1) || !exactly_zero(g2_.x2)) {
    fail(ErrorKind::Domain, "NilPolySeq", "g2 must be central (x1 = x2 = 0)");
  }
}

HeisElement NilPolySeq::at(const Integer& n) const {
  return heis_mul(heis_mul(g0_, heis_pow(g1_, n)), HeisElement{Real(), Real(), Real(choose2(n)) * g2_.x3});
}

std::vector<Reduced> poly_orbit(const NilPolySeq& seq, long N, OrbitMethod method) {
  if (N < 0) fail(ErrorKind::Config, "poly_orbit", "N must be nonnegative");
  if (N > kOrbitLimit) fail(ErrorKind::LimitExceeded, "poly_orbit", "N=" + std::to_string(N) + " exceeds 10^7");
  std::vector<Reduced> out;
  out.reserve(static_cast<std::size_t>(N));
  if (method == OrbitMethod::ClosedForm) {
    for (long n = 0; n < N; ++n) out.push_back(heis_reduce(seq.at(Integer(n))));
    return out;
  }
  HeisElement g = seq.g0();
  for (long n = 0; n < N; ++n) {
    out.push_back(heis_reduce(g));
    g = heis_mul(heis_mul(g, seq.g1()), HeisElement{Real(), Real(), Real(static_cast<long long>(n)) * seq.g2().x3});
  }
  return out;
}

std::vector<std::array<double, 3>> orbit_points(const NilPolySeq& seq, long N) {
  std::vector<std::array<double, 3>> out;
  for (const auto& r : poly_orbit(seq, N)) out.push_back({r.point[0].approx(), r.point[1].approx(), r.point[2].approx()});
  return out;
}

OrbitStatistics orbit_equidistribution(const std::vector<std::array<double, 3>>& points,
                                       const std::vector<std::array<long, 3>>& frequencies, int box_depth) {
  if (points.empty()) fail(ErrorKind::EmptyInput, "orbit_equidistribution", "empty orbit");
  if (box_depth < 0 || box_depth > 6) fail(ErrorKind::Config, "orbit_equidistribution", "box depth must be in 0..6");
  OrbitStatistics st;
  st.box_depth = box_depth;
  const double N = static_cast<double>(points.size());
  for (const auto& k : frequencies) {
    if (k[2] != 0) fail(ErrorKind::Domain, "orbit_equidistribution", "frequencies must be horizontal");
    double re = 0, im = 0;
    for (const auto& x : points) {
      const double phase = 2 * std::numbers::pi * (static_cast<double>(k[0]) * x[0] + static_cast<double>(k[1]) * x[1]);
      re += std::cos(phase);
      im += std::sin(phase);
    }
    st.magnitudes.push_back(std::hypot(re, im) / N);
  }
  const long side = 1L << box_depth;
  std::vector<long> fine(static_cast<std::size_t>(side * side * side), 0);
  auto cell = [side](double v) { return std::clamp(static_cast<long>(std::floor(v * static_cast<double>(side))), 0L, side - 1); };
  for (const auto& x : points) ++fine[(cell(x[0]) * side + cell(x[1])) * side + cell(x[2])];
  for (int j = 0; j <= box_depth; ++j) {
    const long s = 1L << j;
    const int shift = box_depth - j;
    std::vector<long> coarse(static_cast<std::size_t>(s * s * s), 0);
    for (long a = 0; a < side; ++a)
      for (long b = 0; b < side; ++b)
        for (long c = 0; c < side; ++c)
          coarse[((a >> shift) * s + (b >> shift)) * s + (c >> shift)] += fine[(a * side + b) * side + c];
    const double volume = 1.0 / static_cast<double>(s * s * s);
    for (long v : coarse) st.box_discrepancy = std::max(st.box_discrepancy, std::abs(static_cast<double>(v) / N - volume));
  }
  return st;
}

Real suspension_eval(const SuspensionSystem& sys, const Integer& n) {
  const Real p = eval_poly(sys.coefficients, n);
  const Real alpha(sys.alpha);
  return (alpha * p - alpha * p.frac_certified()).frac_certified();
}

Real suspension_direct(const SuspensionSystem& sys, const Integer& n) {
  const Real m(eval_poly(sys.coefficients, n).floor_certified());
  return (Real(sys.alpha) * m).frac_certified();
}

}  // namespace bracketlab::nilheis
