#include "bracketlab/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include <json.hpp>

#include "bracketlab/errors.hpp"

namespace bracketlab::equidist {

namespace {

[[noreturn]] void fail(ErrorKind kind, const char* op, const std::string& detail) {
  throw Error(kind, "equidist", op, detail);
}

Rational frac_of(const Rational& x) {
  exact::Integer f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return x - Rational(f);
}

Rational to_rational(const Real& x) {
  if (auto q = x.as_rational()) return *q;
  const exact::Interval& enc = x.enclosure();
  exact::BigFloat mid(std::max(enc.lo.precision(), enc.hi.precision()) + 1);
  mpfr_add(mid.get(), enc.lo.get(), enc.hi.get(), MPFR_RNDN);
  mpfr_div_2ui(mid.get(), mid.get(), 1, MPFR_RNDN);
  Rational q;
  mpfr_get_q(q.get_mpq_t(), mid.get());
  return q;
}

}  // namespace

// ---------------------------------------------------------------------------
// Discrepancy

DiscrepancyReport discrepancy(std::vector<Rational> points) {
  if (points.empty()) fail(ErrorKind::EmptyInput, "discrepancy", "no points");
  for (auto& p : points) p = frac_of(p);
  std::sort(points.begin(), points.end());
  const std::size_t n = points.size();
  const Rational inv_n(1, static_cast<unsigned long>(n));
  // v_i = i/N - x_(i); the max is taken at the last tie, the min at the first,
  // so the witness counts are exact.
  Rational best_max, best_min;
  std::size_t i_max = 0, i_min = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rational v = Rational(static_cast<unsigned long>(i + 1)) * inv_n - points[i];
    if (i == 0 || v >= best_max) {
      best_max = v;
      i_max = i;
    }
    if (i == 0 || v < best_min) {
      best_min = v;
      i_min = i;
    }
  }
  DiscrepancyReport r;
  r.N = n;
  r.value = inv_n + best_max - best_min;
  r.D = r.value.get_d();
  if (i_min <= i_max) {
    r.closed = true;
    r.alpha = points[i_min];
    r.beta = points[i_max];
  } else {
    r.closed = false;
    r.alpha = points[i_max];
    r.beta = points[i_min];
  }
  return r;
}

DiscrepancyReport discrepancy(const std::vector<double>& points) {
  std::vector<Rational> q;
  q.reserve(points.size());
  for (double p : points) {
    if (!std::isfinite(p)) fail(ErrorKind::Domain, "discrepancy", "non-finite point");
    q.emplace_back(p);
  }
  return discrepancy(std::move(q));
}

Real distance_to_integer(const Real& x) {
  const Real f = x.frac_certified();
  const Real g = Real(1) - f;
  if (auto q = f.as_rational()) return *q <= Rational(1, 2) ? f : g;
  try {
    return (f - Real(Rational(1, 2))).sign_certified() <= 0 ? f : g;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Domain) throw;
    return f;
  }
}

// ---------------------------------------------------------------------------
// Weyl

WeylReport weyl_dichotomy(const std::vector<ExactNumber>& beta, long N, double delta, long ell_cap) {
  if (beta.empty()) fail(ErrorKind::Config, "weyl_dichotomy", "no coefficients");
  if (beta.size() > 11) fail(ErrorKind::Config, "weyl_dichotomy", "degree above 10");
  if (N < 1) fail(ErrorKind::Config, "weyl_dichotomy", "N must be positive");
  if (!(delta > 0 && delta < 0.5)) fail(ErrorKind::Config, "weyl_dichotomy", "delta must lie in (0, 1/2)");
  if (ell_cap < 1) fail(ErrorKind::Config, "weyl_dichotomy", "ell_cap must be at least 1");

  WeylReport r;
  r.beta = beta;
  r.degree = static_cast<int>(beta.size()) - 1;
  r.N = N;
  r.delta = delta;

  std::vector<Real> coef;
  for (const auto& b : beta) coef.emplace_back(b);
  std::vector<Rational> points;
  points.reserve(static_cast<std::size_t>(N));
  for (long n = 0; n < N; ++n) {
    const Real x(static_cast<long long>(n));
    Real acc = coef.back();
    for (int j = r.degree - 1; j >= 0; --j) acc = acc * x + coef[j];
    points.push_back(to_rational(acc.frac_certified()));
  }
  r.discrepancy = discrepancy(std::move(points)).D;
  if (r.discrepancy < delta) {
    r.equidistributed = true;
    return r;
  }

  double best = std::numeric_limits<double>::infinity();
  for (long ell = 1; ell <= ell_cap; ++ell) {
    std::vector<double> defects;
    double worst = 0;
    for (int j = 1; j <= r.degree; ++j) {
      const Real d = distance_to_integer(Real(beta[j].scaled(Rational(ell))));
      const double v = std::pow(static_cast<double>(N), j) * d.approx();
      defects.push_back(v);
      worst = std::max(worst, v);
    }
    if (worst < best) {
      best = worst;
      r.ell = ell;
      r.defects = std::move(defects);
      r.max_defect = worst;
    }
    if (worst == 0) break;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Polynomials

Polynomial::Polynomial(int dim, std::vector<std::pair<Exponent, double>> terms) : dim_(dim) {
  if (dim < 1 || dim > 3) fail(ErrorKind::Config, "polynomial", "dimension must be 1, 2 or 3");
  for (auto& [e, c] : terms) {
    for (int i = dim; i < 3; ++i) {
      if (e[i] != 0) fail(ErrorKind::Config, "polynomial", "exponent in an unused variable");
    }
    if (c != 0) terms_.emplace_back(e, c);
  }
  if (degree() > 8) fail(ErrorKind::Config, "polynomial", "degree above 8");
}

Polynomial Polynomial::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("equidist", "polynomial", e.byte, {"JSON array"}, e.what());
  }
  std::vector<std::pair<Exponent, double>> terms;
  int dim = 0;
  std::function<void(const nlohmann::json&, int, Exponent)> walk = [&](const nlohmann::json& node, int depth,
                                                                       Exponent e) {
    if (node.is_array()) {
      if (depth >= 3) fail(ErrorKind::Config, "polynomial", "more than three variables");
      for (std::size_t i = 0; i < node.size(); ++i) {
        Exponent next = e;
        next[depth] = static_cast<int>(i);
        walk(node[i], depth + 1, next);
      }
      return;
    }
    if (dim == 0) dim = depth;
    if (depth != dim) fail(ErrorKind::Config, "polynomial", "ragged coefficient nesting");
    double c = 0;
    if (node.is_number()) {
      c = node.get<double>();
    } else if (node.is_string()) {
      c = Real(exact::parse_constant(node.get<std::string>())).approx();
    } else {
      fail(ErrorKind::Config, "polynomial", "coefficient must be a number or a constant literal");
    }
    terms.emplace_back(e, c);
  };
  if (!j.is_array()) fail(ErrorKind::Config, "polynomial", "expected a nested array");
  walk(j, 0, {0, 0, 0});
  return Polynomial(std::max(dim, 1), std::move(terms));
}

int Polynomial::degree() const noexcept {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

double Polynomial::max_abs_coefficient() const noexcept {
  double m = 0;
  for (const auto& t : terms_) m = std::max(m, std::fabs(t.second));
  return m;
}

Polynomial Polynomial::scaled(double factor) const {
  Polynomial p = *this;
  for (auto& t : p.terms_) t.second *= factor;
  return p;
}

double Polynomial::eval(const double* x) const {
  double s = 0;
  for (const auto& [e, c] : terms_) {
    double v = c;
    for (int i = 0; i < dim_; ++i) {
      for (int k = 0; k < e[i]; ++k) v *= x[i];
    }
    s += v;
  }
  return s;
}

std::pair<double, double> Polynomial::range(const double* lo, const double* hi) const {
  double a = 0, b = 0, slack = 0;
  for (const auto& [e, c] : terms_) {
    double mlo = 1, mhi = 1;
    for (int i = 0; i < dim_; ++i) {
      for (int k = 0; k < e[i]; ++k) {
        mlo *= lo[i];
        mhi *= hi[i];
      }
    }
    if (c >= 0) {
      a += c * mlo;
      b += c * mhi;
    } else {
      a += c * mhi;
      b += c * mlo;
    }
    slack += std::fabs(c);
  }
  slack = slack * 1e-13 + 1e-300;
  return {a - slack, b + slack};
}

double sup_norm(const Polynomial& p, double tol) {
  const int D = p.dim();
  struct Box {
    double upper;
    std::array<double, 3> lo, hi;
    bool operator<(const Box& o) const { return upper < o.upper; }
  };
  const auto upper_of = [&](const std::array<double, 3>& lo, const std::array<double, 3>& hi) {
    const auto [a, b] = p.range(lo.data(), hi.data());
    return std::max(std::fabs(a), std::fabs(b));
  };
  double best = 0;
  const auto probe = [&](const std::array<double, 3>& lo, const std::array<double, 3>& hi) {
    for (int mask = 0; mask < (1 << D); ++mask) {
      std::array<double, 3> x{};
      for (int i = 0; i < D; ++i) x[i] = (mask >> i & 1) ? hi[i] : lo[i];
      best = std::max(best, std::fabs(p.eval(x.data())));
    }
    std::array<double, 3> mid{};
    for (int i = 0; i < D; ++i) mid[i] = 0.5 * (lo[i] + hi[i]);
    best = std::max(best, std::fabs(p.eval(mid.data())));
  };
  std::priority_queue<Box> queue;
  std::array<double, 3> lo{0, 0, 0}, hi{1, 1, 1};
  probe(lo, hi);
  queue.push({upper_of(lo, hi), lo, hi});
  for (int iter = 0; iter < 2000000 && !queue.empty(); ++iter) {
    Box b = queue.top();
    if (b.upper <= best * (1 + tol) + 1e-300) break;
    queue.pop();
    for (int mask = 0; mask < (1 << D); ++mask) {
      std::array<double, 3> clo = b.lo, chi = b.hi;
      for (int i = 0; i < D; ++i) {
        const double mid = 0.5 * (b.lo[i] + b.hi[i]);
        if (mask >> i & 1) {
          clo[i] = mid;
        } else {
          chi[i] = mid;
        }
      }
      probe(clo, chi);
      queue.push({upper_of(clo, chi), clo, chi});
    }
  }
  return best;
}

SublevelReport sublevel_measure(const Polynomial& p, double epsilon, SublevelMethod method, std::uint64_t budget,
                                std::uint64_t seed) {
  if (!(epsilon > 0)) fail(ErrorKind::Config, "sublevel_measure", "epsilon must be positive");
  if (budget < 1) fail(ErrorKind::BudgetTooSmall, "sublevel_measure", "zero budget");
  const int D = p.dim();
  SublevelReport r;
  r.epsilon = epsilon;
  r.method = method;

  if (method == SublevelMethod::MonteCarlo) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uint64_t hits = 0;
    std::array<double, 3> x{};
    for (std::uint64_t s = 0; s < budget; ++s) {
      for (int i = 0; i < D; ++i) x[i] = u(rng);
      if (std::fabs(p.eval(x.data())) < epsilon) ++hits;
    }
    const double n = static_cast<double>(budget);
    r.measure = static_cast<double>(hits) / n;
    // Agresti-Coull adjusted 95% half-width
    const double pt = (static_cast<double>(hits) + 2) / (n + 4);
    r.error_bar = 1.96 * std::sqrt(pt * (1 - pt) / (n + 4));
    r.cells_or_samples = budget;
    return r;
  }

  struct Cell {
    std::array<double, 3> lo;
    double width;
  };
  const int children = 1 << D;
  std::vector<Cell> boundary{{{0, 0, 0}, 1.0}};
  double inside = 0;
  double boundary_mass = 1;
  std::uint64_t used = 1;
  {
    const auto [a, b] = p.range(boundary[0].lo.data(), std::array<double, 3>{1, 1, 1}.data());
    if (a > -epsilon && b < epsilon) {
      inside = 1;
      boundary.clear();
      boundary_mass = 0;
    } else if (a >= epsilon || b <= -epsilon) {
      boundary.clear();
      boundary_mass = 0;
    }
  }
  while (!boundary.empty() && used + boundary.size() * children <= budget) {
    std::vector<Cell> next;
    const double w = boundary.front().width / 2;
    const double vol = std::pow(w, D);
    for (const Cell& c : boundary) {
      for (int mask = 0; mask < children; ++mask) {
        Cell child{c.lo, w};
        std::array<double, 3> hi{};
        for (int i = 0; i < D; ++i) {
          if (mask >> i & 1) child.lo[i] += w;
          hi[i] = child.lo[i] + w;
        }
        const auto [a, b] = p.range(child.lo.data(), hi.data());
        if (a > -epsilon && b < epsilon) {
          inside += vol;
        } else if (!(a >= epsilon || b <= -epsilon)) {
          next.push_back(child);
        }
      }
    }
    used += boundary.size() * children;
    boundary = std::move(next);
    boundary_mass = static_cast<double>(boundary.size()) * vol;
  }
  if (boundary_mass > 0.5)
    fail(ErrorKind::BudgetTooSmall, "sublevel_measure",
         "boundary mass " + std::to_string(boundary_mass) + " exceeds 1/2 with budget " + std::to_string(budget));
  r.measure = inside + boundary_mass / 2;
  r.error_bar = boundary_mass;
  r.cells_or_samples = used;
  return r;
}

SupEquivalence coefficient_sup_equivalence(const Polynomial& p, double tol) {
  SupEquivalence s;
  s.max_coef = p.max_abs_coefficient();
  if (s.max_coef == 0) fail(ErrorKind::ZeroPolynomial, "coefficient_sup_equivalence", "all coefficients vanish");
  s.sup = sup_norm(p, tol);
  s.coef_over_sup = s.max_coef / s.sup;
  s.sup_over_coef = s.sup / s.max_coef;
  return s;
}

}  // namespace bracketlab::equidist
