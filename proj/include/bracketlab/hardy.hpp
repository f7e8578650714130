// Logarithmic-exponential functions of t: parsing, symbolic derivatives,
// growth-order estimates and Taylor models with certified remainder bounds.
//
// Grammar: the GP grammar with "t" in place of "n", no floor/frac, plus
//   term   := factor (("*" | "/") factor)*
//   factor := "-" factor | atom ("^" (uint | "(" expr ")"))?
//   atom   := ... | "t" | "log(" expr ")" | "exp(" expr ")"
// A parenthesised exponent must fold to a constant.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bracketlab/exactreal.hpp"
#include "bracketlab/gp.hpp"

namespace bracketlab::hardy {

using exact::ExactNumber;
using exact::Integer;
using exact::Rational;
using exact::Real;

inline constexpr int kOrderCap = 12;

enum class Op { Const, T, Add, Sub, Mul, Div, Log, Exp, Pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Const;
  ExactNumber value;     // Const
  ExactNumber exponent;  // Pow
  NodePtr a;
  NodePtr b;
};

class HardyExpr {
 public:
  HardyExpr();
  HardyExpr(NodePtr root, Rational t0 = 2);

  const Node& root() const noexcept { return *root_; }
  const NodePtr& root_ptr() const noexcept { return root_; }
  const Rational& t0() const noexcept { return t0_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

  bool is_zero() const;
  std::string to_string() const;

  double eval(double t) const;
  Real eval(const Real& t) const;
  /// Certified floor of f(n); exact integer arithmetic for t and t^(p/q).
  Integer floor_at(const Integer& n) const;

 private:
  NodePtr root_;
  Rational t0_{2};
  std::vector<std::string> warnings_;
};

/// Positivity of log arguments, denominators and non-integer power bases is
/// probed at t0 and 10*t0; failures become warnings on the result.
HardyExpr parse_hardy(std::string_view text, const Rational& t0 = 2);

HardyExpr differentiate(const HardyExpr& f, int order = 1);

struct GrowthEstimate {
  double kappa = 0;
  double window_lo = 0;
  double window_hi = 0;
  int k = 0;
};

/// Geometric probe grid from `t_lo` to `t_hi` with `points` points.
std::vector<double> geometric_grid(double t_lo = 1e4, double t_hi = 1e8, int points = 33);
GrowthEstimate growth_order(const HardyExpr& f, const std::vector<double>& probes = geometric_grid());

struct TaylorModel {
  Integer center;
  int order = 0;
  long window = 0;
  std::vector<Real> coefficients;  // f^(j)(N)/j!, j < order
  double remainder_bound = 0;      // rounded upward
  std::string sup_method;          // "zero", "endpoints" or "grid"

  /// P_{N,order}(h).
  Real eval(const Real& h) const;
};

/// Keeps the derivative tower of one function so Taylor models at many
/// centres share the symbolic work.
class TaylorExpander {
 public:
  explicit TaylorExpander(HardyExpr f);

  const HardyExpr& function() const noexcept { return f_; }
  const HardyExpr& derivative(int order);
  TaylorModel model(const Integer& center, int order, long window);

 private:
  HardyExpr f_;
  std::vector<HardyExpr> tower_;
};

TaylorModel taylor_model(const HardyExpr& f, const Integer& center, int order, long window);

/// H^ell * N^(k - ell).
double remainder_envelope(int k, int ell, double N, double H);

/// Smallest C with bound <= C * envelope over the given (bound, envelope) pairs.
double fit_envelope_constant(const std::vector<std::pair<double, double>>& samples);

/// Taylor order from a declared k: "default" gives max(k+1, requested);
/// "10k" gives 10k and is checked against the order cap.
int choose_order(int k, int requested, std::string_view preset = "default");

/// Index source n -> floor(f(n)).
gp::IndexSource floor_index(const HardyExpr& f);

}  // namespace bracketlab::hardy
