#include "bracketlab/hardy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

#include "bracketlab/errors.hpp"

namespace bracketlab::hardy {

namespace {

[[noreturn]] void fail(ErrorKind kind, const char* op, const std::string& detail) {
  throw Error(kind, "hardy", op, detail);
}

std::optional<Rational> rational_of(const ExactNumber& x) { return x.as_rational(); }

bool is_const(const NodePtr& n) { return n->op == Op::Const; }
bool is_value(const NodePtr& n, long v) { return is_const(n) && n->value == ExactNumber(v); }

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr constant(ExactNumber v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = std::move(v);
  return n;
}

NodePtr var_t() { return make(Op::T); }

NodePtr mul(NodePtr a, NodePtr b);

NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return constant(a->value + b->value);
  if (is_value(a, 0)) return b;
  if (is_value(b, 0)) return a;
  return make(Op::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return constant(a->value - b->value);
  if (is_value(b, 0)) return a;
  if (is_value(a, 0)) return mul(constant(ExactNumber(-1)), std::move(b));
  return make(Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(b) && !is_const(a)) std::swap(a, b);
  if (is_const(a)) {
    if (is_const(b)) {
      if (auto p = a->value.try_multiply(b->value)) return constant(std::move(*p));
    }
    if (a->value.is_zero()) return constant(ExactNumber());
    if (is_value(a, 1)) return b;
    if (b->op == Op::Mul && is_const(b->a)) {
      if (auto p = a->value.try_multiply(b->a->value)) return mul(constant(std::move(*p)), b->b);
    }
  }
  if (is_value(b, 0)) return constant(ExactNumber());
  return make(Op::Mul, std::move(a), std::move(b));
}

NodePtr divide(NodePtr a, NodePtr b) {
  if (is_value(b, 0)) fail(ErrorKind::Domain, "divide", "division by the zero function");
  if (is_value(a, 0)) return a;
  if (is_value(b, 1)) return a;
  if (is_const(b)) {
    if (auto q = rational_of(b->value)) return mul(constant(ExactNumber(Rational(1 / *q))), std::move(a));
  }
  return make(Op::Div, std::move(a), std::move(b));
}

NodePtr power(NodePtr base, const ExactNumber& c) {
  if (c.is_zero()) return constant(ExactNumber(1));
  if (c == ExactNumber(1)) return base;
  if (is_value(base, 1)) return base;
  const auto q = rational_of(c);
  if (is_const(base) && q && q->get_den() == 1 && base->value.is_rational()) {
    Real v = Real(base->value).pow(*q);
    if (auto r = v.as_rational()) return constant(ExactNumber(*r));
  }
  if (base->op == Op::Pow) {
    if (auto prod = base->exponent.try_multiply(c)) return power(base->a, *prod);
  }
  auto n = std::make_shared<Node>();
  n->op = Op::Pow;
  n->a = std::move(base);
  n->exponent = c;
  return n;
}

NodePtr log_of(NodePtr a) {
  if (is_value(a, 1)) return constant(ExactNumber());
  if (a->op == Op::Exp) return a->a;
  return make(Op::Log, std::move(a));
}

NodePtr exp_of(NodePtr a) {
  if (is_value(a, 0)) return constant(ExactNumber(1));
  if (a->op == Op::Log) return a->a;
  return make(Op::Exp, std::move(a));
}

NodePtr derive(const NodePtr& n) {
  switch (n->op) {
    case Op::Const: return constant(ExactNumber());
    case Op::T: return constant(ExactNumber(1));
    case Op::Add: return add(derive(n->a), derive(n->b));
    case Op::Sub: return sub(derive(n->a), derive(n->b));
    case Op::Mul: return add(mul(derive(n->a), n->b), mul(n->a, derive(n->b)));
    case Op::Div:
      return divide(sub(mul(derive(n->a), n->b), mul(n->a, derive(n->b))), power(n->b, ExactNumber(2)));
    case Op::Log: return divide(derive(n->a), n->a);
    case Op::Exp: return mul(n, derive(n->a));
    case Op::Pow:
      return mul(mul(constant(n->exponent), power(n->a, n->exponent - ExactNumber(1))), derive(n->a));
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Printing

int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Pow: return 3;
    case Op::Const: return n.value.terms().size() > 1 || !n.value.is_rational() ? 2 : 4;
    default: return 4;
  }
}

std::string print(const Node& n);

std::string wrap(const Node& n, int min_prec) {
  const std::string s = print(n);
  return precedence(n) < min_prec ? "(" + s + ")" : s;
}

std::string print_const(const ExactNumber& v) {
  const std::string s = v.to_string();
  if (v.terms().size() > 1) return "(" + s + ")";
  return s;
}

std::string print(const Node& n) {
  switch (n.op) {
    case Op::Const: return print_const(n.value);
    case Op::T: return "t";
    case Op::Add: return wrap(*n.a, 1) + " + " + wrap(*n.b, 2);
    case Op::Sub: return wrap(*n.a, 1) + " - " + wrap(*n.b, 2);
    case Op::Mul: return wrap(*n.a, 2) + "*" + wrap(*n.b, 3);
    case Op::Div: return wrap(*n.a, 2) + "/" + wrap(*n.b, 3);
    case Op::Log: return "log(" + print(*n.a) + ")";
    case Op::Exp: return "exp(" + print(*n.a) + ")";
    case Op::Pow: {
      std::string base = print(*n.a);
      const bool atomic = n.a->op == Op::T || n.a->op == Op::Log || n.a->op == Op::Exp ||
                          (n.a->op == Op::Const && n.a->value.terms().size() <= 1 && n.a->value.is_rational() &&
                           *n.a->value.as_rational() >= 0 && n.a->value.as_rational()->get_den() == 1);
      if (!atomic) base = "(" + base + ")";
      const auto q = n.exponent.as_rational();
      if (q && q->get_den() == 1 && *q >= 0) return base + "^" + q->get_str();
      return base + "^(" + n.exponent.to_string() + ")";
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Parsing

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != text_.size()) error({"+", "-", "*", "/", "^", "end of input"}, "unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void error(std::vector<std::string> expected, const std::string& detail) {
    throw ParseError("hardy", "parse_hardy", pos_, std::move(expected), detail);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) error({std::string(1, c)}, "missing token");
  }

  bool accept_word(std::string_view w) {
    skip();
    if (text_.substr(pos_, w.size()) != w) return false;
    const std::size_t end = pos_ + w.size();
    if (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
      return false;
    pos_ = end;
    return true;
  }

  Integer uint() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) error({"uint"}, "expected an unsigned integer");
    if (pos_ < text_.size() && text_[pos_] == '.') error({"uint"}, "decimal literals are not supported");
    return Integer(std::string(text_.substr(start, pos_ - start)));
  }

  NodePtr expr() {
    NodePtr acc = term();
    while (true) {
      if (accept('+')) {
        acc = add(acc, term());
      } else if (accept('-')) {
        acc = sub(acc, term());
      } else {
        return acc;
      }
    }
  }

  NodePtr term() {
    NodePtr acc = factor();
    while (true) {
      if (accept('*')) {
        acc = mul(acc, factor());
      } else if (accept('/')) {
        acc = divide(acc, factor());
      } else {
        return acc;
      }
    }
  }

  NodePtr factor() {
    if (accept('-')) return mul(constant(ExactNumber(-1)), factor());
    NodePtr base = atom();
    if (!accept('^')) return base;
    skip();
    ExactNumber c;
    if (accept('(')) {
      const std::size_t at = pos_;
      NodePtr e = expr();
      expect(')');
      if (!is_const(e)) {
        pos_ = at;
        error({"constant exponent"}, "exponent does not fold to a constant");
      }
      c = e->value;
    } else {
      c = ExactNumber(Rational(uint()));
    }
    return power(base, c);
  }

  NodePtr atom() {
    skip();
    if (pos_ >= text_.size()) error(atom_expected(), "unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Integer num = uint();
      Integer den(1);
      const std::size_t save = pos_;
      if (accept('/')) {
        skip();
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          den = uint();
          if (den == 0) error({"positive uint"}, "zero denominator");
        } else {
          pos_ = save;
        }
      }
      return constant(ExactNumber(exact::make_rational(num, den)));
    }
    if (accept('(')) {
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (accept_word("sqrt")) {
      expect('(');
      const Integer k = uint();
      expect(')');
      if (!k.fits_ulong_p()) error({"uint < 2^64"}, "sqrt argument too large");
      if (k == 0) return constant(ExactNumber());
      return constant(ExactNumber::from(exact::ConstantTag::sqrt(k.get_ui())));
    }
    if (accept_word("pi")) return constant(ExactNumber::from(exact::ConstantTag::pi()));
    if (accept_word("e")) return constant(ExactNumber::from(exact::ConstantTag::euler_e()));
    if (accept_word("t")) return var_t();
    if (accept_word("log")) {
      expect('(');
      NodePtr inner = expr();
      expect(')');
      return log_of(inner);
    }
    if (accept_word("exp")) {
      expect('(');
      NodePtr inner = expr();
      expect(')');
      return exp_of(inner);
    }
    error(atom_expected(), "unexpected character '" + std::string(1, c) + "'");
  }

  static std::vector<std::string> atom_expected() {
    return {"number", "sqrt(", "pi", "e", "t", "log(", "exp(", "("};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double approx(const ExactNumber& v) { return v.enclose(64).midpoint(); }

double eval_double(const Node& n, double t, std::unordered_map<const Node*, double>& memo) {
  if (n.op == Op::T) return t;
  if (auto it = memo.find(&n); it != memo.end()) return it->second;
  double r = 0;
  switch (n.op) {
    case Op::Const: r = approx(n.value); break;
    case Op::T: r = t; break;
    case Op::Add: r = eval_double(*n.a, t, memo) + eval_double(*n.b, t, memo); break;
    case Op::Sub: r = eval_double(*n.a, t, memo) - eval_double(*n.b, t, memo); break;
    case Op::Mul: r = eval_double(*n.a, t, memo) * eval_double(*n.b, t, memo); break;
    case Op::Div: r = eval_double(*n.a, t, memo) / eval_double(*n.b, t, memo); break;
    case Op::Log: r = std::log(eval_double(*n.a, t, memo)); break;
    case Op::Exp: r = std::exp(eval_double(*n.a, t, memo)); break;
    case Op::Pow: {
      const double base = eval_double(*n.a, t, memo);
      const auto q = n.exponent.as_rational();
      if (q && q->get_den() == 1 && q->get_num().fits_sint_p()) {
        r = std::pow(base, static_cast<int>(q->get_num().get_si()));
      } else {
        r = std::pow(base, approx(n.exponent));
      }
      break;
    }
  }
  memo.emplace(&n, r);
  return r;
}

Real eval_real(const Node& n, const Real& t, std::unordered_map<const Node*, Real>& memo) {
  if (n.op == Op::T) return t;
  if (auto it = memo.find(&n); it != memo.end()) return it->second;
  Real r;
  switch (n.op) {
    case Op::Const: r = Real(n.value); break;
    case Op::T: r = t; break;
    case Op::Add: r = eval_real(*n.a, t, memo) + eval_real(*n.b, t, memo); break;
    case Op::Sub: r = eval_real(*n.a, t, memo) - eval_real(*n.b, t, memo); break;
    case Op::Mul: r = eval_real(*n.a, t, memo) * eval_real(*n.b, t, memo); break;
    case Op::Div: r = eval_real(*n.a, t, memo) / eval_real(*n.b, t, memo); break;
    case Op::Log: r = eval_real(*n.a, t, memo).log(); break;
    case Op::Exp: r = eval_real(*n.a, t, memo).exp(); break;
    case Op::Pow: {
      const Real base = eval_real(*n.a, t, memo);
      if (auto q = n.exponent.as_rational()) {
        r = base.pow(*q);
      } else {
        r = base.pow(Real(n.exponent));
      }
      break;
    }
  }
  memo.emplace(&n, r);
  return r;
}

void probe_positivity(HardyExpr& f, const Node& n, double t0) {
  const auto check = [&](const Node& arg, const char* what) {
    for (double t : {t0, 10 * t0}) {
      std::unordered_map<const Node*, double> memo;
      const double v = eval_double(arg, t, memo);
      if (!(v > 0)) {
        f.add_warning(std::string("DomainWarning: ") + what + " " + print(arg) + " is not positive at t=" +
                      std::to_string(t));
        return;
      }
    }
  };
  if (n.op == Op::Log) check(*n.a, "log argument");
  if (n.op == Op::Div) check(*n.b, "denominator");
  if (n.op == Op::Pow) {
    const auto q = n.exponent.as_rational();
    if (!q || q->get_den() != 1) check(*n.a, "power base");
  }
  if (n.a) probe_positivity(f, *n.a, t0);
  if (n.b) probe_positivity(f, *n.b, t0);
}

// Upper bound of |x| as an MPFR number.
exact::BigFloat magnitude_upper(const Real& x) {
  const exact::Interval& enc = x.enclosure();
  exact::BigFloat lo(std::max(enc.lo.precision(), 64)), hi(std::max(enc.hi.precision(), 64));
  mpfr_abs(lo.get(), enc.lo.get(), MPFR_RNDU);
  mpfr_abs(hi.get(), enc.hi.get(), MPFR_RNDU);
  return mpfr_greater_p(lo.get(), hi.get()) ? lo : hi;
}

}  // namespace

// ---------------------------------------------------------------------------
// HardyExpr

HardyExpr::HardyExpr() : root_(constant(ExactNumber())) {}
HardyExpr::HardyExpr(NodePtr root, Rational t0) : root_(std::move(root)), t0_(std::move(t0)) {}

bool HardyExpr::is_zero() const { return is_value(root_, 0); }

std::string HardyExpr::to_string() const { return print(*root_); }

double HardyExpr::eval(double t) const {
  std::unordered_map<const Node*, double> memo;
  return eval_double(*root_, t, memo);
}

Real HardyExpr::eval(const Real& t) const {
  std::unordered_map<const Node*, Real> memo;
  return eval_real(*root_, t, memo);
}

Integer HardyExpr::floor_at(const Integer& n) const {
  if (root_->op == Op::T) return n;
  if (root_->op == Op::Pow && root_->a->op == Op::T && n >= 0) {
    const auto q = root_->exponent.as_rational();
    if (q && *q > 0 && q->get_num().fits_ulong_p() && q->get_den().fits_ulong_p()) {
      Integer p, r;
      mpz_pow_ui(p.get_mpz_t(), n.get_mpz_t(), q->get_num().get_ui());
      mpz_root(r.get_mpz_t(), p.get_mpz_t(), q->get_den().get_ui());
      return r;
    }
  }
  return eval(Real(n)).floor_certified();
}

HardyExpr parse_hardy(std::string_view text, const Rational& t0) {
  HardyExpr f(Parser(text).parse(), t0);
  probe_positivity(f, f.root(), mpq_get_d(t0.get_mpq_t()));
  return f;
}

HardyExpr differentiate(const HardyExpr& f, int order) {
  if (order > kOrderCap)
    fail(ErrorKind::OrderCapExceeded, "differentiate",
         "order " + std::to_string(order) + " exceeds the cap " + std::to_string(kOrderCap));
  if (order < 0) fail(ErrorKind::Domain, "differentiate", "negative order");
  NodePtr cur = f.root_ptr();
  for (int i = 0; i < order; ++i) cur = derive(cur);
  return HardyExpr(cur, f.t0());
}

// ---------------------------------------------------------------------------
// Growth

std::vector<double> geometric_grid(double t_lo, double t_hi, int points) {
  if (points < 2 || !(t_lo > 0) || !(t_hi > t_lo)) fail(ErrorKind::Config, "geometric_grid", "bad probe grid");
  std::vector<double> grid;
  const double ratio = std::log(t_hi / t_lo) / (points - 1);
  for (int i = 0; i < points; ++i) grid.push_back(t_lo * std::exp(ratio * i));
  return grid;
}

GrowthEstimate growth_order(const HardyExpr& f, const std::vector<double>& probes) {
  if (probes.size() < 2) fail(ErrorKind::Config, "growth_order", "need at least two probes");
  std::vector<double> xs, ys;
  int sign = 0;
  for (double t : probes) {
    const double v = f.eval(t);
    if (!std::isfinite(v)) fail(ErrorKind::Domain, "growth_order", "f is not finite at t=" + std::to_string(t));
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign))
      fail(ErrorKind::SignChange, "growth_order",
           "f changes sign or vanishes near t=" + std::to_string(t) + "; raise t0");
    sign = s;
    xs.push_back(std::log(t));
    ys.push_back(std::log(std::fabs(v)));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  GrowthEstimate g;
  g.kappa = sxy / sxx;
  g.window_lo = g.window_hi = g.kappa;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double local = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
    g.window_lo = std::min(g.window_lo, local);
    g.window_hi = std::max(g.window_hi, local);
  }
  g.window_lo -= 0.01;
  g.window_hi += 0.01;
  const double nearest = std::round(g.kappa);
  g.k = std::fabs(g.kappa - nearest) <= 0.01 ? static_cast<int>(nearest) : static_cast<int>(std::ceil(g.kappa + 0.1));
  return g;
}

// ---------------------------------------------------------------------------
// Taylor models

Real TaylorModel::eval(const Real& h) const {
  if (coefficients.empty()) return Real();
  Real acc = coefficients.back();
  for (int j = static_cast<int>(coefficients.size()) - 2; j >= 0; --j) acc = acc * h + coefficients[j];
  return acc;
}

TaylorExpander::TaylorExpander(HardyExpr f) : f_(std::move(f)) { tower_.push_back(f_); }

const HardyExpr& TaylorExpander::derivative(int order) {
  if (order > kOrderCap)
    fail(ErrorKind::OrderCapExceeded, "differentiate",
         "order " + std::to_string(order) + " exceeds the cap " + std::to_string(kOrderCap));
  while (static_cast<int>(tower_.size()) <= order) tower_.push_back(differentiate(tower_.back(), 1));
  return tower_[order];
}

TaylorModel TaylorExpander::model(const Integer& center, int order, long window) {
  if (order < 1) fail(ErrorKind::Domain, "taylor_model", "order must be at least 1");
  if (window < 0) fail(ErrorKind::Domain, "taylor_model", "negative window");
  if (Rational(center) < f_.t0() + window)
    fail(ErrorKind::Domain, "taylor_model", "centre " + center.get_str() + " is below t0 + H");
  TaylorModel m;
  m.center = center;
  m.order = order;
  m.window = window;
  const Real x(center);
  Integer factorial(1);
  for (int j = 0; j < order; ++j) {
    if (j > 0) factorial *= j;
    m.coefficients.push_back(derivative(j).eval(x) / Real(factorial));
  }
  factorial *= order;
  const HardyExpr& top = derivative(order);
  if (top.is_zero() || window == 0) {
    m.sup_method = "zero";
    m.remainder_bound = 0;
    return m;
  }

  const double lo = center.get_d();
  const double hi = lo + static_cast<double>(window);
  constexpr int kSamples = 64;
  bool monotone = false;
  if (order + 1 <= kOrderCap) {
    const HardyExpr& next = derivative(order + 1);
    int sign = 0;
    monotone = true;
    for (int i = 0; i < kSamples && monotone; ++i) {
      const double v = next.eval(lo + (hi - lo) * i / (kSamples - 1));
      const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
      if (s == 0 || !std::isfinite(v) || (sign != 0 && s != sign)) monotone = false;
      sign = s;
    }
  }

  exact::BigFloat sup(128);
  mpfr_set_zero(sup.get(), 1);
  const auto take = [&](const Real& at) {
    exact::BigFloat mag = magnitude_upper(top.eval(at));
    if (mpfr_greater_p(mag.get(), sup.get())) mpfr_set(sup.get(), mag.get(), MPFR_RNDU);
  };
  if (monotone) {
    m.sup_method = "endpoints";
    take(x);
    take(Real(Integer(center + window)));
  } else {
    m.sup_method = "grid";
    for (int i = 0; i < kSamples; ++i) take(Real(Rational(center) + Rational(window * i, kSamples - 1)));
    mpfr_mul_ui(sup.get(), sup.get(), 2, MPFR_RNDU);
  }
  Integer hpow;
  mpz_ui_pow_ui(hpow.get_mpz_t(), static_cast<unsigned long>(window), static_cast<unsigned long>(order));
  mpfr_mul_z(sup.get(), sup.get(), hpow.get_mpz_t(), MPFR_RNDU);
  mpfr_div_z(sup.get(), sup.get(), factorial.get_mpz_t(), MPFR_RNDU);
  m.remainder_bound = mpfr_get_d(sup.get(), MPFR_RNDU);
  return m;
}

TaylorModel taylor_model(const HardyExpr& f, const Integer& center, int order, long window) {
  TaylorExpander ex(f);
  return ex.model(center, order, window);
}

double remainder_envelope(int k, int ell, double N, double H) {
  if (ell <= k) fail(ErrorKind::Domain, "remainder_envelope", "need ell > k");
  if (H < 0 || N <= 0) fail(ErrorKind::Domain, "remainder_envelope", "need N > 0 and H >= 0");
  if (H > N) fail(ErrorKind::Domain, "remainder_envelope", "window H exceeds centre N");
  if (H == 0) return 0;
  const long double v = std::exp(static_cast<long double>(ell) * std::log(static_cast<long double>(H)) +
                                 static_cast<long double>(k - ell) * std::log(static_cast<long double>(N)));
  return static_cast<double>(v);
}

double fit_envelope_constant(const std::vector<std::pair<double, double>>& samples) {
  double c = 0;
  for (const auto& [bound, env] : samples) {
    if (env <= 0) {
      if (bound > 0) return std::numeric_limits<double>::infinity();
      continue;
    }
    c = std::max(c, bound / env);
  }
  return c;
}

int choose_order(int k, int requested, std::string_view preset) {
  int ell = 0;
  if (preset == "default") {
    ell = std::max(k + 1, requested);
  } else if (preset == "10k") {
    ell = std::max(k + 1, 10 * k);
  } else {
    fail(ErrorKind::Config, "choose_order", "unknown preset '" + std::string(preset) + "'");
  }
  if (ell > kOrderCap)
    fail(ErrorKind::OrderCapExceeded, "choose_order",
         "order " + std::to_string(ell) + " exceeds the cap " + std::to_string(kOrderCap));
  return ell;
}

gp::IndexSource floor_index(const HardyExpr& f) {
  return {[f](long long n) { return f.floor_at(Integer(std::to_string(n))); }, "floor(" + f.to_string() + ")"};
}

}  // namespace bracketlab::hardy
