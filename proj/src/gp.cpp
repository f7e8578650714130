#include "bracketlab/gp.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

#include "bracketlab/errors.hpp"

namespace bracketlab::gp {

namespace {

[[noreturn]] void fail(ErrorKind kind, const char* op, const std::string& detail) {
  throw Error(kind, "gp_core", op, detail);
}

NodePtr make_node(NodeKind kind, std::vector<NodePtr> children = {}, unsigned exponent = 0,
                  const ConstantTag& c = ConstantTag::rational(0)) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->children = std::move(children);
  node->exponent = exponent;
  node->constant = c;
  return node;
}

bool is_negated_term(const Node& node) {
  return node.kind == NodeKind::Mul && node.children.size() == 2 &&
         node.children[0]->kind == NodeKind::Constant &&
         node.children[0]->constant.kind() == ConstantTag::Kind::Rational && node.children[0]->constant.value() == -1;
}

std::string print_expr(const Node& node);

std::string print_factor(const Node& node) {
  switch (node.kind) {
    case NodeKind::Constant: return node.constant.to_string();
    case NodeKind::VarN: return "n";
    case NodeKind::Floor: return "floor(" + print_expr(*node.children[0]) + ")";
    case NodeKind::Frac: return "frac(" + print_expr(*node.children[0]) + ")";
    case NodeKind::IntPow: {
      const Node& base = *node.children[0];
      const bool wrap = base.kind == NodeKind::Add || base.kind == NodeKind::Mul || base.kind == NodeKind::IntPow;
      const std::string b = print_factor(base);
      return (wrap ? "(" + b + ")" : b) + "^" + std::to_string(node.exponent);
    }
    case NodeKind::Add:
    case NodeKind::Mul: return "(" + print_expr(node) + ")";
  }
  return {};
}

std::string print_term(const Node& node) {
  if (node.kind == NodeKind::Add) return "(" + print_expr(node) + ")";
  if (node.kind != NodeKind::Mul) return print_factor(node);
  std::string out;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (i) out += "*";
    out += print_factor(*node.children[i]);
  }
  return out;
}

std::string print_expr(const Node& node) {
  if (node.kind != NodeKind::Add) return print_term(node);
  std::string out;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    const Node& c = *node.children[i];
    if (i == 0) {
      out = print_term(c);
    } else if (is_negated_term(c)) {
      out += " - " + print_term(*c.children[1]);
    } else {
      out += " + " + print_term(c);
    }
  }
  return out;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.exponent != b.exponent || a.children.size() != b.children.size()) return false;
  if (a.kind == NodeKind::Constant && !(a.constant == b.constant)) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!structurally_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != text_.size()) error({"+", "-", "*", "/", "end of input"}, "unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void error(std::vector<std::string> expected, const std::string& detail) {
    throw ParseError("gp_core", "parse_gp", pos_, std::move(expected), detail);
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

  bool peek_digit() {
    skip();
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  Integer uint() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) error({"uint"}, "expected an unsigned integer");
    if (pos_ < text_.size() && text_[pos_] == '.') error({"uint"}, "decimal literals are not supported");
    return Integer(std::string(text_.substr(start, pos_ - start)));
  }

  NodePtr intern(NodePtr node) {
    std::string key = std::to_string(static_cast<int>(node->kind)) + ":" + print_factor(*node);
    auto [it, inserted] = interned_.emplace(std::move(key), node);
    return inserted ? node : it->second;
  }

  NodePtr constant(const ConstantTag& c) { return intern(make_node(NodeKind::Constant, {}, 0, c)); }

  NodePtr expr() {
    std::vector<NodePtr> terms{term()};
    while (true) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(intern(make_node(NodeKind::Mul, {constant(ConstantTag::rational(-1)), term()})));
      } else {
        break;
      }
    }
    if (terms.size() == 1) return terms[0];
    return intern(make_node(NodeKind::Add, std::move(terms)));
  }

  NodePtr term() {
    std::vector<NodePtr> factors{factor()};
    while (true) {
      if (accept('*')) {
        factors.push_back(factor());
      } else if (accept('/')) {
        const Integer d = uint();
        if (d == 0) error({"positive uint"}, "division by zero");
        factors.push_back(constant(ConstantTag::rational(Rational(1) / Rational(d))));
      } else {
        break;
      }
    }
    if (factors.size() == 1) return factors[0];
    return intern(make_node(NodeKind::Mul, std::move(factors)));
  }

  NodePtr factor() {
    NodePtr base = atom();
    if (accept('^')) {
      const Integer k = uint();
      if (!k.fits_uint_p()) error({"small uint"}, "exponent too large");
      return intern(make_node(NodeKind::IntPow, {base}, static_cast<unsigned>(k.get_ui())));
    }
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= text_.size()) error(atom_expected(), "unexpected end of input");
    const char c = text_[pos_];
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      bool negative = false;
      if (c == '-') {
        ++pos_;
        negative = true;
        if (!peek_digit()) error({"uint"}, "'-' must be followed by a number");
      }
      Integer num = uint();
      Integer den(1);
      const std::size_t save = pos_;
      if (accept('/')) {
        if (peek_digit()) {
          den = uint();
          if (den == 0) error({"positive uint"}, "zero denominator");
        } else {
          pos_ = save;
        }
      }
      if (negative) num = -num;
      return constant(ConstantTag::rational(exact::make_rational(num, den)));
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
      if (k == 0) return constant(ConstantTag::rational(0));
      if (!k.fits_ulong_p()) error({"uint < 2^64"}, "sqrt argument too large");
      return constant(ConstantTag::sqrt(k.get_ui()));
    }
    if (accept_word("pi")) return constant(ConstantTag::pi());
    if (accept_word("e")) return constant(ConstantTag::euler_e());
    if (accept_word("n")) return intern(make_node(NodeKind::VarN));
    if (accept_word("floor")) {
      expect('(');
      NodePtr inner = expr();
      expect(')');
      return intern(make_node(NodeKind::Floor, {inner}));
    }
    if (accept_word("frac")) {
      expect('(');
      NodePtr inner = expr();
      expect(')');
      return intern(make_node(NodeKind::Frac, {inner}));
    }
    error(atom_expected(), "unexpected character '" + std::string(1, c) + "'");
  }

  static std::vector<std::string> atom_expected() {
    return {"number", "sqrt(", "pi", "e", "n", "floor(", "frac(", "("};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::unordered_map<std::string, NodePtr> interned_;
};

}  // namespace

// ---------------------------------------------------------------------------
// BracketExpr

BracketExpr::BracketExpr() : root_(make_node(NodeKind::Constant)) {}
BracketExpr::BracketExpr(NodePtr root) : root_(std::move(root)) {}

BracketExpr BracketExpr::constant(const ConstantTag& c) {
  return BracketExpr(make_node(NodeKind::Constant, {}, 0, c));
}

BracketExpr BracketExpr::var_n() { return BracketExpr(make_node(NodeKind::VarN)); }

BracketExpr BracketExpr::add(std::vector<BracketExpr> terms) {
  if (terms.empty()) return constant(ConstantTag::rational(0));
  if (terms.size() == 1) return terms[0];
  std::vector<NodePtr> children;
  for (auto& t : terms) children.push_back(t.root_);
  return BracketExpr(make_node(NodeKind::Add, std::move(children)));
}

BracketExpr BracketExpr::mul(std::vector<BracketExpr> factors) {
  if (factors.empty()) return constant(ConstantTag::rational(1));
  if (factors.size() == 1) return factors[0];
  std::vector<NodePtr> children;
  for (auto& f : factors) children.push_back(f.root_);
  return BracketExpr(make_node(NodeKind::Mul, std::move(children)));
}

BracketExpr BracketExpr::int_pow(const BracketExpr& base, unsigned exponent) {
  return BracketExpr(make_node(NodeKind::IntPow, {base.root_}, exponent));
}

BracketExpr BracketExpr::floor(const BracketExpr& child) {
  return BracketExpr(make_node(NodeKind::Floor, {child.root_}));
}

BracketExpr BracketExpr::frac(const BracketExpr& child) {
  return BracketExpr(make_node(NodeKind::Frac, {child.root_}));
}

std::string BracketExpr::to_string() const { return print_expr(*root_); }

namespace {
bool any_node(const Node& node, const std::function<bool(const Node&)>& pred) {
  if (pred(node)) return true;
  return std::any_of(node.children.begin(), node.children.end(),
                     [&](const NodePtr& c) { return any_node(*c, pred); });
}
}  // namespace

bool BracketExpr::all_rational() const {
  return !any_node(*root_, [](const Node& n) {
    return n.kind == NodeKind::Constant && n.constant.kind() != ConstantTag::Kind::Rational;
  });
}

bool BracketExpr::has_var() const {
  return any_node(*root_, [](const Node& n) { return n.kind == NodeKind::VarN; });
}

bool operator==(const BracketExpr& a, const BracketExpr& b) { return structurally_equal(*a.root_, *b.root_); }

BracketExpr parse_gp(std::string_view text) { return BracketExpr(Parser(text).parse()); }

// ---------------------------------------------------------------------------
// Evaluation

Evaluator::Evaluator(const BracketExpr& expr) {
  std::unordered_map<const Node*, int> index;
  std::function<int(const NodePtr&)> visit = [&](const NodePtr& node) -> int {
    if (auto it = index.find(node.get()); it != index.end()) return it->second;
    Step step;
    step.kind = node->kind;
    step.exponent = node->exponent;
    for (const auto& c : node->children) step.args.push_back(visit(c));
    if (node->kind == NodeKind::Constant) step.constant = Real(node->constant);
    if (node->kind == NodeKind::Floor || node->kind == NodeKind::Frac) step.text = print_factor(*node);
    if (node->kind == NodeKind::VarN) has_var_ = true;
    program_.push_back(std::move(step));
    const int id = static_cast<int>(program_.size()) - 1;
    index.emplace(node.get(), id);
    return id;
  };
  visit(expr.root_ptr());
  values_.resize(program_.size());
}

Real Evaluator::operator()(const Integer& n) {
  if (!has_var_ && constant_cached_) return values_.back();
  const Real var(n);
  for (std::size_t i = 0; i < program_.size(); ++i) {
    const Step& s = program_[i];
    switch (s.kind) {
      case NodeKind::Constant: values_[i] = s.constant; break;
      case NodeKind::VarN: values_[i] = var; break;
      case NodeKind::Add: {
        Real acc = values_[s.args[0]];
        for (std::size_t j = 1; j < s.args.size(); ++j) acc = acc + values_[s.args[j]];
        values_[i] = std::move(acc);
        break;
      }
      case NodeKind::Mul: {
        Real acc = values_[s.args[0]];
        for (std::size_t j = 1; j < s.args.size(); ++j) acc = acc * values_[s.args[j]];
        values_[i] = std::move(acc);
        break;
      }
      case NodeKind::IntPow: values_[i] = values_[s.args[0]].pow(Rational(s.exponent)); break;
      case NodeKind::Floor:
      case NodeKind::Frac:
        try {
          const Real& x = values_[s.args[0]];
          values_[i] = s.kind == NodeKind::Floor ? Real(x.floor_certified()) : x.frac_certified();
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::FloorUndecidable) throw;
          fail(ErrorKind::FloorUndecidable, "eval_gp",
               "at n=" + n.get_str() + " in subexpression " + s.text + ": " + e.what());
        }
        break;
    }
  }
  constant_cached_ = true;
  return values_.back();
}

Real eval_gp(const BracketExpr& expr, const Integer& n) {
  Evaluator ev(expr);
  return ev(n);
}

BracketExpr sturmian_expr(const BracketExpr& alpha, const BracketExpr& beta) {
  if (alpha.has_var() || beta.has_var()) fail(ErrorKind::Domain, "sturmian_expr", "alpha and beta must be constants");
  const Real a = eval_gp(alpha, 0);
  const Real b = eval_gp(beta, 0);
  if (a.sign_certified() <= 0 || (Real(1) - a).sign_certified() <= 0)
    fail(ErrorKind::Domain, "sturmian_expr", "alpha = " + a.to_string() + " is outside (0,1)");
  if (b.sign_certified() < 0 || (Real(1) - b).sign_certified() <= 0)
    fail(ErrorKind::Domain, "sturmian_expr", "beta = " + b.to_string() + " is outside [0,1)");
  const bool zero_beta = b.is_exact() && b.exact()->is_zero();
  const auto shifted = [&](BracketExpr arg) {
    BracketExpr lin = BracketExpr::mul({alpha, std::move(arg)});
    return zero_beta ? lin : BracketExpr::add({lin, beta});
  };
  const BracketExpr n = BracketExpr::var_n();
  const BracketExpr next =
      BracketExpr::floor(shifted(BracketExpr::add({n, BracketExpr::constant(ConstantTag::rational(1))})));
  const BracketExpr cur = BracketExpr::floor(shifted(n));
  return BracketExpr::add({next, BracketExpr::mul({BracketExpr::constant(ConstantTag::rational(-1)), cur})});
}

// ---------------------------------------------------------------------------
// Codings

Coding Coding::identity() { return Coding(); }

Coding Coding::residue(long modulus, std::vector<std::string> labels) {
  if (modulus < 2) fail(ErrorKind::Config, "residue", "modulus must be at least 2");
  if (labels.empty()) {
    for (long r = 0; r < modulus; ++r) labels.push_back(std::to_string(r));
  }
  if (static_cast<long>(labels.size()) != modulus)
    fail(ErrorKind::Config, "residue", "need exactly one label per residue class");
  Coding c;
  c.kind_ = Kind::Residue;
  c.modulus_ = modulus;
  c.labels_ = std::move(labels);
  return c;
}

Coding Coding::cells(std::vector<Cell> cells) {
  if (cells.empty()) fail(ErrorKind::Config, "cells", "no cells given");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!(cells[i].lo < cells[i].hi)) fail(ErrorKind::Config, "cells", "empty cell " + cells[i].label);
    if (i && cells[i].lo < cells[i - 1].hi) fail(ErrorKind::Config, "cells", "cells overlap or are unsorted");
  }
  Coding c;
  c.kind_ = Kind::Cells;
  for (const auto& cell : cells) c.labels_.push_back(cell.label);
  c.cells_ = std::move(cells);
  return c;
}

namespace {

// x >= q certified.
bool at_least(const Real& x, const Rational& q) {
  if (auto r = x.as_rational()) return *r >= q;
  try {
    return (x - Real(q)).sign_certified() >= 0;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Domain) throw;
    fail(ErrorKind::FloorUndecidable, "code", "cannot place " + x.to_string() + " relative to " + q.get_str());
  }
}

}  // namespace

std::int64_t Coding::code(const Real& value) const {
  switch (kind_) {
    case Kind::Identity:
    case Kind::Residue: {
      if (!value.is_exact_integer())
        fail(ErrorKind::CodingGap, "code", "value " + value.to_string() + " is not a certified integer");
      Integer v = value.as_rational()->get_num();
      if (kind_ == Kind::Residue) {
        Integer r;
        mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(modulus_));
        return static_cast<std::int64_t>(r.get_si());
      }
      if (!v.fits_slong_p()) fail(ErrorKind::CodingGap, "code", "integer letter out of range");
      return v.get_si();
    }
    case Kind::Cells: {
      for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (at_least(value, cells_[i].lo) && !at_least(value, cells_[i].hi)) return static_cast<std::int64_t>(i);
      }
      fail(ErrorKind::CodingGap, "code", "value " + value.to_string() + " lies in no cell of " + to_string());
    }
  }
  return 0;
}

std::string Coding::name(std::int64_t letter) const {
  if (kind_ == Kind::Identity) return std::to_string(letter);
  return labels_.at(static_cast<std::size_t>(letter));
}

std::string Coding::to_string() const {
  switch (kind_) {
    case Kind::Identity: return "id";
    case Kind::Residue: {
      std::string out = "mod " + std::to_string(modulus_);
      bool default_labels = true;
      for (long r = 0; r < modulus_; ++r) default_labels &= labels_[r] == std::to_string(r);
      if (!default_labels) {
        for (const auto& l : labels_) out += " " + l;
      }
      return out;
    }
    case Kind::Cells: {
      std::string out = "cells";
      for (const auto& c : cells_) out += " [" + c.lo.get_str() + "," + c.hi.get_str() + ")->" + c.label;
      return out;
    }
  }
  return {};
}

Coding parse_coding(std::string_view text) {
  const auto words = [&] {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
  }();
  if (words.empty() || words[0] == "id" || words[0] == "identity") {
    if (words.size() > 1) throw ParseError("gp_core", "parse_coding", 0, {"end of input"}, "trailing tokens");
    return Coding::identity();
  }
  if (words[0] == "mod") {
    if (words.size() < 2) throw ParseError("gp_core", "parse_coding", text.size(), {"uint"}, "missing modulus");
    long m = 0;
    try {
      m = std::stol(words[1]);
    } catch (const std::exception&) {
      throw ParseError("gp_core", "parse_coding", 4, {"uint"}, "bad modulus");
    }
    return Coding::residue(m, std::vector<std::string>(words.begin() + 2, words.end()));
  }
  if (words[0] == "cells") {
    std::vector<Cell> cells;
    for (std::size_t i = 1; i < words.size(); ++i) {
      const std::string& w = words[i];
      const auto comma = w.find(',');
      const auto close = w.find(")->");
      if (w.empty() || w[0] != '[' || comma == std::string::npos || close == std::string::npos || close < comma)
        throw ParseError("gp_core", "parse_coding", text.find(w), {"[lo,hi)->label"}, "bad cell '" + w + "'");
      auto lo = exact::parse_rational(std::string_view(w).substr(1, comma - 1));
      auto hi = exact::parse_rational(std::string_view(w).substr(comma + 1, close - comma - 1));
      if (!lo || !hi)
        throw ParseError("gp_core", "parse_coding", text.find(w), {"rational"}, "bad cell bound in '" + w + "'");
      cells.push_back({*lo, *hi, w.substr(close + 3)});
    }
    return Coding::cells(std::move(cells));
  }
  throw ParseError("gp_core", "parse_coding", 0, {"id", "mod", "cells"}, "unknown coding '" + words[0] + "'");
}

// ---------------------------------------------------------------------------
// Words

IndexSource IndexSource::identity() {
  return {[](long long n) { return Integer(std::to_string(n)); }, "n"};
}

Word generate_word(const BracketExpr& expr, const Coding& coding, const IndexSource& index, long long count,
                   long long start) {
  if (count < 0) fail(ErrorKind::Config, "generate_word", "negative length");
  Word w;
  w.letters.reserve(static_cast<std::size_t>(count));
  Evaluator ev(expr);
  for (long long i = 0; i < count; ++i) {
    const long long n = start + i;
    w.letters.push_back(coding.code(ev(index.map(n))));
  }
  std::set<std::int64_t> seen;
  if (coding.kind() == Coding::Kind::Identity) {
    seen.insert(w.letters.begin(), w.letters.end());
  } else {
    for (std::size_t i = 0; i < coding.labels().size(); ++i) seen.insert(static_cast<std::int64_t>(i));
  }
  w.alphabet.assign(seen.begin(), seen.end());
  for (auto a : w.alphabet) w.names[a] = coding.name(a);
  w.origin = expr.to_string() + " | " + coding.to_string() + " | index " + index.description + " | n in [" +
             std::to_string(start) + "," + std::to_string(start + count) + ")";
  return w;
}

}  // namespace bracketlab::gp
