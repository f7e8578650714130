// Generalised polynomials in one integer variable n: parsing, certified
// evaluation and bracket-word generation under letter-to-letter codings.
//
// Grammar (whitespace-insensitive, left-associative):
//   expr   := term (("+" | "-") term)*
//   term   := factor ("*" factor | "/" uint)*
//   factor := atom ("^" uint)?
//   atom   := number | "sqrt(" uint ")" | "pi" | "e" | "n"
//           | "floor(" expr ")" | "frac(" expr ")" | "(" expr ")"
//   number := "-"? uint ("/" uint)?
// "a - b" is stored as add(a, mul(-1, b)); "x / k" as mul(x, 1/k).
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bracketlab/exactreal.hpp"

namespace bracketlab::gp {

using exact::ConstantTag;
using exact::Integer;
using exact::Rational;
using exact::Real;

enum class NodeKind { Constant, VarN, Add, Mul, IntPow, Floor, Frac };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Constant;
  ConstantTag constant;
  std::vector<NodePtr> children;
  unsigned exponent = 0;
};

class BracketExpr {
 public:
  BracketExpr();
  explicit BracketExpr(NodePtr root);

  static BracketExpr constant(const ConstantTag& c);
  static BracketExpr var_n();
  static BracketExpr add(std::vector<BracketExpr> terms);
  static BracketExpr mul(std::vector<BracketExpr> factors);
  static BracketExpr int_pow(const BracketExpr& base, unsigned exponent);
  static BracketExpr floor(const BracketExpr& child);
  static BracketExpr frac(const BracketExpr& child);

  const Node& root() const noexcept { return *root_; }
  const NodePtr& root_ptr() const noexcept { return root_; }
  /// Canonical text; parse_gp(to_string()) reproduces the tree.
  std::string to_string() const;
  bool all_rational() const;
  bool has_var() const;

  friend bool operator==(const BracketExpr& a, const BracketExpr& b);

 private:
  NodePtr root_;
};

BracketExpr parse_gp(std::string_view text);

/// Evaluates one expression at many n. Shared subtrees (pointer-identical
/// after parsing) are evaluated once per n.
class Evaluator {
 public:
  explicit Evaluator(const BracketExpr& expr);
  Real operator()(const Integer& n);
  Real operator()(long long n) { return (*this)(Integer(std::to_string(n))); }

 private:
  struct Step {
    NodeKind kind;
    std::vector<int> args;
    unsigned exponent = 0;
    Real constant;
    std::string text;
  };
  std::vector<Step> program_;
  std::vector<Real> values_;
  bool has_var_ = false;
  bool constant_cached_ = false;
};

Real eval_gp(const BracketExpr& expr, const Integer& n);
inline Real eval_gp(const BracketExpr& expr, long long n) { return eval_gp(expr, Integer(std::to_string(n))); }

/// floor(alpha*(n+1) + beta) - floor(alpha*n + beta). alpha and beta must be constant.
BracketExpr sturmian_expr(const BracketExpr& alpha, const BracketExpr& beta);

struct Cell {
  Rational lo;
  Rational hi;
  std::string label;
};

class Coding {
 public:
  enum class Kind { Identity, Residue, Cells };

  static Coding identity();
  /// Labels default to "0".."m-1".
  static Coding residue(long modulus, std::vector<std::string> labels = {});
  /// Cells must be pairwise disjoint, closed-open, and sorted by lower end.
  static Coding cells(std::vector<Cell> cells);

  Kind kind() const noexcept { return kind_; }
  long modulus() const noexcept { return modulus_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<Cell>& cell_list() const noexcept { return cells_; }

  /// Letter index for a value. Throws CodingGap or FloorUndecidable.
  std::int64_t code(const Real& value) const;
  std::string name(std::int64_t letter) const;
  std::string to_string() const;

 private:
  Kind kind_ = Kind::Identity;
  long modulus_ = 0;
  std::vector<std::string> labels_;
  std::vector<Cell> cells_;
};

/// "id", "mod <m> [label...]" or "cells [lo,hi)->label ...".
Coding parse_coding(std::string_view text);

struct Word {
  std::vector<std::int64_t> letters;
  std::vector<std::int64_t> alphabet;
  std::map<std::int64_t, std::string> names;
  std::string origin;

  std::size_t size() const noexcept { return letters.size(); }
};

/// Maps the position n to the argument at which the expression is evaluated.
struct IndexSource {
  std::function<Integer(long long)> map;
  std::string description = "n";

  static IndexSource identity();
};

Word generate_word(const BracketExpr& expr, const Coding& coding, const IndexSource& index, long long count,
                   long long start = 0);

}  // namespace bracketlab::gp
