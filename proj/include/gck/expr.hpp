#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gck {

using Complex = std::complex<double>;

// A point of the coordinate chart, (x0, x1, x2, x3).
using ChartPoint = Eigen::Vector4d;

enum class ExprOp : std::uint8_t {
  kConstant,
  kCoordinate,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,  // integer exponent in aux
  kNeg,
  kConj,
  kSin,
  kCos,
  kExp,
  kLog,
};

namespace detail {
struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprOp op;
  Complex value{};  // kConstant
  int aux = 0;      // kCoordinate: axis, kPow: exponent
  NodePtr a;
  NodePtr b;
};

std::string print_node(const ExprNode* n);
}  // namespace detail

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ExprError {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Domain error during evaluation; carries the offending subterm.
class EvalError : public ExprError {
 public:
  EvalError(const std::string& message, std::string subterm);
  const std::string& subterm() const { return subterm_; }

 private:
  std::string subterm_;
};

// Immutable symbolic complex-valued function of the chart coordinates.
// Construction folds constants and the 0/1 identities; no further
// canonicalization happens, equality of expressions is a question for
// evaluation at sample points.
class Expr {
 public:
  Expr() : Expr(Complex{0.0, 0.0}) {}
  Expr(double value) : Expr(Complex{value, 0.0}) {}
  Expr(int value) : Expr(Complex{static_cast<double>(value), 0.0}) {}
  Expr(Complex value);

  static Expr coordinate(int axis);  // 0..3
  static Expr i();                   // the imaginary unit
  static Expr pi();

  bool is_constant() const { return node_->op == ExprOp::kConstant; }
  bool is_zero() const { return is_constant() && node_->value == Complex{}; }
  Complex constant_value() const { return node_->value; }

  Complex eval(const ChartPoint& p) const;
  Expr derivative(int axis) const;
  std::string str() const;

  const detail::ExprNode* node() const { return node_.get(); }
  const detail::NodePtr& share() const { return node_; }

  explicit Expr(detail::NodePtr node) : node_(std::move(node)) {}

 private:
  detail::NodePtr node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator+(const Expr& a);
inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }
inline Expr& operator/=(Expr& a, const Expr& b) { return a = a / b; }

// Structural equality only: equal constants or the identical node.
// Expression equality in general is a question for sample-point
// evaluation, not for operator==.
inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return true;
  return a.is_constant() && b.is_constant() && a.constant_value() == b.constant_value();
}
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr conj(const Expr& e);

// Real and imaginary parts as expressions, (e + conj e)/2 and (e - conj e)/2i.
Expr real(const Expr& e);
Expr imag(const Expr& e);
Expr abs2(const Expr& e);

// Grammar: infix with +, -, *, /, ^ (integer exponent), unary minus,
// functions sin, cos, exp, log, conj, identifiers x0..x3, literals
// `i` and `pi`, parentheses. Whitespace is insignificant.
Expr parse_expr(std::string_view text);

Complex eval_expr(const Expr& e, const ChartPoint& p);
Expr diff_expr(const Expr& e, int axis);
std::string to_string(const Expr& e);

// Straight-line form of a set of expressions sharing subterms; cheap to
// evaluate repeatedly over many points. Immutable once built.
class Tape {
 public:
  Tape() = default;
  explicit Tape(std::span<const Expr> exprs);

  int add(const Expr& e);  // returns the output slot
  std::size_t output_count() const { return outputs_.size(); }

  void eval_into(const ChartPoint& p, std::span<Complex> out) const;
  std::vector<Complex> eval(const ChartPoint& p) const;

 private:
  struct Instr {
    ExprOp op;
    int aux;
    int a;
    int b;
    Complex value;
    const detail::ExprNode* src;
  };

  int visit(const detail::ExprNode* n);

  std::vector<Instr> code_;
  std::vector<int> outputs_;
  std::unordered_map<const detail::ExprNode*, int> slot_;
};

}  // namespace gck
