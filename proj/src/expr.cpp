#include "gck/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <utility>

namespace gck {
namespace {

using detail::ExprNode;
using detail::NodePtr;

NodePtr make_node(ExprOp op, Complex value, int aux, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->value = value;
  n->aux = aux;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_const(Complex v) { return make_node(ExprOp::kConstant, v, 0, nullptr, nullptr); }

bool is_const(const NodePtr& n) { return n->op == ExprOp::kConstant; }
bool is_const(const NodePtr& n, Complex v) { return is_const(n) && n->value == v; }

// Exact integer power by repeated multiplication; negative exponents via 1/x.
Complex ipow(Complex base, int n) {
  if (n < 0) return Complex{1.0, 0.0} / ipow(base, -n);
  Complex r{1.0, 0.0};
  Complex b = base;
  for (unsigned e = static_cast<unsigned>(n); e != 0; e >>= 1) {
    if (e & 1u) r *= b;
    b *= b;
  }
  return r;
}

NodePtr fold_add(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return make_const(a->value + b->value);
  if (is_const(a, Complex{})) return b;
  if (is_const(b, Complex{})) return a;
  return make_node(ExprOp::kAdd, {}, 0, std::move(a), std::move(b));
}

NodePtr fold_neg(NodePtr a) {
  if (is_const(a)) return make_const(-a->value);
  if (a->op == ExprOp::kNeg) return a->a;
  return make_node(ExprOp::kNeg, {}, 0, std::move(a), nullptr);
}

NodePtr fold_sub(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return make_const(a->value - b->value);
  if (is_const(b, Complex{})) return a;
  if (is_const(a, Complex{})) return fold_neg(std::move(b));
  return make_node(ExprOp::kSub, {}, 0, std::move(a), std::move(b));
}

NodePtr fold_mul(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return make_const(a->value * b->value);
  if (is_const(a, Complex{}) || is_const(b, Complex{})) return make_const({});
  if (is_const(a, Complex{1.0, 0.0})) return b;
  if (is_const(b, Complex{1.0, 0.0})) return a;
  return make_node(ExprOp::kMul, {}, 0, std::move(a), std::move(b));
}

NodePtr fold_div(NodePtr a, NodePtr b) {
  if (is_const(b) && b->value != Complex{}) {
    if (is_const(a)) return make_const(a->value / b->value);
    if (b->value == Complex{1.0, 0.0}) return a;
  }
  if (is_const(a, Complex{}) && !is_const(b, Complex{})) return make_const({});
  return make_node(ExprOp::kDiv, {}, 0, std::move(a), std::move(b));
}

NodePtr fold_pow(NodePtr a, int n) {
  if (n == 0) return make_const(Complex{1.0, 0.0});
  if (n == 1) return a;
  if (is_const(a) && !(a->value == Complex{} && n < 0)) return make_const(ipow(a->value, n));
  return make_node(ExprOp::kPow, {}, n, std::move(a), nullptr);
}

bool log_is_singular(Complex v) { return v.imag() == 0.0 && v.real() <= 0.0; }

NodePtr fold_conj(NodePtr a) {
  if (is_const(a)) return make_const(std::conj(a->value));
  if (a->op == ExprOp::kCoordinate) return a;  // coordinates are real
  if (a->op == ExprOp::kConj) return a->a;
  return make_node(ExprOp::kConj, {}, 0, std::move(a), nullptr);
}

NodePtr fold_fn(ExprOp op, NodePtr a) {
  if (is_const(a)) {
    switch (op) {
      case ExprOp::kSin:
        return make_const(std::sin(a->value));
      case ExprOp::kCos:
        return make_const(std::cos(a->value));
      case ExprOp::kExp:
        return make_const(std::exp(a->value));
      case ExprOp::kLog:
        if (!log_is_singular(a->value)) return make_const(std::log(a->value));
        break;  // keep the node so the domain error surfaces at evaluation
      default:
        break;
    }
  }
  return make_node(op, {}, 0, std::move(a), nullptr);
}

[[noreturn]] void throw_domain(const char* what, const ExprNode* n) {
  throw EvalError(what, detail::print_node(n));
}

Complex eval_node(const ExprNode* n, const ChartPoint& p,
                  std::unordered_map<const ExprNode*, Complex>& memo) {
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  Complex r;
  switch (n->op) {
    case ExprOp::kConstant:
      r = n->value;
      break;
    case ExprOp::kCoordinate:
      r = Complex{p[n->aux], 0.0};
      break;
    case ExprOp::kAdd:
      r = eval_node(n->a.get(), p, memo) + eval_node(n->b.get(), p, memo);
      break;
    case ExprOp::kSub:
      r = eval_node(n->a.get(), p, memo) - eval_node(n->b.get(), p, memo);
      break;
    case ExprOp::kMul:
      r = eval_node(n->a.get(), p, memo) * eval_node(n->b.get(), p, memo);
      break;
    case ExprOp::kDiv: {
      Complex num = eval_node(n->a.get(), p, memo);
      Complex den = eval_node(n->b.get(), p, memo);
      if (den == Complex{}) throw_domain("division by zero", n->b.get());
      r = num / den;
      break;
    }
    case ExprOp::kPow: {
      Complex base = eval_node(n->a.get(), p, memo);
      if (base == Complex{} && n->aux < 0) throw_domain("division by zero", n);
      r = ipow(base, n->aux);
      break;
    }
    case ExprOp::kNeg:
      r = -eval_node(n->a.get(), p, memo);
      break;
    case ExprOp::kConj:
      r = std::conj(eval_node(n->a.get(), p, memo));
      break;
    case ExprOp::kSin:
      r = std::sin(eval_node(n->a.get(), p, memo));
      break;
    case ExprOp::kCos:
      r = std::cos(eval_node(n->a.get(), p, memo));
      break;
    case ExprOp::kExp:
      r = std::exp(eval_node(n->a.get(), p, memo));
      break;
    case ExprOp::kLog: {
      Complex v = eval_node(n->a.get(), p, memo);
      if (log_is_singular(v)) throw_domain("log of nonpositive real", n->a.get());
      r = std::log(v);
      break;
    }
  }
  if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) throw_domain("non-finite value", n);
  memo.emplace(n, r);
  return r;
}

Expr wrap(NodePtr n) { return Expr(std::move(n)); }

Expr diff_node(const ExprNode* n, int axis, std::unordered_map<const ExprNode*, Expr>& memo) {
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  Expr a = n->a ? wrap(n->a) : Expr{};
  Expr b = n->b ? wrap(n->b) : Expr{};
  auto da = [&] { return diff_node(n->a.get(), axis, memo); };
  auto db = [&] { return diff_node(n->b.get(), axis, memo); };
  Expr r;
  switch (n->op) {
    case ExprOp::kConstant:
      r = Expr{};
      break;
    case ExprOp::kCoordinate:
      r = Expr(n->aux == axis ? 1.0 : 0.0);
      break;
    case ExprOp::kAdd:
      r = da() + db();
      break;
    case ExprOp::kSub:
      r = da() - db();
      break;
    case ExprOp::kMul:
      r = da() * b + a * db();
      break;
    case ExprOp::kDiv:
      r = (da() * b - a * db()) / (b * b);
      break;
    case ExprOp::kPow:
      r = Expr(n->aux) * pow(a, n->aux - 1) * da();
      break;
    case ExprOp::kNeg:
      r = -da();
      break;
    case ExprOp::kConj:
      // derivative along a real coordinate commutes with conjugation
      r = conj(da());
      break;
    case ExprOp::kSin:
      r = cos(a) * da();
      break;
    case ExprOp::kCos:
      r = -sin(a) * da();
      break;
    case ExprOp::kExp:
      r = exp(a) * da();
      break;
    case ExprOp::kLog:
      r = da() / a;
      break;
  }
  memo.emplace(n, r);
  return r;
}

// --- printing ---------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Precedence: add/sub 1, mul/div 2, unary 3, pow 4, atom 5.
int const_prec(Complex v) {
  if (v.imag() == 0.0) return v.real() < 0.0 ? 3 : 5;
  if (v.real() == 0.0 && v.imag() == 1.0) return 5;
  return 5;  // printed with its own parentheses
}

std::string format_const(Complex v) {
  if (v.imag() == 0.0) return format_double(v.real());
  if (v.real() == 0.0) {
    if (v.imag() == 1.0) return "i";
    if (v.imag() == -1.0) return "(-i)";
    return "(" + format_double(v.imag()) + "*i)";
  }
  std::string im = v.imag() < 0.0 ? "-" + format_double(-v.imag()) : "+" + format_double(v.imag());
  return "(" + format_double(v.real()) + im + "*i)";
}

void print(const ExprNode* n, int parent_prec, std::string& out) {
  auto wrap_if = [&](int prec, auto&& body) {
    bool parens = prec < parent_prec;
    if (parens) out += '(';
    body();
    if (parens) out += ')';
  };
  switch (n->op) {
    case ExprOp::kConstant:
      wrap_if(const_prec(n->value), [&] { out += format_const(n->value); });
      break;
    case ExprOp::kCoordinate:
      out += 'x';
      out += static_cast<char>('0' + n->aux);
      break;
    case ExprOp::kAdd:
      wrap_if(1, [&] {
        print(n->a.get(), 1, out);
        out += " + ";
        print(n->b.get(), 2, out);
      });
      break;
    case ExprOp::kSub:
      wrap_if(1, [&] {
        print(n->a.get(), 1, out);
        out += " - ";
        print(n->b.get(), 2, out);
      });
      break;
    case ExprOp::kMul:
      wrap_if(2, [&] {
        print(n->a.get(), 2, out);
        out += '*';
        print(n->b.get(), 3, out);
      });
      break;
    case ExprOp::kDiv:
      wrap_if(2, [&] {
        print(n->a.get(), 2, out);
        out += '/';
        print(n->b.get(), 3, out);
      });
      break;
    case ExprOp::kPow:
      wrap_if(4, [&] {
        print(n->a.get(), 5, out);
        out += '^';
        if (n->aux < 0) {
          out += "(" + std::to_string(n->aux) + ")";
        } else {
          out += std::to_string(n->aux);
        }
      });
      break;
    case ExprOp::kNeg:
      wrap_if(3, [&] {
        out += '-';
        print(n->a.get(), 3, out);
      });
      break;
    case ExprOp::kConj:
    case ExprOp::kSin:
    case ExprOp::kCos:
    case ExprOp::kExp:
    case ExprOp::kLog: {
      const char* name = n->op == ExprOp::kConj  ? "conj"
                         : n->op == ExprOp::kSin ? "sin"
                         : n->op == ExprOp::kCos ? "cos"
                         : n->op == ExprOp::kExp ? "exp"
                                                 : "log";
      out += name;
      out += '(';
      print(n->a.get(), 0, out);
      out += ')';
      break;
    }
  }
}

// --- parsing ----------------------------------------------------------

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos); }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  Expr parse() {
    Expr e = parse_sum();
    skip_ws();
    if (pos != text.size()) fail(std::string("unexpected '") + text[pos] + "'");
    return e;
  }

  Expr parse_sum() {
    Expr e = parse_term();
    for (;;) {
      if (eat('+')) {
        e = e + parse_term();
      } else if (eat('-')) {
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    for (;;) {
      if (eat('*')) {
        e = e * parse_unary();
      } else if (eat('/')) {
        e = e / parse_unary();
      } else {
        return e;
      }
    }
  }

  Expr parse_unary() {
    if (eat('-')) return -parse_unary();
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!eat('^')) return base;
    bool parens = eat('(');
    skip_ws();
    bool negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
      negative = text[pos] == '-';
      ++pos;
    }
    skip_ws();
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      fail("integer exponent expected");
    long n = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      n = n * 10 + (text[pos] - '0');
      if (n > 1000) fail("exponent out of range");
      ++pos;
    }
    if (pos < text.size() && (text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E'))
      fail("integer exponent expected");
    if (parens && !eat(')')) fail("')' expected after exponent");
    return pow(base, static_cast<int>(negative ? -n : n));
  }

  Expr parse_primary() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of expression");
    char c = text[pos];
    if (c == '(') {
      ++pos;
      Expr e = parse_sum();
      if (!eat(')')) fail("')' expected");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  Expr parse_number() {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = mark;  // the 'e' belongs to something else
      }
    }
    std::string tok(text.substr(start, pos - start));
    return Expr(std::strtod(tok.c_str(), nullptr));
  }

  Expr parse_identifier() {
    std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])))) ++pos;
    std::string_view name = text.substr(start, pos - start);
    if (name == "i") return Expr::i();
    if (name == "pi") return Expr::pi();
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '0' && name[1] <= '3')
      return Expr::coordinate(name[1] - '0');
    auto func = [&](const char* fn) { return name == fn; };
    if (func("sin") || func("cos") || func("exp") || func("log") || func("conj")) {
      if (!eat('(')) fail("'(' expected after function name");
      Expr arg = parse_sum();
      if (!eat(')')) fail("')' expected");
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      if (name == "exp") return exp(arg);
      if (name == "log") return log(arg);
      return conj(arg);
    }
    pos = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }
};

}  // namespace

namespace detail {
std::string print_node(const ExprNode* n) {
  std::string out;
  print(n, 0, out);
  return out;
}
}  // namespace detail

ParseError::ParseError(const std::string& message, std::size_t position)
    : ExprError(message + " at position " + std::to_string(position)), position_(position) {}

EvalError::EvalError(const std::string& message, std::string subterm)
    : ExprError(message + " in '" + subterm + "'"), subterm_(std::move(subterm)) {}

Expr::Expr(Complex value) : node_(make_const(value)) {}

Expr Expr::coordinate(int axis) {
  if (axis < 0 || axis > 3) throw ExprError("coordinate axis out of range");
  return wrap(make_node(ExprOp::kCoordinate, {}, axis, nullptr, nullptr));
}

Expr Expr::i() { return Expr(Complex{0.0, 1.0}); }
Expr Expr::pi() { return Expr(std::numbers::pi); }

Complex Expr::eval(const ChartPoint& p) const {
  std::unordered_map<const detail::ExprNode*, Complex> memo;
  return eval_node(node_.get(), p, memo);
}

Expr Expr::derivative(int axis) const {
  if (axis < 0 || axis > 3) throw ExprError("coordinate axis out of range");
  std::unordered_map<const detail::ExprNode*, Expr> memo;
  return diff_node(node_.get(), axis, memo);
}

std::string Expr::str() const { return detail::print_node(node_.get()); }

Expr operator+(const Expr& a, const Expr& b) { return wrap(fold_add(a.share(), b.share())); }
Expr operator-(const Expr& a, const Expr& b) { return wrap(fold_sub(a.share(), b.share())); }
Expr operator*(const Expr& a, const Expr& b) { return wrap(fold_mul(a.share(), b.share())); }
Expr operator/(const Expr& a, const Expr& b) { return wrap(fold_div(a.share(), b.share())); }
Expr operator-(const Expr& a) { return wrap(fold_neg(a.share())); }
Expr operator+(const Expr& a) { return a; }

Expr pow(const Expr& base, int exponent) { return wrap(fold_pow(base.share(), exponent)); }
Expr sin(const Expr& e) { return wrap(fold_fn(ExprOp::kSin, e.share())); }
Expr cos(const Expr& e) { return wrap(fold_fn(ExprOp::kCos, e.share())); }
Expr exp(const Expr& e) { return wrap(fold_fn(ExprOp::kExp, e.share())); }
Expr log(const Expr& e) { return wrap(fold_fn(ExprOp::kLog, e.share())); }
Expr conj(const Expr& e) { return wrap(fold_conj(e.share())); }

Expr real(const Expr& e) { return (e + conj(e)) * Expr(0.5); }
Expr imag(const Expr& e) { return (e - conj(e)) * Expr(Complex{0.0, -0.5}); }
Expr abs2(const Expr& e) { return e * conj(e); }

Expr parse_expr(std::string_view text) {
  Parser p{text};
  return p.parse();
}

Complex eval_expr(const Expr& e, const ChartPoint& p) { return e.eval(p); }
Expr diff_expr(const Expr& e, int axis) { return e.derivative(axis); }
std::string to_string(const Expr& e) { return e.str(); }

// --- tape -------------------------------------------------------------

Tape::Tape(std::span<const Expr> exprs) {
  for (const Expr& e : exprs) add(e);
}

int Tape::add(const Expr& e) {
  int slot = visit(e.node());
  outputs_.push_back(slot);
  return static_cast<int>(outputs_.size()) - 1;
}

int Tape::visit(const detail::ExprNode* root) {
  if (auto it = slot_.find(root); it != slot_.end()) return it->second;
  std::vector<std::pair<const detail::ExprNode*, bool>> stack;
  stack.emplace_back(root, false);
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (slot_.count(n)) continue;
    if (!expanded) {
      stack.emplace_back(n, true);
      if (n->a && !slot_.count(n->a.get())) stack.emplace_back(n->a.get(), false);
      if (n->b && !slot_.count(n->b.get())) stack.emplace_back(n->b.get(), false);
    } else {
      Instr ins{n->op, n->aux, n->a ? slot_.at(n->a.get()) : -1, n->b ? slot_.at(n->b.get()) : -1,
                n->value, n};
      slot_.emplace(n, static_cast<int>(code_.size()));
      code_.push_back(ins);
    }
  }
  return slot_.at(root);
}

void Tape::eval_into(const ChartPoint& p, std::span<Complex> out) const {
  std::vector<Complex> v(code_.size());
  for (std::size_t s = 0; s < code_.size(); ++s) {
    const Instr& ins = code_[s];
    Complex r;
    switch (ins.op) {
      case ExprOp::kConstant:
        r = ins.value;
        break;
      case ExprOp::kCoordinate:
        r = Complex{p[ins.aux], 0.0};
        break;
      case ExprOp::kAdd:
        r = v[ins.a] + v[ins.b];
        break;
      case ExprOp::kSub:
        r = v[ins.a] - v[ins.b];
        break;
      case ExprOp::kMul:
        r = v[ins.a] * v[ins.b];
        break;
      case ExprOp::kDiv:
        if (v[ins.b] == Complex{}) throw_domain("division by zero", ins.src->b.get());
        r = v[ins.a] / v[ins.b];
        break;
      case ExprOp::kPow:
        if (v[ins.a] == Complex{} && ins.aux < 0) throw_domain("division by zero", ins.src);
        r = ipow(v[ins.a], ins.aux);
        break;
      case ExprOp::kNeg:
        r = -v[ins.a];
        break;
      case ExprOp::kConj:
        r = std::conj(v[ins.a]);
        break;
      case ExprOp::kSin:
        r = std::sin(v[ins.a]);
        break;
      case ExprOp::kCos:
        r = std::cos(v[ins.a]);
        break;
      case ExprOp::kExp:
        r = std::exp(v[ins.a]);
        break;
      case ExprOp::kLog:
        if (log_is_singular(v[ins.a])) throw_domain("log of nonpositive real", ins.src->a.get());
        r = std::log(v[ins.a]);
        break;
    }
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
      throw_domain("non-finite value", ins.src);
    v[s] = r;
  }
  for (std::size_t k = 0; k < outputs_.size() && k < out.size(); ++k) out[k] = v[outputs_[k]];
}

std::vector<Complex> Tape::eval(const ChartPoint& p) const {
  std::vector<Complex> out(outputs_.size());
  eval_into(p, out);
  return out;
}

}  // namespace gck
