#ifndef STABKIT_EXPR_HPP
#define STABKIT_EXPR_HPP

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "stabkit/core.hpp"

// A small infix expression language used by config files for fields and
// comparison functions:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: exp log sqrt abs pos sin cos tanh max min pow. `pos(u)` is the
// positive part max(u, 0). Gradients come from forward-mode dual numbers.

namespace stabkit::expr {

class ExpressionError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Value plus gradient with respect to the expression's variables.
struct Dual {
  double v = 0.0;
  Vector g;
};

namespace detail {

enum class Op { number, variable, neg, add, sub, mul, div, pow, call };

struct Node {
  Op op = Op::number;
  double value = 0.0;
  std::size_t index = 0;
  std::string fn;
  std::vector<std::unique_ptr<Node>> kids;
};

inline bool known_function(const std::string& f, std::size_t arity) {
  static const std::map<std::string, std::size_t> table{
      {"exp", 1}, {"log", 1}, {"sqrt", 1}, {"abs", 1},  {"pos", 1}, {"sin", 1},
      {"cos", 1}, {"tanh", 1}, {"max", 2}, {"min", 2}, {"pow", 2}};
  auto it = table.find(f);
  return it != table.end() && it->second == arity;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars,
         const std::map<std::string, double>& constants)
      : s_(text), vars_(vars), consts_(constants) {}

  std::unique_ptr<Node> parse() {
    auto n = expression();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ExpressionError("expression '" + s_ + "': " + msg + " at position " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static std::unique_ptr<Node> make(Op op, std::unique_ptr<Node> a, std::unique_ptr<Node> b = nullptr) {
    auto n = std::make_unique<Node>();
    n->op = op;
    n->kids.push_back(std::move(a));
    if (b) n->kids.push_back(std::move(b));
    return n;
  }

  std::unique_ptr<Node> expression() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Op::add, std::move(lhs), term());
      else if (accept('-')) lhs = make(Op::sub, std::move(lhs), term());
      else return lhs;
    }
  }

  std::unique_ptr<Node> term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Op::mul, std::move(lhs), unary());
      else if (accept('/')) lhs = make(Op::div, std::move(lhs), unary());
      else return lhs;
    }
  }

  std::unique_ptr<Node> unary() {
    if (accept('-')) return make(Op::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  std::unique_ptr<Node> power() {
    auto base = primary();
    if (accept('^')) return make(Op::pow, std::move(base), unary());
    return base;
  }

  std::unique_ptr<Node> primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto n = expression();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_unique<Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (accept('(')) {
        auto n = std::make_unique<Node>();
        n->op = Op::call;
        n->fn = name;
        n->kids.push_back(expression());
        while (accept(',')) n->kids.push_back(expression());
        if (!accept(')')) fail("expected ')' after arguments of " + name);
        if (!known_function(name, n->kids.size()))
          fail("unknown function " + name + "/" + std::to_string(n->kids.size()));
        return n;
      }
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) {
          auto n = std::make_unique<Node>();
          n->op = Op::variable;
          n->index = i;
          return n;
        }
      auto it = consts_.find(name);
      double v = 0.0;
      if (it != consts_.end()) v = it->second;
      else if (name == "pi") v = std::numbers::pi;
      else if (name == "e") v = std::numbers::e;
      else fail("unknown name '" + name + "'");
      auto n = std::make_unique<Node>();
      n->value = v;
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string s_;
  const std::vector<std::string>& vars_;
  const std::map<std::string, double>& consts_;
  std::size_t pos_ = 0;
};

// Chain rule helper: result value v with derivative dv/du = slope.
inline Dual chain(const Dual& u, double v, double slope) {
  Dual r{v, u.g};
  for (double& gi : r.g) gi *= slope;
  return r;
}

inline Dual combine(double v, const Dual& a, double da, const Dual& b, double db) {
  Dual r{v, Vector(a.g.size())};
  for (std::size_t i = 0; i < r.g.size(); ++i) r.g[i] = da * a.g[i] + db * b.g[i];
  return r;
}

inline bool is_constant(const Dual& u) {
  for (double gi : u.g)
    if (gi != 0.0) return false;
  return true;
}

inline Dual dual_pow(const Dual& a, const Dual& b) {
  if (is_constant(b)) {
    const double p = b.v;
    const double v = std::pow(a.v, p);
    const double slope = p == 0.0 ? 0.0 : p * std::pow(a.v, p - 1.0);
    return chain(a, v, slope);
  }
  const double v = std::pow(a.v, b.v);
  const double da = b.v * std::pow(a.v, b.v - 1.0);
  const double db = a.v > 0.0 ? v * std::log(a.v) : 0.0;
  return combine(v, a, da, b, db);
}

inline double eval(const Node& n, const Vector& x) {
  switch (n.op) {
    case Op::number: return n.value;
    case Op::variable: return x[n.index];
    case Op::neg: return -eval(*n.kids[0], x);
    case Op::add: return eval(*n.kids[0], x) + eval(*n.kids[1], x);
    case Op::sub: return eval(*n.kids[0], x) - eval(*n.kids[1], x);
    case Op::mul: return eval(*n.kids[0], x) * eval(*n.kids[1], x);
    case Op::div: return eval(*n.kids[0], x) / eval(*n.kids[1], x);
    case Op::pow: return std::pow(eval(*n.kids[0], x), eval(*n.kids[1], x));
    case Op::call: break;
  }
  const double a = eval(*n.kids[0], x);
  const std::string& f = n.fn;
  if (f == "exp") return std::exp(a);
  if (f == "log") return std::log(a);
  if (f == "sqrt") return std::sqrt(a);
  if (f == "abs") return std::abs(a);
  if (f == "pos") return positive_part(a);
  if (f == "sin") return std::sin(a);
  if (f == "cos") return std::cos(a);
  if (f == "tanh") return std::tanh(a);
  const double b = eval(*n.kids[1], x);
  if (f == "max") return std::max(a, b);
  if (f == "min") return std::min(a, b);
  return std::pow(a, b);
}

inline Dual eval_dual(const Node& n, const Vector& x) {
  const std::size_t dim = x.size();
  switch (n.op) {
    case Op::number: return {n.value, Vector(dim, 0.0)};
    case Op::variable: {
      Dual r{x[n.index], Vector(dim, 0.0)};
      r.g[n.index] = 1.0;
      return r;
    }
    case Op::neg: {
      const Dual a = eval_dual(*n.kids[0], x);
      return chain(a, -a.v, -1.0);
    }
    case Op::add: {
      const Dual a = eval_dual(*n.kids[0], x), b = eval_dual(*n.kids[1], x);
      return combine(a.v + b.v, a, 1.0, b, 1.0);
    }
    case Op::sub: {
      const Dual a = eval_dual(*n.kids[0], x), b = eval_dual(*n.kids[1], x);
      return combine(a.v - b.v, a, 1.0, b, -1.0);
    }
    case Op::mul: {
      const Dual a = eval_dual(*n.kids[0], x), b = eval_dual(*n.kids[1], x);
      return combine(a.v * b.v, a, b.v, b, a.v);
    }
    case Op::div: {
      const Dual a = eval_dual(*n.kids[0], x), b = eval_dual(*n.kids[1], x);
      return combine(a.v / b.v, a, 1.0 / b.v, b, -a.v / (b.v * b.v));
    }
    case Op::pow: return dual_pow(eval_dual(*n.kids[0], x), eval_dual(*n.kids[1], x));
    case Op::call: break;
  }
  const Dual a = eval_dual(*n.kids[0], x);
  const std::string& f = n.fn;
  if (f == "exp") {
    const double v = std::exp(a.v);
    return chain(a, v, v);
  }
  if (f == "log") return chain(a, std::log(a.v), 1.0 / a.v);
  if (f == "sqrt") {
    const double v = std::sqrt(a.v);
    return chain(a, v, v > 0.0 ? 0.5 / v : 0.0);
  }
  if (f == "abs") return chain(a, std::abs(a.v), a.v > 0.0 ? 1.0 : (a.v < 0.0 ? -1.0 : 0.0));
  if (f == "pos") return chain(a, positive_part(a.v), a.v > 0.0 ? 1.0 : 0.0);
  if (f == "sin") return chain(a, std::sin(a.v), std::cos(a.v));
  if (f == "cos") return chain(a, std::cos(a.v), -std::sin(a.v));
  if (f == "tanh") {
    const double v = std::tanh(a.v);
    return chain(a, v, 1.0 - v * v);
  }
  const Dual b = eval_dual(*n.kids[1], x);
  if (f == "max") return a.v >= b.v ? a : b;
  if (f == "min") return a.v <= b.v ? a : b;
  return dual_pow(a, b);
}

}  // namespace detail

/// Parsed expression over a fixed list of variable names. Cheap to copy.
class Expression {
 public:
  Expression() = default;

  static Expression parse(const std::string& text, std::vector<std::string> variables,
                          const std::map<std::string, double>& constants = {}) {
    Expression e;
    e.text_ = text;
    e.vars_ = std::move(variables);
    detail::Parser p(text, e.vars_, constants);
    e.root_ = std::shared_ptr<const detail::Node>(p.parse().release());
    return e;
  }

  const std::string& text() const noexcept { return text_; }
  const std::vector<std::string>& variables() const noexcept { return vars_; }
  bool empty() const noexcept { return !root_; }

  double operator()(const Vector& x) const {
    check(x);
    return detail::eval(*root_, x);
  }

  double operator()(double s) const { return (*this)(Vector{s}); }

  Dual value_and_gradient(const Vector& x) const {
    check(x);
    return detail::eval_dual(*root_, x);
  }

 private:
  void check(const Vector& x) const {
    if (!root_) throw ExpressionError("evaluating an empty expression");
    require_dim(x, vars_.size(), "expression arguments");
  }

  std::string text_;
  std::vector<std::string> vars_;
  std::shared_ptr<const detail::Node> root_;
};

/// Variable names x1..xn.
inline std::vector<std::string> state_variables(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

}  // namespace stabkit::expr

#endif  // STABKIT_EXPR_HPP
