#pragma once

// Expression language for nonlinearities f(x1, ..., xn, u).
//
//   expr    = term { ("+" | "-") term } ;
//   term    = unary { ("*" | "/") unary } ;
//   unary   = "-" unary | power ;
//   power   = primary [ "^" exponent ] ;
//   exponent= [ "-" ] integer | "(" [ "-" ] integer ")" ;
//   primary = number | name | func "(" expr ")" | "(" expr ")" ;
//
// Names: u, x1..x4 (x and t alias x1), pi, and caller-supplied bindings.
// Functions: sin, cos, exp, abs, sqrt.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "tselliptic/error.hpp"

namespace tselliptic {

enum class NodeKind { constant, variable, neg, sin, cos, exp, abs, sqrt, add, sub, mul, div, pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  double value = 0.0;  // constant
  int index = 0;       // variable: 0 = u, k = x_k; pow: exponent
  NodePtr lhs;
  NodePtr rhs;
};

inline bool structurally_equal(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::constant: return a->value == b->value;
    case NodeKind::variable: return a->index == b->index;
    case NodeKind::pow: return a->index == b->index && structurally_equal(a->lhs, b->lhs);
    default: return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
  }
}

namespace ast {
inline NodePtr constant(double v) { return std::make_shared<const Node>(Node{NodeKind::constant, v, 0, {}, {}}); }
inline NodePtr u() { return std::make_shared<const Node>(Node{NodeKind::variable, 0.0, 0, {}, {}}); }
inline NodePtr x(int k) { return std::make_shared<const Node>(Node{NodeKind::variable, 0.0, k, {}, {}}); }
inline NodePtr unary(NodeKind k, NodePtr a) { return std::make_shared<const Node>(Node{k, 0.0, 0, std::move(a), {}}); }
inline NodePtr binary(NodeKind k, NodePtr a, NodePtr b) {
  return std::make_shared<const Node>(Node{k, 0.0, 0, std::move(a), std::move(b)});
}
inline NodePtr pow(NodePtr base, int e) { return std::make_shared<const Node>(Node{NodeKind::pow, 0.0, e, std::move(base), {}}); }
}  // namespace ast

using Bindings = std::map<std::string, double, std::less<>>;

class Expression {
 public:
  Expression() : root_(ast::constant(0.0)) {}
  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  static Expression parse(std::string_view text, const Bindings& bindings = {});

  const NodePtr& root() const noexcept { return root_; }
  std::string to_string() const;

  /// Largest k with x_k referenced (0 if none).
  int max_variable_index() const { return max_index(root_); }

  /// True when neither u nor any x_k occurs.
  bool is_constant() const { return !has_variable(root_); }

  double eval(std::span<const double> x, double u) const { return eval_node(*root_, x, u); }

  bool operator==(const Expression& o) const { return structurally_equal(root_, o.root_); }

 private:
  static bool has_variable(const NodePtr& n) {
    if (!n) return false;
    return n->kind == NodeKind::variable || has_variable(n->lhs) || has_variable(n->rhs);
  }

  static int max_index(const NodePtr& n) {
    if (!n) return 0;
    if (n->kind == NodeKind::variable) return n->index;
    return std::max(max_index(n->lhs), max_index(n->rhs));
  }

  static double eval_node(const Node& n, std::span<const double> x, double u) {
    switch (n.kind) {
      case NodeKind::constant: return n.value;
      case NodeKind::variable:
        if (n.index == 0) return u;
        if (static_cast<std::size_t>(n.index) > x.size())
          throw EvaluationError("x" + std::to_string(n.index) + " exceeds the domain dimension");
        return x[static_cast<std::size_t>(n.index) - 1];
      case NodeKind::neg: return -eval_node(*n.lhs, x, u);
      case NodeKind::sin: return std::sin(eval_node(*n.lhs, x, u));
      case NodeKind::cos: return std::cos(eval_node(*n.lhs, x, u));
      case NodeKind::exp: return std::exp(eval_node(*n.lhs, x, u));
      case NodeKind::abs: return std::abs(eval_node(*n.lhs, x, u));
      case NodeKind::sqrt: {
        const double v = eval_node(*n.lhs, x, u);
        if (v < 0.0) throw EvaluationError("sqrt of a negative number");
        return std::sqrt(v);
      }
      case NodeKind::add: return eval_node(*n.lhs, x, u) + eval_node(*n.rhs, x, u);
      case NodeKind::sub: return eval_node(*n.lhs, x, u) - eval_node(*n.rhs, x, u);
      case NodeKind::mul: return eval_node(*n.lhs, x, u) * eval_node(*n.rhs, x, u);
      case NodeKind::div: {
        const double d = eval_node(*n.rhs, x, u);
        if (d == 0.0) throw EvaluationError("division by zero");
        return eval_node(*n.lhs, x, u) / d;
      }
      case NodeKind::pow: {
        const double b = eval_node(*n.lhs, x, u);
        if (n.index < 0 && b == 0.0) throw EvaluationError("division by zero");
        double r = 1.0;
        for (int k = 0; k < std::abs(n.index); ++k) r *= b;
        return n.index < 0 ? 1.0 / r : r;
      }
    }
    throw EvaluationError("corrupt expression node");
  }

  NodePtr root_;
};

namespace detail {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view s, const Bindings& b) : s_(s), bindings_(b) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("expected operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = ast::binary(NodeKind::add, lhs, term());
      else if (accept('-')) lhs = ast::binary(NodeKind::sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = ast::binary(NodeKind::mul, lhs, unary());
      else if (accept('/')) lhs = ast::binary(NodeKind::div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      NodePtr a = unary();
      // "-2" is a negative constant, not a negation node.
      if (a->kind == NodeKind::constant && !std::signbit(a->value)) return ast::constant(-a->value);
      return ast::unary(NodeKind::neg, a);
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    const bool paren = accept('(');
    const bool negative = accept('-');
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
    if (start == pos_) {
      if (pos_ < s_.size() && (s_[pos_] == '.' || std::isalpha(static_cast<unsigned char>(s_[pos_]))))
        fail("exponent must be an integer literal");
      fail("expected integer exponent");
    }
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
      fail("exponent must be an integer literal");
    int e = 0;
    const auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, e);
    if (ec != std::errc{} || e > 64) {
      pos_ = start;
      fail("exponent out of range");
    }
    if (paren) expect(')');
    if (peek() == '^') fail("chained exponents are not supported; use parentheses");
    return ast::pow(base, negative ? -e : e);
  }

  NodePtr primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    if (c == '\0') fail("unexpected end of input; expected number, name or '('");
    fail(std::string("unexpected '") + c + "'; expected number, name or '('");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc{}) fail("malformed number");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      pos_ = start;
      fail("malformed number");
    }
    return ast::constant(v);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string_view id = s_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, NodeKind> funcs[] = {
        {"sin", NodeKind::sin}, {"cos", NodeKind::cos}, {"exp", NodeKind::exp},
        {"abs", NodeKind::abs}, {"sqrt", NodeKind::sqrt}};
    for (const auto& [fname, kind] : funcs) {
      if (id == fname) {
        expect('(');
        NodePtr a = expr();
        expect(')');
        return ast::unary(kind, a);
      }
    }
    if (id == "u") return ast::u();
    if (id == "x" || id == "t") return ast::x(1);
    if (id.size() == 2 && id[0] == 'x' && id[1] >= '1' && id[1] <= '4') return ast::x(id[1] - '0');
    if (auto it = bindings_.find(id); it != bindings_.end()) return ast::constant(it->second);
    if (id == "pi") return ast::constant(std::numbers::pi);
    pos_ = start;
    fail("unknown identifier '" + std::string(id) + "'");
  }

  std::string_view s_;
  const Bindings& bindings_;
  std::size_t pos_ = 0;
};

inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::add:
    case NodeKind::sub: return 1;
    case NodeKind::mul:
    case NodeKind::div: return 2;
    case NodeKind::neg: return 3;
    case NodeKind::pow: return 4;
    case NodeKind::constant: return n.value < 0.0 || std::signbit(n.value) ? 3 : 5;
    default: return 5;
  }
}

inline void print(const Node& n, std::string& out);

inline void print_child(const Node& c, int min_prec, std::string& out) {
  if (precedence(c) < min_prec) {
    out += '(';
    print(c, out);
    out += ')';
  } else {
    print(c, out);
  }
}

inline void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::constant: out += format_number(n.value); return;
    case NodeKind::variable: out += n.index == 0 ? std::string("u") : "x" + std::to_string(n.index); return;
    case NodeKind::neg:
      out += '-';
      // Parenthesize constants so the reparse does not fold into a literal.
      if (n.lhs->kind == NodeKind::constant) {
        out += '(';
        print(*n.lhs, out);
        out += ')';
      } else {
        print_child(*n.lhs, 3, out);
      }
      return;
    case NodeKind::sin: out += "sin("; print(*n.lhs, out); out += ')'; return;
    case NodeKind::cos: out += "cos("; print(*n.lhs, out); out += ')'; return;
    case NodeKind::exp: out += "exp("; print(*n.lhs, out); out += ')'; return;
    case NodeKind::abs: out += "abs("; print(*n.lhs, out); out += ')'; return;
    case NodeKind::sqrt: out += "sqrt("; print(*n.lhs, out); out += ')'; return;
    case NodeKind::add:
    case NodeKind::sub:
    case NodeKind::mul:
    case NodeKind::div: {
      const int p = precedence(n);
      const char* op = n.kind == NodeKind::add ? " + " : n.kind == NodeKind::sub ? " - " : n.kind == NodeKind::mul ? "*" : "/";
      print_child(*n.lhs, p, out);
      out += op;
      print_child(*n.rhs, p + 1, out);
      return;
    }
    case NodeKind::pow:
      print_child(*n.lhs, 5, out);
      out += '^';
      out += std::to_string(n.index);
      return;
  }
}

}  // namespace detail

inline Expression Expression::parse(std::string_view text, const Bindings& bindings) {
  return Expression(detail::ExpressionParser(text, bindings).parse());
}

inline std::string Expression::to_string() const {
  std::string out;
  detail::print(*root_, out);
  return out;
}

}  // namespace tselliptic
