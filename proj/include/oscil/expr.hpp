#pragma once

// Coefficient expressions: a small Pratt parser and tree evaluator for
// scalar functions of x.
//
// Grammar (lowest to highest binding):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?          right-associative
//   atom    := number | 'x' | func '(' sum ')' | '(' sum ')'
// so "-x^2" is -(x^2) and "2^3^2" is 2^(3^2). There is no implicit
// multiplication.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "oscil/errors.hpp"

namespace oscil::expr {

enum class BinaryOp : char { add = '+', sub = '-', mul = '*', div = '/', pow = '^' };

enum class Function { sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt, abs };

inline constexpr std::array<std::pair<std::string_view, Function>, 10> kFunctions{{
    {"sin", Function::sin},
    {"cos", Function::cos},
    {"tan", Function::tan},
    {"sinh", Function::sinh},
    {"cosh", Function::cosh},
    {"tanh", Function::tanh},
    {"exp", Function::exp},
    {"log", Function::log},
    {"sqrt", Function::sqrt},
    {"abs", Function::abs},
}};

inline std::string_view function_name(Function fn) {
  for (const auto& [name, f] : kFunctions)
    if (f == fn) return name;
  return "?";
}

inline std::optional<Function> lookup_function(std::string_view name) {
  for (const auto& [n, f] : kFunctions)
    if (n == name) return f;
  return std::nullopt;
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Constant {
  double value;
};
struct Variable {};
struct Negate {
  NodePtr operand;
};
struct Binary {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};
struct Call {
  Function fn;
  NodePtr arg;
};

struct Node {
  std::variant<Constant, Variable, Negate, Binary, Call> kind;
};

inline NodePtr make_constant(double v) { return std::make_shared<const Node>(Node{Constant{v}}); }
inline NodePtr make_variable() { return std::make_shared<const Node>(Node{Variable{}}); }
inline NodePtr make_negate(NodePtr e) { return std::make_shared<const Node>(Node{Negate{std::move(e)}}); }
inline NodePtr make_binary(BinaryOp op, NodePtr l, NodePtr r) {
  return std::make_shared<const Node>(Node{Binary{op, std::move(l), std::move(r)}});
}
inline NodePtr make_call(Function fn, NodePtr arg) {
  return std::make_shared<const Node>(Node{Call{fn, std::move(arg)}});
}

/// Structural equality. Constants compare by exact value.
inline bool same_tree(const Node& a, const Node& b) {
  if (a.kind.index() != b.kind.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.kind);
        if constexpr (std::is_same_v<T, Constant>) {
          return lhs.value == rhs.value;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return true;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return same_tree(*lhs.operand, *rhs.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return lhs.op == rhs.op && same_tree(*lhs.lhs, *rhs.lhs) && same_tree(*lhs.rhs, *rhs.rhs);
        } else {
          return lhs.fn == rhs.fn && same_tree(*lhs.arg, *rhs.arg);
        }
      },
      a.kind);
}

/// Fully parenthesized text that parses back to the same tree.
inline std::string serialize(const Node& node) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Constant>) {
          if (std::signbit(n.value)) return "(-" + format_real(-n.value) + ")";
          return format_real(n.value);
        } else if constexpr (std::is_same_v<T, Variable>) {
          return "x";
        } else if constexpr (std::is_same_v<T, Negate>) {
          return "(-" + serialize(*n.operand) + ")";
        } else if constexpr (std::is_same_v<T, Binary>) {
          return "(" + serialize(*n.lhs) + static_cast<char>(n.op) + serialize(*n.rhs) + ")";
        } else {
          return std::string(function_name(n.fn)) + "(" + serialize(*n.arg) + ")";
        }
      },
      node.kind);
}

namespace detail {

inline double checked(double v, double x, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite result of ") + what, x);
  return v;
}

inline double apply(Function fn, double v, double x) {
  switch (fn) {
    case Function::sin: return std::sin(v);
    case Function::cos: return std::cos(v);
    case Function::tan: return checked(std::tan(v), x, "tan");
    case Function::sinh: return checked(std::sinh(v), x, "sinh");
    case Function::cosh: return checked(std::cosh(v), x, "cosh");
    case Function::tanh: return std::tanh(v);
    case Function::exp: return checked(std::exp(v), x, "exp");
    case Function::log:
      if (!(v > 0.0)) throw DomainError("log of non-positive argument " + format_real(v), x);
      return std::log(v);
    case Function::sqrt:
      if (v < 0.0) throw DomainError("sqrt of negative argument " + format_real(v), x);
      return std::sqrt(v);
    case Function::abs: return std::abs(v);
  }
  return v;
}

inline double eval(const Node& node, double x) {
  return std::visit(
      [x](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return x;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return -eval(*n.operand, x);
        } else if constexpr (std::is_same_v<T, Binary>) {
          const double l = eval(*n.lhs, x);
          const double r = eval(*n.rhs, x);
          switch (n.op) {
            case BinaryOp::add: return checked(l + r, x, "+");
            case BinaryOp::sub: return checked(l - r, x, "-");
            case BinaryOp::mul: return checked(l * r, x, "*");
            case BinaryOp::div:
              if (r == 0.0) throw DomainError("division by zero", x);
              return checked(l / r, x, "/");
            case BinaryOp::pow: return checked(std::pow(l, r), x, "^");
          }
          return 0.0;
        } else {
          return apply(n.fn, eval(*n.arg, x), x);
        }
      },
      node.kind);
}

enum class TokenKind { number, identifier, op, lparen, rparen, end };

struct Token {
  TokenKind kind;
  std::size_t pos;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ == src_.size()) {
      current_ = {TokenKind::end, start, {}};
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number(start);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      current_ = {TokenKind::identifier, start, src_.substr(start, pos_ - start)};
      return;
    }
    ++pos_;
    switch (c) {
      case '+': case '-': case '*': case '/': case '^':
        current_ = {TokenKind::op, start, src_.substr(start, 1)};
        return;
      case '(':
        current_ = {TokenKind::lparen, start, src_.substr(start, 1)};
        return;
      case ')':
        current_ = {TokenKind::rparen, start, src_.substr(start, 1)};
        return;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }

  void lex_number(std::size_t start) {
    auto is_digit = [&](std::size_t i) {
      return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
    };
    std::size_t digits = 0;
    while (is_digit(pos_)) ++pos_, ++digits;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (is_digit(pos_)) ++pos_, ++digits;
    }
    if (digits == 0) throw ParseError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (!is_digit(p)) throw ParseError("malformed exponent", pos_);
      while (is_digit(p)) ++p;
      pos_ = p;
    }
    const std::string_view text = src_.substr(start, pos_ - start);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc::result_out_of_range || !std::isfinite(value))
      throw ParseError("numeric literal out of range", start);
    if (ec != std::errc{} || ptr != text.data() + text.size())
      throw ParseError("malformed number", start);
    current_ = {TokenKind::number, start, text, value};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token current_{TokenKind::end, 0, {}};
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) {}

  NodePtr parse() {
    NodePtr root = expression(0);
    const Token& t = lexer_.peek();
    if (t.kind != TokenKind::end) throw ParseError("unexpected '" + std::string(t.text) + "'", t.pos);
    return root;
  }

 private:
  // Binding powers: + - (10), * / (20), prefix minus (25), ^ (31 left / 30 right).
  static constexpr int kUnary = 25;

  static std::optional<std::pair<int, int>> infix_power(char op) {
    switch (op) {
      case '+': case '-': return std::pair{10, 11};
      case '*': case '/': return std::pair{20, 21};
      case '^': return std::pair{31, 30};
      default: return std::nullopt;
    }
  }

  NodePtr expression(int min_bp) {
    NodePtr lhs = prefix();
    for (;;) {
      const Token& t = lexer_.peek();
      if (t.kind != TokenKind::op) break;
      const auto bp = infix_power(t.text[0]);
      if (!bp || bp->first < min_bp) break;
      const auto op = static_cast<BinaryOp>(lexer_.take().text[0]);
      NodePtr rhs = expression(bp->second);
      lhs = make_binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  NodePtr prefix() {
    Token t = lexer_.take();
    switch (t.kind) {
      case TokenKind::number:
        return make_constant(t.number);
      case TokenKind::identifier: {
        if (t.text == "x") return make_variable();
        const auto fn = lookup_function(t.text);
        if (!fn) throw ParseError("unknown identifier '" + std::string(t.text) + "'", t.pos);
        expect(TokenKind::lparen, "'(' after function name");
        NodePtr arg = expression(0);
        expect(TokenKind::rparen, "')'");
        return make_call(*fn, std::move(arg));
      }
      case TokenKind::op:
        if (t.text == "-") return make_negate(expression(kUnary));
        throw ParseError("unexpected '" + std::string(t.text) + "'", t.pos);
      case TokenKind::lparen: {
        NodePtr inner = expression(0);
        expect(TokenKind::rparen, "')'");
        return inner;
      }
      case TokenKind::rparen:
        throw ParseError("unexpected ')'", t.pos);
      case TokenKind::end:
        throw ParseError("unexpected end of input", t.pos);
    }
    throw ParseError("unexpected token", t.pos);
  }

  void expect(TokenKind kind, const char* what) {
    const Token& t = lexer_.peek();
    if (t.kind != kind) {
      if (t.kind == TokenKind::end) throw ParseError(std::string("expected ") + what + ", got end of input", t.pos);
      throw ParseError(std::string("expected ") + what + ", got '" + std::string(t.text) + "'", t.pos);
    }
    lexer_.take();
  }

  Lexer lexer_;
};

}  // namespace detail

/// An immutable parsed scalar function of x.
class Expression {
 public:
  /// Throws ParseError on malformed or empty text.
  static Expression parse(std::string_view src) {
    return Expression(detail::Parser(src).parse(), std::string(src));
  }

  explicit Expression(NodePtr root, std::string source = {})
      : root_(std::move(root)), source_(std::move(source)) {
    if (source_.empty()) source_ = serialize(*root_);
  }

  /// Throws DomainError when the value is undefined or non-finite.
  double operator()(double x) const { return detail::eval(*root_, x); }
  double evaluate(double x) const { return (*this)(x); }

  const Node& root() const { return *root_; }
  const std::string& source() const { return source_; }
  std::string canonical() const { return serialize(*root_); }

  friend bool operator==(const Expression& a, const Expression& b) { return same_tree(*a.root_, *b.root_); }

 private:
  NodePtr root_;
  std::string source_;
};

/// The coefficient triple (r, p, q). r and p must be positive wherever
/// they are evaluated; a violation raises DomainError.
class CoefficientSet {
 public:
  CoefficientSet(Expression r, Expression p, Expression q)
      : r_(std::move(r)), p_(std::move(p)), q_(std::move(q)) {}

  static CoefficientSet parse(std::string_view r, std::string_view p, std::string_view q) {
    return {Expression::parse(r), Expression::parse(p), Expression::parse(q)};
  }

  double r(double x) const {
    const double v = r_(x);
    if (!(v > 0.0)) throw DomainError("r(x) <= 0 (r=" + format_real(v) + ")", x);
    return v;
  }
  double p(double x) const {
    const double v = p_(x);
    if (!(v > 0.0)) throw DomainError("p(x) <= 0 (p=" + format_real(v) + ")", x);
    return v;
  }
  double q(double x) const { return q_(x); }

  const Expression& r_expr() const { return r_; }
  const Expression& p_expr() const { return p_; }
  const Expression& q_expr() const { return q_; }

 private:
  Expression r_;
  Expression p_;
  Expression q_;
};

}  // namespace oscil::expr
