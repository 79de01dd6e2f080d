#include "avlab/fields/expression.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <sstream>

#include "avlab/common/error.hpp"

namespace avlab {

enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log };

struct Expression::Node {
  Op op;
  double value = 0.0;  // Const
  int var = 0;         // Var
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr constant(double v) { return std::make_shared<Expression::Node>(Expression::Node{Op::Const, v, 0, nullptr, nullptr}); }
NodePtr variable(int i) { return std::make_shared<Expression::Node>(Expression::Node{Op::Var, 0.0, i, nullptr, nullptr}); }

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

// Builders fold the trivial identities so that repeated differentiation does
// not blow up the tree.
NodePtr make(Op op, NodePtr a, NodePtr b = nullptr) {
  if (a->op == Op::Const && (!b || b->op == Op::Const)) {
    const double x = a->value;
    const double y = b ? b->value : 0.0;
    switch (op) {
      case Op::Add: return constant(x + y);
      case Op::Sub: return constant(x - y);
      case Op::Mul: return constant(x * y);
      case Op::Div: return constant(x / y);
      case Op::Pow: return constant(std::pow(x, y));
      case Op::Neg: return constant(-x);
      case Op::Sin: return constant(std::sin(x));
      case Op::Cos: return constant(std::cos(x));
      case Op::Exp: return constant(std::exp(x));
      case Op::Log: return constant(std::log(x));
      default: break;
    }
  }
  switch (op) {
    case Op::Add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::Sub:
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make(Op::Neg, b);
      break;
    case Op::Mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Div:
      if (is_const(a, 0.0)) return constant(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Pow:
      if (is_const(b, 0.0)) return constant(1.0);
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Neg:
      if (a->op == Op::Neg) return a->lhs;
      break;
    default: break;
  }
  return std::make_shared<Expression::Node>(Expression::Node{op, 0.0, 0, std::move(a), std::move(b)});
}

double eval(const Expression::Node& n, const Vec2& x) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x[n.var];
    case Op::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Op::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Op::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Op::Div: return eval(*n.lhs, x) / eval(*n.rhs, x);
    case Op::Pow: {
      const double base = eval(*n.lhs, x);
      if (n.rhs->op == Op::Const) {
        const double e = n.rhs->value;
        if (e == 2.0) return base * base;
        if (e == 3.0) return base * base * base;
        return std::pow(base, e);
      }
      return std::pow(base, eval(*n.rhs, x));
    }
    case Op::Neg: return -eval(*n.lhs, x);
    case Op::Sin: return std::sin(eval(*n.lhs, x));
    case Op::Cos: return std::cos(eval(*n.lhs, x));
    case Op::Exp: return std::exp(eval(*n.lhs, x));
    case Op::Log: return std::log(eval(*n.lhs, x));
  }
  return 0.0;
}

NodePtr diff(const NodePtr& n, int var) {
  switch (n->op) {
    case Op::Const: return constant(0.0);
    case Op::Var: return constant(n->var == var ? 1.0 : 0.0);
    case Op::Add: return make(Op::Add, diff(n->lhs, var), diff(n->rhs, var));
    case Op::Sub: return make(Op::Sub, diff(n->lhs, var), diff(n->rhs, var));
    case Op::Mul:
      return make(Op::Add, make(Op::Mul, diff(n->lhs, var), n->rhs), make(Op::Mul, n->lhs, diff(n->rhs, var)));
    case Op::Div: {
      auto num = make(Op::Sub, make(Op::Mul, diff(n->lhs, var), n->rhs), make(Op::Mul, n->lhs, diff(n->rhs, var)));
      return make(Op::Div, num, make(Op::Pow, n->rhs, constant(2.0)));
    }
    case Op::Pow: {
      if (n->rhs->op == Op::Const) {
        const double e = n->rhs->value;
        return make(Op::Mul, make(Op::Mul, constant(e), make(Op::Pow, n->lhs, constant(e - 1.0))), diff(n->lhs, var));
      }
      // d(a^b) = a^b (b' log a + b a'/a)
      auto t1 = make(Op::Mul, diff(n->rhs, var), make(Op::Log, n->lhs));
      auto t2 = make(Op::Div, make(Op::Mul, n->rhs, diff(n->lhs, var)), n->lhs);
      return make(Op::Mul, n, make(Op::Add, t1, t2));
    }
    case Op::Neg: return make(Op::Neg, diff(n->lhs, var));
    case Op::Sin: return make(Op::Mul, make(Op::Cos, n->lhs), diff(n->lhs, var));
    case Op::Cos: return make(Op::Neg, make(Op::Mul, make(Op::Sin, n->lhs), diff(n->lhs, var)));
    case Op::Exp: return make(Op::Mul, n, diff(n->lhs, var));
    case Op::Log: return make(Op::Div, diff(n->lhs, var), n->lhs);
  }
  return constant(0.0);
}

void print(const Expression::Node& n, std::ostringstream& os) {
  switch (n.op) {
    case Op::Const: os << n.value; return;
    case Op::Var: os << (n.var == 0 ? "x1" : "x2"); return;
    case Op::Neg: os << "(-"; print(*n.lhs, os); os << ")"; return;
    case Op::Sin: os << "sin("; print(*n.lhs, os); os << ")"; return;
    case Op::Cos: os << "cos("; print(*n.lhs, os); os << ")"; return;
    case Op::Exp: os << "exp("; print(*n.lhs, os); os << ")"; return;
    case Op::Log: os << "log("; print(*n.lhs, os); os << ")"; return;
    default: break;
  }
  const char* sym = n.op == Op::Add ? "+" : n.op == Op::Sub ? "-" : n.op == Op::Mul ? "*" : n.op == Op::Div ? "/" : "^";
  os << "(";
  print(*n.lhs, os);
  os << sym;
  print(*n.rhs, os);
  os << ")";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    auto n = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::ParseError, msg + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    auto n = term();
    for (;;) {
      if (accept('+')) n = make(Op::Add, n, term());
      else if (accept('-')) n = make(Op::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    auto n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::Mul, n, unary());
      else if (accept('/')) n = make(Op::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "x1") return variable(0);
      if (word == "x2") return variable(1);
      Op op;
      if (word == "sin") op = Op::Sin;
      else if (word == "cos") op = Op::Cos;
      else if (word == "exp") op = Op::Exp;
      else {
        pos_ = start;
        fail("unknown identifier '" + std::string(word) + "'");
      }
      if (!accept('(')) fail("expected '(' after function name");
      auto arg = expr();
      if (!accept(')')) fail("expected ')'");
      return make(op, arg);
    }
    if (accept('(')) {
      auto n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  // number := digits ['.' digits] [('e'|'E') ['+'|'-'] digits], with at least
  // one digit in the mantissa.
  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t from = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - from;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail("malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent");
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc()) fail("malformed number");
    return constant(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }

double Expression::evaluate(const Vec2& x) const { return eval(*root_, x); }

Expression Expression::derivative(int var) const {
  if (var != 0 && var != 1) throw Error(ErrorKind::InvalidArgument, "derivative variable must be 0 or 1");
  return Expression(diff(root_, var));
}

std::string Expression::to_string() const {
  std::ostringstream os;
  os.precision(17);
  print(*root_, os);
  return os.str();
}

}  // namespace avlab
