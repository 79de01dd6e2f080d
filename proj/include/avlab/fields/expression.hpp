#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "avlab/common/types.hpp"

namespace avlab {

/// Closed-form scalar field of (x1, x2) parsed from the small grammar
/// documented in the README:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'x1' | 'x2' | func '(' expr ')' | '(' expr ')'
///   func    := 'sin' | 'cos' | 'exp'
///
/// `^` is right-associative and binds tighter than unary minus on its left
/// operand (-x1^2 == -(x1^2)). Derivatives are symbolic.
class Expression {
 public:
  struct Node;

  static Expression parse(std::string_view text);

  double evaluate(const Vec2& x) const;
  /// Symbolic partial derivative with respect to x1 (var = 0) or x2 (var = 1).
  Expression derivative(int var) const;
  std::string to_string() const;

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace avlab
