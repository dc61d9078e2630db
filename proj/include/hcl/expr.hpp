#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcl/linalg.hpp"

namespace hcl {

/// Value, gradient and Hessian at a point.
struct Jet {
  double value = 0.0;
  Vec grad;
  SymMatrix hess;
};

/// Arithmetic expression over named variables with exact first and second
/// derivatives.
///
/// Grammar: + - * / ^, unary minus, parentheses, numbers, `pi`, and the
/// functions exp log sqrt sin cos tan atan tanh abs. `^` is right associative
/// and binds tighter than unary minus, so -x^2 = -(x^2).
class Expr {
 public:
  Expr() = default;
  /// Variables x0..x{n-1}; x, y, z alias x0, x1, x2 when n allows.
  static Expr parse(std::string_view text, int n);
  static Expr parse(std::string_view text, std::vector<std::string> names);

  int arity() const { return static_cast<int>(names_.size()); }
  const std::string& text() const { return text_; }

  double value(std::span<const double> x) const;
  Jet jet(std::span<const double> x) const;

  struct Node;

 private:
  std::string text_;
  std::vector<std::string> names_;
  std::shared_ptr<const std::vector<Node>> nodes_;
  int root_ = -1;
};

}  // namespace hcl
