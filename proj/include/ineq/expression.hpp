#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ineq/test_function.hpp"

namespace ineq {

/// Parsed arithmetic expression over variables x1..xn (alias x when n = 1).
/// Grammar: + - * / ^ (right-assoc), unary -, calls exp log sin cos abs sqrt
/// min max. Precedence: ^  >  unary -  >  * /  >  + -.
class Expression {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  Expression() = default;
  Expression(NodePtr root, int arity, std::string source);

  int arity() const { return arity_; }
  const std::string& source() const { return source_; }
  const NodePtr& root() const { return root_; }

  double value(std::span<const double> x) const;
  /// Forward-mode dual-number gradient; abs takes derivative 0 at the kink.
  std::vector<double> gradient(std::span<const double> x) const;

 private:
  NodePtr root_;
  int arity_ = 1;
  std::string source_;
};

Expression parse_expression(const std::string& src, int arity);

/// Canonical form with minimal parentheses; parse-print-parse is idempotent.
std::string print_expression(const Expression& e);

/// Wraps the expression as a TestFunction labeled by its canonical form.
TestFunction expression_fn(const Expression& e);
TestFunction parse_fn(const std::string& src, int arity);

}  // namespace ineq
