#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "qsd/linalg.hpp"

namespace qsd {

/// Dimension-independent operator expression over the primitives
/// a, adag, n, q, p, id with complex scalar literals.
///
///   expr    := term (('+' | '-') term)*
///   term    := factor ('*' factor)*
///   factor  := scalar | primitive | '(' expr ')' | '-' factor
///   scalar  := float ['i']
///
/// Example: "0.5*0.004*adag*adag*a*a + 2i*(adag - a)".
class OperatorExpr {
 public:
  struct Node;

  /// Throws Error(Parse) with the 1-based column of the offending token.
  static OperatorExpr parse(std::string_view text);

  OperatorMatrix eval(std::size_t dim) const;

  const std::string& source() const noexcept { return source_; }

 private:
  OperatorExpr(std::shared_ptr<const Node> root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}

  std::shared_ptr<const Node> root_;
  std::string source_;
};

inline OperatorMatrix eval_expr(const OperatorExpr& expr, std::size_t dim) {
  return expr.eval(dim);
}

}  // namespace qsd
