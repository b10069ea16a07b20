#pragma once

// Expression language for time-varying coefficients.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?            right-associative
//   primary := number | 't' | '(' expr ')'
//            | fn '(' expr ')'                  fn in sqrt exp log sin cos abs
//            | 'piecewise' '(' (t '<=' c ':' expr ',')+ 'else' ':' expr ')'
//
// Piecewise thresholds must increase; the first clause with t <= c wins.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rlattract/special_functions.hpp"

namespace rlattract {

namespace expr_detail {
struct Node;
}

class Expr {
public:
    Expr();  // the constant 0

    static Expr parse(std::string_view src);
    static Expr constant(double v);

    /// Throws EvalError on a domain fault or a non-finite result.
    [[nodiscard]] double eval(double t) const;

    /// Canonical text; reparses to an expression with identical values.
    [[nodiscard]] std::string to_string() const;

    /// True when the expression does not reference t.
    [[nodiscard]] bool is_constant() const;

    /// Piecewise thresholds (all nested piecewise nodes), ascending, unique.
    [[nodiscard]] std::vector<double> breakpoints() const;

    /// Jumps larger than 1e-9 at piecewise thresholds, one message each.
    [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    explicit Expr(std::shared_ptr<const expr_detail::Node> root);

    std::shared_ptr<const expr_detail::Node> root_;
    std::vector<std::string> warnings_;
};

inline Expr parse(std::string_view src) { return Expr::parse(src); }
inline double eval(const Expr& e, double t) { return e.eval(t); }

/// Row-major matrix of expressions.
struct ExprMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Expr> entries;

    static ExprMatrix constant(const Matrix& m);
    static ExprMatrix zeros(int rows, int cols);

    [[nodiscard]] const Expr& at(int i, int j) const { return entries[static_cast<std::size_t>(i * cols + j)]; }
    [[nodiscard]] bool is_constant() const;
    [[nodiscard]] std::vector<double> breakpoints() const;
    [[nodiscard]] std::vector<std::string> warnings() const;
};

/// Entrywise evaluation; a fault names the failing entry (i, j), zero-based.
Matrix eval_matrix(const ExprMatrix& m, double t);

/// Column vector from an s x 1 expression matrix.
Vector eval_vector(const ExprMatrix& m, double t);

}  // namespace rlattract
