#ifndef PGEOM_SYMMAT_HPP
#define PGEOM_SYMMAT_HPP

#include "pgeom/expr.hpp"

#include <vector>

namespace pgeom {

/// Dense matrix of expressions, row major.
using ExprMatrix = std::vector<std::vector<Expression>>;

ExprMatrix expr_matrix(int rows, int cols);

/// Determinant by cofactor expansion over the rational-function normal form.
/// Intended for the small matrices of this toolkit (n <= 8).
Expression sym_det(const ExprMatrix& m);

/// Exact inverse via adjugate over determinant. Throws
/// Error(SingularMatrix) when the determinant normalizes to zero.
ExprMatrix sym_inverse(const ExprMatrix& m, Expression* det_out = nullptr);

/// Matrix product with normalized entries.
ExprMatrix sym_mul(const ExprMatrix& a, const ExprMatrix& b);

} // namespace pgeom

#endif
