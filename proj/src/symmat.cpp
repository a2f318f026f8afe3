#include "pgeom/symmat.hpp"

#include "pgeom/error.hpp"

namespace pgeom {

ExprMatrix expr_matrix(int rows, int cols) {
    return ExprMatrix(rows, std::vector<Expression>(cols, Expression::integer(0)));
}

namespace {

ExprMatrix minor_of(const ExprMatrix& m, int row, int col) {
    const int n = static_cast<int>(m.size());
    ExprMatrix out;
    out.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
        if (i == row) continue;
        std::vector<Expression> r;
        r.reserve(n - 1);
        for (int j = 0; j < n; ++j) {
            if (j == col) continue;
            r.push_back(m[i][j]);
        }
        out.push_back(std::move(r));
    }
    return out;
}

Expression det_rec(const ExprMatrix& m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) return Expression::integer(1);
    if (n == 1) return m[0][0];
    if (n == 2)
        return normalize(m[0][0] * m[1][1] - m[0][1] * m[1][0]);
    // expand along the row with the most literal zeros
    int best_row = 0, best_zeros = -1;
    for (int i = 0; i < n; ++i) {
        int zeros = 0;
        for (int j = 0; j < n; ++j)
            if (m[i][j].is_literal_zero()) ++zeros;
        if (zeros > best_zeros) {
            best_zeros = zeros;
            best_row = i;
        }
    }
    std::vector<Expression> terms;
    for (int j = 0; j < n; ++j) {
        if (m[best_row][j].is_literal_zero()) continue;
        Expression cof = det_rec(minor_of(m, best_row, j));
        if (cof.is_literal_zero()) continue;
        Expression t = m[best_row][j] * cof;
        if ((best_row + j) % 2 == 1) t = -t;
        terms.push_back(std::move(t));
    }
    return normalize(Expression::sum(std::move(terms)));
}

} // namespace

Expression sym_det(const ExprMatrix& m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) return Expression::integer(1);
    for (const auto& row : m)
        if (static_cast<int>(row.size()) != n)
            fail(ErrorKind::Validation, "determinant of non-square matrix");
    if (n > 8)
        fail(ErrorKind::DimensionTooLarge,
             "symbolic inversion limited to dimension 8; use the numeric "
             "per-point path");
    return det_rec(m);
}

ExprMatrix sym_inverse(const ExprMatrix& m, Expression* det_out) {
    const int n = static_cast<int>(m.size());
    Expression d = sym_det(m);
    if (det_out) *det_out = d;
    if (d.is_literal_zero())
        fail(ErrorKind::SingularMatrix, "matrix determinant is identically zero");
    ExprMatrix inv = expr_matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Expression cof = det_rec(minor_of(m, j, i)); // adjugate transposes
            if ((i + j) % 2 == 1) cof = -cof;
            inv[i][j] = normalize(Expression::quotient(cof, d));
        }
    return inv;
}

ExprMatrix sym_mul(const ExprMatrix& a, const ExprMatrix& b) {
    const int n = static_cast<int>(a.size());
    const int k = static_cast<int>(b.size());
    const int mcols = k ? static_cast<int>(b[0].size()) : 0;
    ExprMatrix out = expr_matrix(n, mcols);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < mcols; ++j) {
            std::vector<Expression> terms;
            for (int t = 0; t < k; ++t) {
                if (a[i][t].is_literal_zero() || b[t][j].is_literal_zero()) continue;
                terms.push_back(a[i][t] * b[t][j]);
            }
            out[i][j] = normalize(Expression::sum(std::move(terms)));
        }
    return out;
}

} // namespace pgeom
