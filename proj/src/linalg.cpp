#include "pgeom/linalg.hpp"

#include "pgeom/error.hpp"

#include <cmath>

namespace pgeom {

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::transposed() const {
    Mat t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) fail(ErrorKind::Validation, "matrix shape mismatch");
    Mat r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            double v = a(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) r(i, j) += v * b(k, j);
        }
    return r;
}

Mat operator+(const Mat& a, const Mat& b) {
    Mat r = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) += b(i, j);
    return r;
}

Mat operator-(const Mat& a, const Mat& b) {
    Mat r = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) -= b(i, j);
    return r;
}

Mat Mat::block(int r0, int c0, int nr, int nc) const {
    Mat r(nr, nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
    return r;
}

double Mat::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

// full-pivot elimination; returns the pivots and optionally tracks the
// permutation sign
int eliminate(Mat& m, double threshold, double* det_out) {
    const int rows = m.rows(), cols = m.cols();
    int r = 0;
    double d = 1.0;
    std::vector<int> col_of_step;
    for (int step = 0; r < rows && step < cols; ++step) {
        int pr = -1, pc = -1;
        double best = threshold;
        for (int i = r; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                if (std::abs(m(i, j)) > best) {
                    // skip columns already used as pivots
                    bool used = false;
                    for (int u : col_of_step) used = used || (u == j);
                    if (!used) {
                        best = std::abs(m(i, j));
                        pr = i;
                        pc = j;
                    }
                }
            }
        if (pr < 0) break;
        if (pr != r) {
            for (int j = 0; j < cols; ++j) std::swap(m(r, j), m(pr, j));
            d = -d;
        }
        col_of_step.push_back(pc);
        double piv = m(r, pc);
        d *= piv;
        for (int i = r + 1; i < rows; ++i) {
            double f = m(i, pc) / piv;
            if (f == 0.0) continue;
            for (int j = 0; j < cols; ++j) m(i, j) -= f * m(r, j);
            m(i, pc) = 0.0;
        }
        ++r;
    }
    if (det_out) *det_out = (r == rows && rows == cols) ? d : 0.0;
    return r;
}

} // namespace

int rank(Mat m, double threshold) { return eliminate(m, threshold, nullptr); }

double det(Mat m) {
    if (m.rows() != m.cols()) fail(ErrorKind::Validation, "det of non-square matrix");
    double d = 0.0;
    eliminate(m, 0.0, &d);
    return d;
}

Mat inverse(Mat m, double threshold) {
    const int n = m.rows();
    if (n != m.cols()) fail(ErrorKind::Validation, "inverse of non-square matrix");
    Mat aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1.0;
    }
    // Gauss-Jordan with column pivoting inside the left block
    std::vector<int> perm(n);
    for (int col = 0, row = 0; col < n; ++col, ++row) {
        int pr = row;
        int pc = -1;
        double best = threshold;
        for (int i = row; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (std::abs(aug(i, j)) > best) {
                    bool used = false;
                    for (int u = 0; u < row; ++u) used = used || (perm[u] == j);
                    if (!used) {
                        best = std::abs(aug(i, j));
                        pr = i;
                        pc = j;
                    }
                }
        if (pc < 0) fail(ErrorKind::SingularMatrix, "matrix is numerically singular");
        if (pr != row)
            for (int j = 0; j < 2 * n; ++j) std::swap(aug(row, j), aug(pr, j));
        perm[row] = pc;
        double piv = aug(row, pc);
        for (int j = 0; j < 2 * n; ++j) aug(row, j) /= piv;
        for (int i = 0; i < n; ++i) {
            if (i == row) continue;
            double f = aug(i, pc);
            if (f == 0.0) continue;
            for (int j = 0; j < 2 * n; ++j) aug(i, j) -= f * aug(row, j);
        }
    }
    Mat inv(n, n);
    for (int row = 0; row < n; ++row)
        for (int j = 0; j < n; ++j) inv(perm[row], j) = aug(row, n + j);
    return inv;
}

std::vector<double> solve(Mat m, std::vector<double> b, double threshold) {
    Mat inv = inverse(std::move(m), threshold);
    std::vector<double> x(b.size(), 0.0);
    for (int i = 0; i < inv.rows(); ++i)
        for (int j = 0; j < inv.cols(); ++j) x[i] += inv(i, j) * b[j];
    return x;
}

} // namespace pgeom
