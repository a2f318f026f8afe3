#ifndef PGEOM_LINALG_HPP
#define PGEOM_LINALG_HPP

#include <cstddef>
#include <vector>

namespace pgeom {

/// Dense row-major matrix of doubles; just enough numeric linear algebra for
/// the point checks (full-pivot LU, inverse, rank, solve).
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols, 0.0) {}

    static Mat identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return a_[size_t(r) * cols_ + c]; }
    double operator()(int r, int c) const { return a_[size_t(r) * cols_ + c]; }

    Mat transposed() const;
    friend Mat operator*(const Mat& a, const Mat& b);
    friend Mat operator+(const Mat& a, const Mat& b);
    friend Mat operator-(const Mat& a, const Mat& b);

    Mat block(int r0, int c0, int nr, int nc) const;
    double max_abs() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

/// Rank with absolute pivot threshold, via full-pivot elimination.
int rank(Mat m, double threshold);

/// Determinant via full-pivot LU.
double det(Mat m);

/// Inverse via full-pivot Gauss-Jordan; throws Error(SingularMatrix) when the
/// best remaining pivot is at or below `threshold`.
Mat inverse(Mat m, double threshold = 0.0);

/// Solves m x = b (square) with full pivoting.
std::vector<double> solve(Mat m, std::vector<double> b, double threshold = 0.0);

} // namespace pgeom

#endif
