#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rbm {

using Vec = std::vector<double>;

// Minimal dense row-major matrix.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(std::size_t(r) * c, fill) {}

    double& operator()(int r, int c) { return a[std::size_t(r) * cols + c]; }
    double operator()(int r, int c) const { return a[std::size_t(r) * cols + c]; }

    const double* row(int r) const { return a.data() + std::size_t(r) * cols; }
    double* row(int r) { return a.data() + std::size_t(r) * cols; }
};

inline double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

// Solves A x = b for a small symmetric positive-definite A (in-place Cholesky).
inline Vec solve_spd(Mat A, Vec b) {
    const int n = A.rows;
    for (int j = 0; j < n; ++j) {
        double d = A(j, j);
        for (int k = 0; k < j; ++k) d -= A(j, k) * A(j, k);
        if (d <= 0.0) throw std::runtime_error("solve_spd: matrix not positive definite");
        const double l = std::sqrt(d);
        A(j, j) = l;
        for (int i = j + 1; i < n; ++i) {
            double s = A(i, j);
            for (int k = 0; k < j; ++k) s -= A(i, k) * A(j, k);
            A(i, j) = s / l;
        }
    }
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= A(i, k) * b[k];
        b[i] = s / A(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < n; ++k) s -= A(k, i) * b[k];
        b[i] = s / A(i, i);
    }
    return b;
}

struct EigenSym {
    Vec values;   // descending
    Mat vectors;  // row k = eigenvector for values[k]
};

// Cyclic Jacobi eigensolver for symmetric matrices.  Adequate for the small
// covariance blocks used here (a few hundred rows at most).
EigenSym eigen_sym(Mat a);

}  // namespace rbm
