#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsc/alloc.hpp"

namespace gsc {

using Vec = std::vector<double, PoolAllocator<double>>;

/// Dense square matrix, row-major. Sizes here are the state dimension N
/// (or the coupling dimension K), both small.
struct Mat {
    std::size_t n = 0;
    Vec a;

    Mat() = default;
    explicit Mat(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Dense rank-3 tensor T[i][j][k], n^3 entries.
struct Tensor3 {
    std::size_t n = 0;
    Vec a;

    Tensor3() = default;
    explicit Tensor3(std::size_t n_) : n(n_), a(n_ * n_ * n_, 0.0) {}

    double& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return a[(i * n + j) * n + k];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return a[(i * n + j) * n + k];
    }
};

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double linf_norm(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

inline double linf_diff(std::span<const double> x, std::span<const double> y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

inline bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

Vec mat_vec(const Mat& m, std::span<const double> x);
Mat mat_mul(const Mat& a, const Mat& b);

/// Solve A x = b by LU with partial pivoting. Throws SingularMatrixError.
Vec lu_solve(Mat a, Vec b);

/// Eigenvalues of a symmetric matrix, ascending (cyclic Jacobi).
Vec sym_eigenvalues(Mat m);

/// Symmetric eigendecomposition: returns eigenvalues ascending and the
/// orthonormal eigenvectors as matrix columns.
struct SymEig {
    Vec values;
    Mat vectors;
};
SymEig sym_eigen(Mat m);

/// Principal square root of a PSD matrix; eigenvalues below 0 are clamped.
Mat sym_sqrt(const Mat& m);

/// Eigenvalues of the product f*g for symmetric f and PSD g. The product is
/// similar to sqrt(g)*f*sqrt(g), so the spectrum is real.
Vec product_eigenvalues(const Mat& f, const Mat& g);

/// Ratio of extreme |eigenvalues| of a symmetric matrix; infinity when the
/// smallest is zero.
double sym_condition(const Mat& m);

/// Sum with a fixed pairwise (binary tree) order. Deterministic for a given
/// input order regardless of how the inputs were produced.
double pairwise_sum(std::span<const double> x);

}  // namespace gsc
