#include "gsc/linalg.hpp"

#include <algorithm>
#include <limits>

namespace gsc {

Vec mat_vec(const Mat& m, std::span<const double> x) {
    Vec y(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.n; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Mat mat_mul(const Mat& a, const Mat& b) {
    Mat c(a.n);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t k = 0; k < a.n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < a.n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vec lu_solve(Mat a, Vec b) {
    const std::size_t n = a.n;
    if (b.size() != n) throw std::invalid_argument("lu_solve: size mismatch");
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        double best_abs = std::abs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a(r, col));
            if (v > best_abs) {
                best_abs = v;
                best = r;
            }
        }
        if (best_abs == 0.0) throw SingularMatrixError("lu_solve: singular matrix");
        if (best != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(best, j));
            std::swap(b[col], b[best]);
        }
        const double d = a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / d;
            if (f == 0.0) continue;
            a(r, col) = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    Vec x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
        x[ii] = s / a(ii, ii);
    }
    return x;
}

namespace {

// Cyclic Jacobi sweeps; enough for the small symmetric matrices used here.
void jacobi(Mat& m, Mat* vectors) {
    const std::size_t n = m.n;
    if (vectors) {
        *vectors = Mat(n);
        for (std::size_t i = 0; i < n; ++i) (*vectors)(i, i) = 1.0;
    }
    if (n < 2) return;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (off < 1e-300) return;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) <
                    1e-18 * (std::abs(m(p, p)) + std::abs(m(q, q)) + 1e-300))
                    continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                if (vectors) {
                    for (std::size_t k = 0; k < n; ++k) {
                        const double vkp = (*vectors)(k, p), vkq = (*vectors)(k, q);
                        (*vectors)(k, p) = c * vkp - s * vkq;
                        (*vectors)(k, q) = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
}

}  // namespace

Vec sym_eigenvalues(Mat m) {
    jacobi(m, nullptr);
    Vec vals(m.n);
    for (std::size_t i = 0; i < m.n; ++i) vals[i] = m(i, i);
    std::sort(vals.begin(), vals.end());
    return vals;
}

SymEig sym_eigen(Mat m) {
    Mat vectors;
    jacobi(m, &vectors);
    const std::size_t n = m.n;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return m(i, i) < m(j, j); });
    SymEig out;
    out.values.resize(n);
    out.vectors = Mat(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = m(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = vectors(i, order[j]);
    }
    return out;
}

Mat sym_sqrt(const Mat& m) {
    SymEig e = sym_eigen(m);
    const std::size_t n = m.n;
    Mat out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = std::sqrt(std::max(0.0, e.values[k]));
        if (s == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += s * e.vectors(i, k) * e.vectors(j, k);
    }
    return out;
}

Vec product_eigenvalues(const Mat& f, const Mat& g) {
    const Mat r = sym_sqrt(g);
    return sym_eigenvalues(mat_mul(r, mat_mul(f, r)));
}

double sym_condition(const Mat& m) {
    const Vec vals = sym_eigenvalues(m);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double v : vals) {
        lo = std::min(lo, std::abs(v));
        hi = std::max(hi, std::abs(v));
    }
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

double pairwise_sum(std::span<const double> x) {
    if (x.empty()) return 0.0;
    if (x.size() == 1) return x[0];
    if (x.size() == 2) return x[0] + x[1];
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

}  // namespace gsc
