#pragma once

// Test-side oracles, independent of the library code paths they check:
// closed forms for the (l,r)/BEC instance, brute-force root scans, plain
// quadrature and finite differences.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// textbook (l,r)-regular BEC recursion
inline double bec_map(int l, int r, double eps, double u) {
    return eps * std::pow(1.0 - std::pow(1.0 - u, r - 1), l - 1);
}

inline double bec_iterate(int l, int r, double eps, double u, int steps) {
    for (int i = 0; i < steps; ++i) u = bec_map(l, r, eps, u);
    return u;
}

// closed-form potential of the scalar instance
inline double bec_potential(int l, int r, double eps, double u) {
    const double v = 1.0 - std::pow(1.0 - u, r - 1);
    const double g = u - (1.0 - std::pow(1.0 - u, r)) / r;
    const double f = eps * std::pow(v, l) / l;
    return u * v - g - f;
}

// all roots of bec_map(u) = u in [0,1] by dense scan + bisection
inline std::vector<double> bec_fixed_points(int l, int r, double eps,
                                            int scan = 200001) {
    std::vector<double> roots;
    const auto res = [&](double u) { return u - bec_map(l, r, eps, u); };
    double prev_u = 0.0, prev_r = res(0.0);
    if (prev_r == 0.0) roots.push_back(0.0);
    for (int i = 1; i < scan; ++i) {
        const double u = static_cast<double>(i) / (scan - 1);
        const double rv = res(u);
        if (rv == 0.0) {
            roots.push_back(u);
        } else if (prev_r != 0.0 && prev_r * rv < 0.0) {
            double a = prev_u, b = u;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                if (res(a) * res(mid) <= 0.0)
                    b = mid;
                else
                    a = mid;
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_u = u;
        prev_r = rv;
    }
    return roots;
}

// largest stable root (the bad solution); -1 when only the origin remains
inline double bec_bad_solution(int l, int r, double eps) {
    const auto roots = bec_fixed_points(l, r, eps);
    double bad = -1.0;
    for (double u : roots) {
        const double h = 1e-7;
        const double slope =
            (bec_map(l, r, eps, u + h) - bec_map(l, r, eps, u - h)) / (2 * h);
        if (std::abs(slope) < 1.0 && u > 1e-9) bad = std::max(bad, u);
    }
    return bad;
}

// composite Simpson on [0,1]
inline double simpson01(const std::function<double(double)>& f, int nodes) {
    double total = 0.0;
    const double h = 1.0 / (nodes - 1);
    for (int i = 0; i + 2 < nodes; i += 2)
        total += (f(i * h) + 4.0 * f((i + 1) * h) + f((i + 2) * h)) * h / 3.0;
    return total;
}

inline double central_diff(const std::function<double(double)>& f, double x,
                           double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracle
