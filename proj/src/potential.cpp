#include "gsc/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace gsc {

namespace {

void check_finite(const Vec& x, const char* what) {
    if (!all_finite(x)) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

void check_chart(const VectorState& s, Chart expected, const char* what) {
    if (s.chart != expected)
        throw std::invalid_argument(std::string(what) + ": expected chart " +
                                    chart_name(expected) + ", got " + chart_name(s.chart));
}

}  // namespace

double divergence(const SystemModel& model, const Vec& u, const Vec& v) {
    check_finite(u, "divergence");
    check_finite(v, "divergence");
    return model.eval_G(u) + model.eval_F(v) - dot(u, v);
}

double divergence(const SystemModel& model, const VectorState& u,
                  const VectorState& v) {
    check_chart(u, Chart::U, "divergence");
    check_chart(v, Chart::V, "divergence");
    return divergence(model, u.values, v.values);
}

double potential(const SystemModel& model, const Vec& u) {
    const Vec v = model.grad_G(u);
    return dot(u, v) - model.eval_G(u) - model.eval_F(v);
}

double potential(const SystemModel& model, const VectorState& u) {
    check_chart(u, Chart::U, "potential");
    return potential(model, u.values);
}

double dual_potential(const SystemModel& model, const Vec& v) {
    const Vec u = model.grad_F(v);
    return dot(u, v) - model.eval_G(u) - model.eval_F(v);
}

double dual_potential(const SystemModel& model, const VectorState& v) {
    check_chart(v, Chart::V, "dual_potential");
    return dual_potential(model, v.values);
}

Vec potential_gradient(const SystemModel& model, const Vec& u) {
    const std::size_t n = model.dim();
    const Vec v = model.grad_G(u);
    const Vec fu = model.grad_F(v);
    Vec w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = u[i] - fu[i];
    return mat_vec(model.hess_G(u), w);
}

Vec potential_gradient(const SystemModel& model, const VectorState& u) {
    check_chart(u, Chart::U, "potential_gradient");
    return potential_gradient(model, u.values);
}

Vec dual_potential_gradient(const SystemModel& model, const Vec& v) {
    const std::size_t n = model.dim();
    const Vec u = model.grad_F(v);
    const Vec gv = model.grad_G(u);
    Vec w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = v[i] - gv[i];
    return mat_vec(model.hess_F(v), w);
}

const char* fixed_point_class_name(FixedPointClass c) {
    switch (c) {
        case FixedPointClass::Stable: return "STABLE";
        case FixedPointClass::Unstable: return "UNSTABLE";
        case FixedPointClass::Degenerate: return "DEGENERATE";
    }
    return "?";
}

bool FixedPointReport::has_stable() const {
    for (const auto& p : points)
        if (p.cls == FixedPointClass::Stable) return true;
    return false;
}

std::optional<std::size_t> FixedPointReport::best_perf_stable() const {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].cls != FixedPointClass::Stable) continue;
        if (!best || points[i].perf < points[*best].perf) best = i;
    }
    return best;
}

namespace {

Vec de_residual(const SystemModel& model, const Vec& u) {
    const Vec fu = model.grad_F(model.grad_G(u));
    Vec r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] - fu[i];
    return r;
}

// Damped Newton on the DE residual; nullopt when no convergence.
std::optional<Vec> refine_fixed_point(const SystemModel& model, Vec u) {
    const std::size_t n = model.dim();
    const Box& box = model.domain_D();
    Vec r = de_residual(model, u);
    double rn = linf_norm(r);
    for (int iter = 0; iter < 100; ++iter) {
        if (rn < 1e-13) return u;
        const Vec v = model.grad_G(u);
        const Mat jf = model.hess_F(v);
        const Mat jg = model.hess_G(u);
        Mat jac(n);
        const Mat fg = mat_mul(jf, jg);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                jac(i, j) = (i == j ? 1.0 : 0.0) - fg(i, j);
        Vec step;
        try {
            step = lu_solve(jac, r);
        } catch (const SingularMatrixError&) {
            return std::nullopt;
        }
        double alpha = 1.0;
        bool accepted = false;
        for (int half = 0; half < 40; ++half) {
            Vec trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] - alpha * step[i];
            box.clamp(trial);
            const Vec rt = de_residual(model, trial);
            const double rtn = linf_norm(rt);
            if (rtn < rn) {
                u = std::move(trial);
                r = rt;
                rn = rtn;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) return std::nullopt;
    }
    return rn < 1e-13 ? std::optional<Vec>(u) : std::nullopt;
}

FixedPointClass classify(const SystemModel& model, const Vec& u, double* rho_out) {
    const Vec v = model.grad_G(u);
    const Mat f = model.hess_F(v);
    const Mat g = model.hess_G(u);

    // Near-singular Hessian of G: the gradient-flow reading of stability
    // breaks down there, so flag rather than classify.
    const Vec gev = sym_eigenvalues(g);
    double gmax = 0.0;
    for (double e : gev) gmax = std::max(gmax, std::abs(e));
    if (gev.front() <= 1e-12 * std::max(1.0, gmax)) {
        const Vec prod = product_eigenvalues(f, g);
        double rho = 0.0;
        for (double e : prod) rho = std::max(rho, std::abs(e));
        if (rho_out) *rho_out = rho;
        return FixedPointClass::Degenerate;
    }

    const Vec prod = product_eigenvalues(f, g);
    double rho = 0.0;
    for (double e : prod) rho = std::max(rho, std::abs(e));
    if (rho_out) *rho_out = rho;
    if (rho < 1.0 - 1e-9) return FixedPointClass::Stable;
    if (rho > 1.0 + 1e-9) return FixedPointClass::Unstable;
    return FixedPointClass::Degenerate;
}

}  // namespace

FixedPointReport find_fixed_points(const SystemModel& model, int grid_resolution) {
    if (grid_resolution < 3)
        throw std::invalid_argument("find_fixed_points: grid_resolution must be >= 3");
    const std::size_t n = model.dim();
    const Box& box = model.domain_D();
    const std::size_t r = static_cast<std::size_t>(grid_resolution);

    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > 20'000'000 / r)
            throw std::invalid_argument("find_fixed_points: grid too large for this dimension");
        total *= r;
    }

    const auto grid_point = [&](std::size_t flat) {
        Vec u(n);
        for (std::size_t ax = n; ax-- > 0;) {
            const std::size_t idx = flat % r;
            flat /= r;
            u[ax] = box.lo[ax] + box.width(ax) * static_cast<double>(idx) /
                                     static_cast<double>(r - 1);
        }
        return u;
    };

    std::vector<double> norms(total);
    std::vector<Vec> residuals;
    if (n == 1) residuals.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        const Vec res = de_residual(model, grid_point(i));
        norms[i] = linf_norm(res);
        if (n == 1) residuals.push_back(res);
    }

    // Seeds: local minima of |residual| over axis neighbors, plus sign-change
    // midpoints in the scalar case (catches crossing roots between nodes).
    std::vector<Vec> seeds;
    std::vector<std::size_t> strides(n, 1);
    for (std::size_t ax = n; ax-- > 1;) strides[ax - 1] = strides[ax] * r;
    for (std::size_t i = 0; i < total; ++i) {
        bool is_min = true;
        for (std::size_t ax = 0; ax < n && is_min; ++ax) {
            const std::size_t idx = (i / strides[ax]) % r;
            if (idx > 0 && norms[i - strides[ax]] < norms[i]) is_min = false;
            if (idx + 1 < r && norms[i + strides[ax]] < norms[i]) is_min = false;
        }
        if (is_min) seeds.push_back(grid_point(i));
    }
    if (n == 1) {
        for (std::size_t i = 0; i + 1 < total; ++i) {
            if (residuals[i][0] == 0.0) continue;
            if (residuals[i][0] * residuals[i + 1][0] < 0.0) {
                Vec a = grid_point(i), b = grid_point(i + 1);
                seeds.push_back({0.5 * (a[0] + b[0])});
            }
        }
    }

    std::vector<Vec> roots;
    for (const Vec& s : seeds) {
        const auto refined = refine_fixed_point(model, s);
        if (!refined) continue;
        bool duplicate = false;
        for (const Vec& known : roots)
            if (linf_diff(known, *refined) < 1e-7) {
                duplicate = true;
                break;
            }
        if (!duplicate) roots.push_back(*refined);
    }

    FixedPointReport report;
    for (Vec& u : roots) {
        FixedPoint p;
        p.v = VectorState{model.grad_G(u), Chart::V};
        p.potential_value = potential(model, u);
        p.perf = model.perf(u);
        p.cls = classify(model, u, &p.spectral_radius);
        p.u = VectorState{std::move(u), Chart::U};
        report.points.push_back(std::move(p));
    }
    std::sort(report.points.begin(), report.points.end(),
              [](const FixedPoint& a, const FixedPoint& b) {
                  return a.potential_value < b.potential_value;
              });

    // good: unique stable strict minimizer of V over all stationary points.
    std::optional<std::size_t> vmin_stable;
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        if (report.points[i].cls != FixedPointClass::Stable) continue;
        if (!vmin_stable ||
            report.points[i].potential_value < report.points[*vmin_stable].potential_value)
            vmin_stable = i;
    }
    if (vmin_stable) {
        bool unique_min = true;
        for (std::size_t i = 0; i < report.points.size(); ++i) {
            if (i == *vmin_stable) continue;
            if (report.points[i].potential_value <=
                report.points[*vmin_stable].potential_value + 1e-12) {
                unique_min = false;
                break;
            }
        }
        if (unique_min) report.good = vmin_stable;
    }

    // bad: stable point with the worst perf, when it is genuinely worse.
    std::optional<std::size_t> worst, best;
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        if (report.points[i].cls != FixedPointClass::Stable) continue;
        if (!worst || report.points[i].perf > report.points[*worst].perf) worst = i;
        if (!best || report.points[i].perf < report.points[*best].perf) best = i;
    }
    if (worst && best && report.points[*worst].perf > report.points[*best].perf + 1e-12)
        report.bad = worst;

    return report;
}

FlowResult gradient_flow(const SystemModel& model, Vec u0, double dt,
                         long max_steps, double residual_tol) {
    const Box& box = model.domain_D();
    FlowResult out;
    out.u = std::move(u0);
    double v_prev = potential(model, out.u);
    for (long step = 0; step < max_steps; ++step) {
        const Vec grad = potential_gradient(model, out.u);
        Vec dir;
        try {
            dir = lu_solve(model.hess_G(out.u), grad);
        } catch (const SingularMatrixError&) {
            break;  // flow reached the singular set; report as-is
        }
        if (linf_norm(dir) < residual_tol) {
            out.converged = true;
            out.steps = step;
            return out;
        }
        for (std::size_t i = 0; i < out.u.size(); ++i) out.u[i] -= dt * dir[i];
        box.clamp(out.u);
        const double v_now = potential(model, out.u);
        out.max_potential_increase = std::max(out.max_potential_increase, v_now - v_prev);
        v_prev = v_now;
        out.steps = step + 1;
    }
    const Vec grad = potential_gradient(model, out.u);
    Vec dir(out.u.size(), std::numeric_limits<double>::infinity());
    try {
        dir = lu_solve(model.hess_G(out.u), grad);
    } catch (const SingularMatrixError&) {
    }
    out.converged = linf_norm(dir) < residual_tol;
    return out;
}

ModelFamily regular_bec_family(int l, int r) {
    ModelFamily fam;
    fam.name = "regular_bec(" + std::to_string(l) + "," + std::to_string(r) + ")";
    fam.build = [l, r](double eps) { return make_regular_bec(l, r, eps); };
    fam.lo = 0.0;
    fam.hi = 1.0;
    fam.good_state = Vec{0.0};
    return fam;
}

namespace {

bool below_threshold(const ModelFamily& family, ThresholdKind kind, double param,
                     const ThresholdOptions& opts) {
    const ModelPtr model = family.build(param);
    if (kind == ThresholdKind::BP) {
        const Vec worst = model->domain_D().hi;
        const Vec end = iterate_de(*model, worst, opts.de_iters, 1e-15);
        return linf_diff(end, family.good_state) < opts.conv_tol;
    }
    const FixedPointReport report = find_fixed_points(*model, opts.grid_resolution);
    const auto cand = report.best_perf_stable();
    if (!cand) return false;
    const double vc = report.points[*cand].potential_value;
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        if (i == *cand) continue;
        if (report.points[i].potential_value <= vc + 1e-12) return false;
    }
    return true;
}

}  // namespace

double threshold_scan(const ModelFamily& family, ThresholdKind kind, double tol,
                      const ThresholdOptions& opts) {
    if (!(tol > 0.0)) throw std::invalid_argument("threshold_scan: tol must be positive");
    double lo = family.lo, hi = family.hi;
    const bool lo_side = below_threshold(family, kind, lo, opts);
    const bool hi_side = below_threshold(family, kind, hi, opts);
    if (lo_side == hi_side)
        throw NonBracketingError("threshold_scan: endpoints on the same side, no bracket");
    while ((hi - lo) / 2.0 > tol) {
        const double mid = 0.5 * (lo + hi);
        if (below_threshold(family, kind, mid, opts) == lo_side)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace gsc
