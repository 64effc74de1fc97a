#include "gsc/continuum.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace gsc {

namespace {

struct InvertSpec {
    const Box* image_box;  // box of the unknown
    bool solve_g;          // true: grad_G(u) = target, false: grad_F(v) = target
};

InvertSpec invert_spec(const SystemModel& model, Chart affine_chart) {
    switch (affine_chart) {
        case Chart::VAffine: return {&model.domain_D(), true};
        case Chart::UAffine: return {&model.domain_Dtilde(), false};
        default:
            throw std::invalid_argument("affine_invert: chart must be an affine chart");
    }
}

}  // namespace

Vec affine_invert(const SystemModel& model, Chart affine_chart, const Vec& target,
                  Vec seed, double tol, int max_iters, double step_tol) {
    const InvertSpec spec = invert_spec(model, affine_chart);
    const std::size_t n = model.dim();
    const auto fwd = [&](const Vec& x) {
        return spec.solve_g ? model.grad_G(x) : model.grad_F(x);
    };
    const auto jac = [&](const Vec& x) {
        return spec.solve_g ? model.hess_G(x) : model.hess_F(x);
    };

    Vec x = std::move(seed);
    spec.image_box->clamp(x);
    Vec r = fwd(x);
    for (std::size_t i = 0; i < n; ++i) r[i] -= target[i];
    double rn = linf_norm(r);
    for (int iter = 0; iter < max_iters; ++iter) {
        if (rn <= tol && step_tol == 0.0) return x;
        Vec step;
        try {
            step = lu_solve(jac(x), r);
        } catch (const SingularMatrixError&) {
            if (rn <= tol) return x;
            throw AffineInversionError("affine_invert: singular Hessian along Newton path",
                                       std::move(x));
        }
        if (rn <= tol && linf_norm(step) <= step_tol) return x;
        double alpha = 1.0;
        bool accepted = false;
        for (int half = 0; half < 50; ++half) {
            Vec trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - alpha * step[i];
            spec.image_box->clamp(trial);
            Vec rt = fwd(trial);
            for (std::size_t i = 0; i < n; ++i) rt[i] -= target[i];
            const double rtn = linf_norm(rt);
            if (rtn < rn) {
                x = std::move(trial);
                r = std::move(rt);
                rn = rtn;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (rn <= tol) return x;  // residual met, step no longer improves
            throw AffineInversionError("affine_invert: no progress (residual " +
                                           std::to_string(rn) + ")",
                                       std::move(x));
        }
    }
    if (rn <= tol) return x;
    throw AffineInversionError("affine_invert: iteration budget exhausted", std::move(x));
}

AffineMap::AffineMap(ModelPtr model)
    : model_(std::move(model)),
      seed_u_(model_->domain_D().center()),
      seed_v_(model_->domain_Dtilde().center()) {}

VectorState AffineMap::to_affine(const VectorState& s) const {
    switch (s.chart) {
        case Chart::U: {
            if (!model_->domain_D().contains(s.values, 1e-9))
                throw std::invalid_argument("to_affine: u outside its domain box");
            return {model_->grad_G(s.values), Chart::VAffine};
        }
        case Chart::V: {
            if (!model_->domain_Dtilde().contains(s.values, 1e-9))
                throw std::invalid_argument("to_affine: v outside its domain box");
            return {model_->grad_F(s.values), Chart::UAffine};
        }
        default:
            throw std::invalid_argument("to_affine: state already in an affine chart");
    }
}

VectorState AffineMap::from_affine(const VectorState& s) {
    // Tighter than the field solvers: the preimage error is amplified by the
    // inverse Hessian where the gradient map flattens out, so polish until
    // the Newton step itself is negligible.
    switch (s.chart) {
        case Chart::VAffine: {
            seed_u_ = affine_invert(*model_, Chart::VAffine, s.values, seed_u_, 1e-13, 80,
                                    1e-12);
            return {seed_u_, Chart::U};
        }
        case Chart::UAffine: {
            seed_v_ = affine_invert(*model_, Chart::UAffine, s.values, seed_v_, 1e-13, 80,
                                    1e-12);
            return {seed_v_, Chart::V};
        }
        default:
            throw std::invalid_argument("from_affine: state is not in an affine chart");
    }
}

ContinuumField::ContinuumField(int k, int n, std::size_t ncomp, Chart chart,
                               double m_coeff, const Vec& interior, Vec boundary)
    : k_(k), n_(n), ncomp_(ncomp), chart_(chart), m_coeff_(m_coeff),
      boundary_(std::move(boundary)) {
    if (k_ < 1 || k_ > kMaxCouplingDim)
        throw std::invalid_argument("continuum field: k must lie in [1,3]");
    if (n_ < 3) throw std::invalid_argument("continuum field: n must be >= 3");
    if (chart_ != Chart::UAffine && chart_ != Chart::VAffine)
        throw std::invalid_argument("continuum field: chart must be affine");
    if (!(m_coeff_ > 0.0))
        throw std::invalid_argument("continuum field: m_coeff must be positive");
    if (interior.size() != ncomp_ || boundary_.size() != ncomp_)
        throw std::invalid_argument("continuum field: component count mismatch");

    node_count_ = 1;
    for (int a = 0; a < k_; ++a) node_count_ *= static_cast<std::size_t>(n_);
    std::size_t s = 1;
    for (int a = k_; a-- > 0;) {
        strides_[a] = s;
        s *= static_cast<std::size_t>(n_);
    }
    values.resize(node_count_ * ncomp_);
    for (std::size_t node = 0; node < node_count_; ++node) {
        const Vec& src = is_boundary(node) ? boundary_ : interior;
        std::copy(src.begin(), src.end(), values.begin() + node * ncomp_);
    }
}

std::array<int, kMaxCouplingDim> ContinuumField::coords_of(std::size_t flat) const {
    std::array<int, kMaxCouplingDim> c{};
    for (int a = k_; a-- > 0;) {
        c[a] = static_cast<int>(flat % static_cast<std::size_t>(n_));
        flat /= static_cast<std::size_t>(n_);
    }
    return c;
}

std::size_t ContinuumField::flat_index(std::span<const int> coords) const {
    std::size_t flat = 0;
    for (int a = 0; a < k_; ++a)
        flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(coords[a]);
    return flat;
}

bool ContinuumField::is_boundary(std::size_t flat) const {
    for (int a = k_; a-- > 0;) {
        const int c = static_cast<int>(flat % static_cast<std::size_t>(n_));
        if (c == 0 || c == n_ - 1) return true;
        flat /= static_cast<std::size_t>(n_);
    }
    return false;
}

Vec ContinuumField::node(std::size_t flat) const {
    return Vec(values.begin() + flat * ncomp_, values.begin() + (flat + 1) * ncomp_);
}

double field_d1(const ContinuumField& f, std::size_t flat, int axis, std::size_t c) {
    const double h = f.dx();
    const std::size_t str = f.strides()[axis] * f.ncomp();
    const std::size_t i = flat * f.ncomp() + c;
    const int coord = f.coords_of(flat)[axis];
    if (coord == 0)
        return (-3.0 * f.values[i] + 4.0 * f.values[i + str] - f.values[i + 2 * str]) /
               (2.0 * h);
    if (coord == f.n() - 1)
        return (3.0 * f.values[i] - 4.0 * f.values[i - str] + f.values[i - 2 * str]) /
               (2.0 * h);
    return (f.values[i + str] - f.values[i - str]) / (2.0 * h);
}

double field_d2(const ContinuumField& f, std::size_t flat, int axis, std::size_t c) {
    const double h = f.dx();
    const std::size_t str = f.strides()[axis] * f.ncomp();
    const std::size_t i = flat * f.ncomp() + c;
    return (f.values[i + str] - 2.0 * f.values[i] + f.values[i - str]) / (h * h);
}

Vec coupling_operator(const SystemModel& model, const ContinuumField& field,
                      std::size_t flat) {
    if (field.is_boundary(flat))
        throw std::invalid_argument("coupling_operator: node must be interior");
    const std::size_t n = field.ncomp();
    const Vec w = field.node(flat);
    const Mat h = field.chart() == Chart::VAffine ? model.hess_F(w) : model.hess_G(w);
    const Tensor3 t = field.chart() == Chart::VAffine ? model.third_F(w) : model.third_G(w);

    Vec out(n, 0.0);
    Vec d1(n), d2(n);
    for (int ax = 0; ax < field.k(); ++ax) {
        for (std::size_t b = 0; b < n; ++b) {
            d1[b] = field_d1(field, flat, ax, b);
            d2[b] = field_d2(field, flat, ax, b);
        }
        for (std::size_t a = 0; a < n; ++a) {
            double s = 0.0;
            for (std::size_t b = 0; b < n; ++b) {
                s += h(a, b) * d2[b];
                for (std::size_t c = 0; c < n; ++c)
                    s += 0.5 * t(a, b, c) * d1[b] * d1[c];
            }
            out[a] += s;
        }
    }
    return out;
}

namespace {

std::string node_string(const ContinuumField& f, std::size_t flat) {
    const auto c = f.coords_of(flat);
    std::ostringstream os;
    os << "(";
    for (int a = 0; a < f.k(); ++a) {
        if (a) os << ",";
        os << f.x_of(c[a]);
    }
    os << ")";
    return os.str();
}

}  // namespace

void pde_refresh_preimages(const SystemModel& model, const ContinuumField& field,
                           PdeWorkspace& ws, Execution exec) {
    const std::size_t nc = field.ncomp();
    const std::size_t nodes = field.node_count();
    ws.preimage.resize(nodes * nc);
    if (!ws.seeded) {
        // First pass sweeps the grid sequentially so each node seeds from its
        // predecessor.
        Vec seed = field.chart() == Chart::VAffine ? model.domain_D().center()
                                                   : model.domain_Dtilde().center();
        for (std::size_t node = 0; node < nodes; ++node) {
            seed = affine_invert(model, field.chart(), field.node(node), seed);
            std::copy(seed.begin(), seed.end(), ws.preimage.begin() + node * nc);
        }
        ws.seeded = true;
        return;
    }
    // exceptions may not cross the parallel region; capture and rethrow
    std::exception_ptr error = nullptr;
    std::atomic<bool> failed{false};
    parallel_for(static_cast<std::int64_t>(nodes), exec, [&](std::int64_t s) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
            const std::size_t node = static_cast<std::size_t>(s);
            Vec seed(ws.preimage.begin() + node * nc,
                     ws.preimage.begin() + (node + 1) * nc);
            const Vec sol =
                affine_invert(model, field.chart(), field.node(node), std::move(seed));
            std::copy(sol.begin(), sol.end(), ws.preimage.begin() + node * nc);
        } catch (...) {
            if (!failed.exchange(true)) error = std::current_exception();
        }
    });
    if (error) std::rethrow_exception(error);
}

namespace {

// Rate of change at an interior node; preimage must match the current field.
void pde_rate(const SystemModel& model, const ContinuumField& field,
              const Vec& preimage, std::size_t flat, Vec& rate) {
    const std::size_t n = field.ncomp();
    const Vec w = field.node(flat);
    const Vec p(preimage.begin() + flat * n, preimage.begin() + (flat + 1) * n);
    const Vec c = coupling_operator(model, field, flat);
    const double m = field.m_coeff();

    Vec bracket(n);
    if (field.chart() == Chart::VAffine) {
        const Vec fw = model.grad_F(w);
        for (std::size_t b = 0; b < n; ++b) bracket[b] = -(p[b] - fw[b]) + m * c[b];
        const Mat g = model.hess_G(p);
        rate = mat_vec(g, bracket);
    } else {
        const Vec gw = model.grad_G(w);
        for (std::size_t b = 0; b < n; ++b) bracket[b] = -(p[b] - gw[b]) + m * c[b];
        const Mat f = model.hess_F(p);
        rate = mat_vec(f, bracket);
    }
}

}  // namespace

PdeStepInfo pde_step(const SystemModel& model, ContinuumField& field, double dt,
                     PdeWorkspace& ws, Execution exec) {
    if (!(dt > 0.0)) throw std::invalid_argument("pde_step: dt must be positive");
    pde_refresh_preimages(model, field, ws, exec);
    return pde_step_prepared(model, field, dt, ws, exec);
}

PdeStepInfo pde_step_prepared(const SystemModel& model, ContinuumField& field,
                              double dt, PdeWorkspace& ws, Execution exec) {
    if (!(dt > 0.0)) throw std::invalid_argument("pde_step: dt must be positive");
    const std::size_t nc = field.ncomp();
    const std::size_t nodes = field.node_count();
    ws.next.resize(nodes * nc);
    ws.rate_buf.assign(nodes, 0.0);
    const Box& box = model.chart_box(field.chart());

    parallel_for(static_cast<std::int64_t>(nodes), exec, [&](std::int64_t s) {
        const std::size_t node = static_cast<std::size_t>(s);
        if (field.is_boundary(node)) {
            std::copy(field.boundary_value().begin(), field.boundary_value().end(),
                      ws.next.begin() + node * nc);
            return;
        }
        Vec rate;
        pde_rate(model, field, ws.preimage, node, rate);
        ws.rate_buf[node] = linf_norm(rate);
        for (std::size_t c = 0; c < nc; ++c) {
            double v = field.values[node * nc + c] + dt * rate[c];
            v = std::min(box.hi[c], std::max(box.lo[c], v));
            ws.next[node * nc + c] = v;
        }
    });

    for (std::size_t node = 0; node < nodes; ++node) {
        if (!std::isfinite(ws.rate_buf[node]))
            throw std::domain_error("pde_step: non-finite rate at node " +
                                    node_string(field, node) + " (dt too large?)");
    }

    PdeStepInfo info;
    for (double r : ws.rate_buf) info.max_rate = std::max(info.max_rate, r);
    info.max_change = 0.0;
    for (std::size_t i = 0; i < ws.next.size(); ++i)
        info.max_change = std::max(info.max_change, std::abs(ws.next[i] - field.values[i]));
    field.values.swap(ws.next);
    return info;
}

double pde_auto_dt(const SystemModel& model, double m_coeff, double dx) {
    const std::size_t n = model.dim();
    std::mt19937_64 rng(9001);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto sample_box = [&](const Box& box, std::size_t idx, std::size_t count) {
        Vec x(n);
        if (n == 1) {
            x[0] = box.lo[0] + box.width(0) * static_cast<double>(idx) /
                                   static_cast<double>(count - 1);
        } else {
            for (std::size_t i = 0; i < n; ++i)
                x[i] = box.lo[i] + box.width(i) * unit(rng);
        }
        return x;
    };

    const std::size_t count = n == 1 ? 65 : 128;
    double lmax = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        Vec u = sample_box(model.domain_D(), i, count);
        Vec v = model.grad_G(u);
        model.domain_Dtilde().clamp(v);
        for (double e : product_eigenvalues(model.hess_F(v), model.hess_G(u)))
            lmax = std::max(lmax, std::abs(e));
        // dual pairing: hessians evaluated along the other gradient image
        Vec vv = sample_box(model.domain_Dtilde(), i, count);
        Vec uu = model.grad_F(vv);
        model.domain_D().clamp(uu);
        for (double e : product_eigenvalues(model.hess_F(vv), model.hess_G(uu)))
            lmax = std::max(lmax, std::abs(e));
    }
    return 0.2 * dx * dx / (m_coeff * lmax + dx * dx);
}

double energy_functional(const SystemModel& model, const ContinuumField& field,
                         const Vec* preimage, Execution exec) {
    const std::size_t nc = field.ncomp();
    const std::size_t nodes = field.node_count();
    const double m = field.m_coeff();
    const double dx = field.dx();

    Vec own_preimage;
    if (!preimage) {
        PdeWorkspace tmp;
        pde_refresh_preimages(model, field, tmp, exec);
        own_preimage = std::move(tmp.preimage);
        preimage = &own_preimage;
    }

    double cell = 1.0;
    for (int a = 0; a < field.k(); ++a) cell *= dx;

    Vec integrand(nodes);
    parallel_for(static_cast<std::int64_t>(nodes), exec, [&](std::int64_t s) {
        const std::size_t node = static_cast<std::size_t>(s);
        const Vec w = field.node(node);
        const Vec p((*preimage).begin() + node * nc, (*preimage).begin() + (node + 1) * nc);
        const double pot = field.chart() == Chart::VAffine ? potential(model, p)
                                                           : dual_potential(model, p);
        const Mat h = field.chart() == Chart::VAffine ? model.hess_F(w) : model.hess_G(w);
        double grad_term = 0.0;
        for (int ax = 0; ax < field.k(); ++ax) {
            Vec d1(nc);
            for (std::size_t c = 0; c < nc; ++c) d1[c] = field_d1(field, node, ax, c);
            for (std::size_t a = 0; a < nc; ++a)
                for (std::size_t b = 0; b < nc; ++b) grad_term += d1[a] * d1[b] * h(a, b);
        }
        double weight = cell;
        const auto coords = field.coords_of(node);
        for (int ax = 0; ax < field.k(); ++ax)
            if (coords[ax] == 0 || coords[ax] == field.n() - 1) weight *= 0.5;
        integrand[node] = weight * (pot + 0.5 * m * grad_term);
    });
    return pairwise_sum(integrand);
}

PdeRunResult run_pde(const SystemModel& model, ContinuumField field,
                     const PdeRunOptions& opts) {
    PdeRunResult out{std::move(field), {}, false, 0, 0.0, 0.0, 0.0};
    out.dt = opts.dt > 0.0 ? opts.dt
                           : pde_auto_dt(model, out.field.m_coeff(), out.field.dx());

    PdeWorkspace ws;
    double prev_energy = 0.0;
    bool have_prev = false;
    for (long step = 0; step < opts.max_steps; ++step) {
        double energy = 0.0;
        const bool record = opts.monitor_energy &&
                            (opts.energy_every <= 1 || step % opts.energy_every == 0);
        pde_refresh_preimages(model, out.field, ws, opts.exec);
        if (record) {
            energy = energy_functional(model, out.field, &ws.preimage, opts.exec);
            if (have_prev)
                out.max_energy_increase =
                    std::max(out.max_energy_increase, energy - prev_energy);
            prev_energy = energy;
            have_prev = true;
        }
        const PdeStepInfo info = pde_step_prepared(model, out.field, out.dt, ws, opts.exec);
        if (record) out.history.push_back({step, energy, info.max_rate});
        out.steps = step + 1;
        if (opts.snapshot_every > 0 && opts.snapshot &&
            (step + 1) % opts.snapshot_every == 0)
            opts.snapshot(out.field, step + 1);
        if (info.max_change < opts.stop_eps) {
            out.converged = true;
            break;
        }
    }
    pde_refresh_preimages(model, out.field, ws, opts.exec);
    out.final_energy = energy_functional(model, out.field, &ws.preimage, opts.exec);
    return out;
}

ContinuumField transform_to_u_chart(const SystemModel& model,
                                    const ContinuumField& field) {
    if (field.chart() != Chart::VAffine)
        throw std::invalid_argument("transform_to_u_chart: field must be in v_tilde chart");
    Vec boundary = model.grad_F(field.boundary_value());
    ContinuumField out(field.k(), field.n(), field.ncomp(), Chart::UAffine,
                       field.m_coeff(), boundary, boundary);
    for (std::size_t node = 0; node < field.node_count(); ++node) {
        const Vec u = model.grad_F(field.node(node));
        std::copy(u.begin(), u.end(), out.values.begin() + node * field.ncomp());
    }
    return out;
}

namespace {

// Inverse-map sweep for the diagnostic checks, polished past the residual
// criterion so degenerate corners do not leak square-root errors.
Vec diagnostic_preimages(const SystemModel& model, const ContinuumField& field) {
    const std::size_t nc = field.ncomp();
    Vec out(field.node_count() * nc);
    Vec seed = field.chart() == Chart::VAffine ? model.domain_D().center()
                                               : model.domain_Dtilde().center();
    for (std::size_t node = 0; node < field.node_count(); ++node) {
        seed = affine_invert(model, field.chart(), field.node(node), std::move(seed),
                             1e-13, 80, 1e-12);
        std::copy(seed.begin(), seed.end(), out.begin() + node * nc);
    }
    return out;
}

}  // namespace

Vec bvp_residual(const SystemModel& model, const ContinuumField& field,
                 const Vec* preimage) {
    if (field.chart() != Chart::UAffine)
        throw std::invalid_argument("bvp_residual: field must be in u_tilde chart");
    const std::size_t nc = field.ncomp();
    const std::size_t nodes = field.node_count();

    Vec own;
    if (!preimage) {
        own = diagnostic_preimages(model, field);
        preimage = &own;
    }

    Vec out(nodes * nc, 0.0);
    for (std::size_t node = 0; node < nodes; ++node) {
        if (field.is_boundary(node)) continue;
        const Vec w = field.node(node);
        const Vec p((*preimage).begin() + node * nc, (*preimage).begin() + (node + 1) * nc);
        const Vec gw = model.grad_G(w);
        const Vec c = coupling_operator(model, field, node);
        for (std::size_t a = 0; a < nc; ++a)
            out[node * nc + a] = field.m_coeff() * c[a] - (p[a] - gw[a]);
    }
    return out;
}

ConservationResult conservation_check(const SystemModel& model,
                                      const ContinuumField& field,
                                      const Vec* preimage) {
    if (field.chart() != Chart::UAffine)
        throw std::invalid_argument("conservation_check: field must be in u_tilde chart");
    if (field.k() != 1)
        throw std::invalid_argument("conservation_check: requires a K=1 field");
    const std::size_t nc = field.ncomp();
    const std::size_t nodes = field.node_count();

    Vec own;
    if (!preimage) {
        own = diagnostic_preimages(model, field);
        preimage = &own;
    }

    ConservationResult out;
    out.energy.resize(nodes);
    Vec d1(nc);
    for (std::size_t node = 0; node < nodes; ++node) {
        const Vec w = field.node(node);
        const Vec p((*preimage).begin() + node * nc, (*preimage).begin() + (node + 1) * nc);
        for (std::size_t c = 0; c < nc; ++c) d1[c] = field_d1(field, node, 0, c);
        const Mat g = model.hess_G(w);
        double kinetic = 0.0;
        for (std::size_t a = 0; a < nc; ++a)
            for (std::size_t b = 0; b < nc; ++b) kinetic += d1[a] * d1[b] * g(a, b);
        out.energy[node] = dual_potential(model, p) - 0.5 * field.m_coeff() * kinetic;
    }
    out.boundary_energy = out.energy.front();
    for (std::size_t node = 1; node + 1 < nodes; ++node)
        out.max_drift =
            std::max(out.max_drift, std::abs(out.energy[node] - out.boundary_energy));
    return out;
}

Mat energy_tensor(const SystemModel& model, const ContinuumField& field,
                  std::size_t flat, const Vec* preimage) {
    if (field.chart() != Chart::UAffine)
        throw std::invalid_argument("energy_tensor: field must be in u_tilde chart");
    if (field.is_boundary(flat))
        throw std::invalid_argument("energy_tensor: node must be interior");
    const std::size_t nc = field.ncomp();
    const Vec w = field.node(flat);
    Vec p;
    if (preimage)
        p = Vec(preimage->begin() + flat * nc, preimage->begin() + (flat + 1) * nc);
    else
        p = affine_invert(model, Chart::UAffine, w, model.domain_Dtilde().center(), 1e-13,
                          80, 1e-12);

    const Mat g = model.hess_G(w);
    const int k = field.k();
    std::vector<Vec> d1(static_cast<std::size_t>(k), Vec(nc));
    for (int ax = 0; ax < k; ++ax)
        for (std::size_t c = 0; c < nc; ++c) d1[ax][c] = field_d1(field, flat, ax, c);

    const double m = field.m_coeff();
    double kinetic = 0.0;
    for (int ax = 0; ax < k; ++ax)
        for (std::size_t a = 0; a < nc; ++a)
            for (std::size_t b = 0; b < nc; ++b) kinetic += d1[ax][a] * d1[ax][b] * g(a, b);
    const double lagrangian = dual_potential(model, p) + 0.5 * m * kinetic;

    Mat t(static_cast<std::size_t>(k));
    for (int alpha = 0; alpha < k; ++alpha)
        for (int beta = 0; beta < k; ++beta) {
            double s = 0.0;
            for (std::size_t a = 0; a < nc; ++a)
                for (std::size_t b = 0; b < nc; ++b)
                    s += d1[alpha][a] * d1[beta][b] * g(a, b);
            t(alpha, beta) = m * s - (alpha == beta ? lagrangian : 0.0);
        }
    return t;
}

Tensor3 verify_affine_connection(const SystemModel& model, const Vec& u) {
    const std::size_t n = model.dim();
    const Mat g = model.hess_G(u);
    const Vec ev = sym_eigenvalues(g);
    double emax = 0.0;
    for (double e : ev) emax = std::max(emax, std::abs(e));
    if (ev.front() <= 1e-12 * std::max(1.0, emax))
        throw SingularHessianError("verify_affine_connection: Hessian of G near-singular");

    Mat ginv(n);
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n, 0.0);
        e[j] = 1.0;
        const Vec col = lu_solve(g, e);
        for (std::size_t i = 0; i < n; ++i) ginv(i, j) = col[i];
    }

    const Tensor3 third = model.third_G(u);

    // d g_ad / d u^e by a central difference of the Hessian, then contracted
    // with g^{ec} for the affine-chart derivative. The step balances the
    // truncation term against rounding noise under the g^{-2} amplification.
    Tensor3 dgdu(n);
    const Box& box = model.domain_D();
    for (std::size_t e = 0; e < n; ++e) {
        const double h = 3e-6 * box.width(e);
        Vec up = u, um = u;
        up[e] += h;
        um[e] -= h;
        const Mat hp = model.hess_G(up), hm = model.hess_G(um);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t d = 0; d < n; ++d)
                dgdu(a, d, e) = (hp(a, d) - hm(a, d)) / (2.0 * h);
    }

    Tensor3 gamma(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                double term1 = 0.0;
                for (std::size_t d = 0; d < n; ++d)
                    for (std::size_t e = 0; e < n; ++e)
                        term1 += ginv(d, b) * ginv(e, c) * third(a, d, e);
                double term2 = 0.0;
                for (std::size_t d = 0; d < n; ++d) {
                    double dg_dvc = 0.0;
                    for (std::size_t e = 0; e < n; ++e) dg_dvc += dgdu(a, d, e) * ginv(e, c);
                    term2 += dg_dvc * ginv(d, b);
                }
                gamma(a, b, c) = term1 - term2;
            }
    return gamma;
}

std::vector<ContinuumProfileSample> continuum_profile(const SystemModel& model,
                                                      const ContinuumField& field,
                                                      int axis) {
    if (axis < 0 || axis >= field.k())
        throw std::invalid_argument("continuum_profile: axis out of range");
    std::vector<ContinuumProfileSample> out;
    out.reserve(static_cast<std::size_t>(field.n()));
    int coords[kMaxCouplingDim] = {0, 0, 0};
    for (int a = 0; a < field.k(); ++a) coords[a] = (field.n() - 1) / 2;
    Vec seed = field.chart() == Chart::VAffine ? model.domain_D().center()
                                               : model.domain_Dtilde().center();
    for (int i = 0; i < field.n(); ++i) {
        coords[axis] = i;
        const std::size_t flat = field.flat_index(std::span<const int>(coords, field.k()));
        ContinuumProfileSample s;
        s.x = field.x_of(i);
        s.value = field.node(flat);
        seed = affine_invert(model, field.chart(), s.value, std::move(seed), 1e-13, 80,
                             1e-12);
        s.preimage = seed;
        s.perf = field.chart() == Chart::VAffine ? model.perf(s.preimage)
                                                 : model.perf(s.value);
        out.push_back(std::move(s));
    }
    return out;
}

double max_interior_deviation(const ContinuumField& field, const Vec& ref) {
    double dev = 0.0;
    for (std::size_t node = 0; node < field.node_count(); ++node) {
        if (field.is_boundary(node)) continue;
        for (std::size_t c = 0; c < field.ncomp(); ++c)
            dev = std::max(dev,
                           std::abs(field.values[node * field.ncomp() + c] - ref[c]));
    }
    return dev;
}

namespace {

void put_u64_le(std::ofstream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}

}  // namespace

void write_grid_snapshot(const std::string& path, const ContinuumField& field) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path);
    put_u64_le(os, static_cast<std::uint64_t>(field.k()));
    put_u64_le(os, static_cast<std::uint64_t>(field.n()));
    put_u64_le(os, static_cast<std::uint64_t>(field.ncomp()));
    for (double d : field.values) put_u64_le(os, std::bit_cast<std::uint64_t>(d));
    if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

}  // namespace gsc
