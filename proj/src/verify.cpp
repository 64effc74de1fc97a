#include "gsc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace gsc {

Check make_check(std::string name, double measured, double bound, CheckCmp cmp) {
    Check c;
    c.name = std::move(name);
    c.measured = measured;
    c.bound = bound;
    c.cmp = cmp;
    c.pass = cmp == CheckCmp::LE ? measured <= bound : measured >= bound;
    return c;
}

bool all_pass(const std::vector<Check>& checks) {
    for (const Check& c : checks)
        if (!c.pass) return false;
    return true;
}

namespace {

Vec sample_interior(const Box& box, std::mt19937_64& rng, double inset) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vec x(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
        const double w = box.width(i);
        x[i] = box.lo[i] + w * (inset + (1.0 - 2.0 * inset) * unit(rng));
    }
    return x;
}

// |a-b| relative to the larger magnitude, floored at scale 1.
double rel_dev(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

struct NamedModel {
    std::string label;
    ModelPtr model;
};

std::string format_label(double eps) {
    std::string s = std::to_string(eps);
    while (s.size() > 4 && s.back() == '0') s.pop_back();
    return s;
}

std::vector<NamedModel> structural_models() {
    return {
        {"bec(3,6,0.45)", make_regular_bec(3, 6, 0.45)},
        {"bec(3,6,0.50)", make_regular_bec(3, 6, 0.50)},
        {"bec(4,10,0.60)", make_regular_bec(4, 10, 0.60)},
        {"product", make_product_model({make_regular_bec(3, 6, 0.45),
                                        make_regular_bec(3, 6, 0.50)})},
    };
}

std::vector<NamedModel> instance_models() {
    std::vector<NamedModel> out;
    for (double eps : {0.40, 0.45, 0.50, 0.55}) {
        out.push_back({"bec(3,6," + format_label(eps) + ")", make_regular_bec(3, 6, eps)});
    }
    out.push_back({"product", make_product_model({make_regular_bec(3, 6, 0.45),
                                                  make_regular_bec(3, 6, 0.50)})});
    return out;
}

// ---- model module checks ----

Check derivative_consistency(const NamedModel& nm, std::mt19937_64& rng) {
    const SystemModel& m = *nm.model;
    const std::size_t n = m.dim();
    double worst = 0.0;
    const auto probe_side = [&](const Box& box, auto eval, auto grad, auto hess,
                                auto third) {
        for (int pt = 0; pt < 100; ++pt) {
            const Vec x = sample_interior(box, rng, 0.05);
            const Vec g = grad(x);
            const Mat h = hess(x);
            const Tensor3 t = third(x);
            for (std::size_t i = 0; i < n; ++i) {
                const double step = 1e-5 * box.width(i);
                Vec xp = x, xm = x;
                xp[i] += step;
                xm[i] -= step;
                worst = std::max(worst,
                                 rel_dev((eval(xp) - eval(xm)) / (2 * step), g[i]));
                const Vec gp = grad(xp), gm = grad(xm);
                const Mat hp = hess(xp), hm = hess(xm);
                for (std::size_t a = 0; a < n; ++a) {
                    worst = std::max(worst,
                                     rel_dev((gp[a] - gm[a]) / (2 * step), h(a, i)));
                    for (std::size_t b = 0; b < n; ++b)
                        worst = std::max(
                            worst, rel_dev((hp(a, b) - hm(a, b)) / (2 * step), t(a, b, i)));
                }
            }
        }
    };
    probe_side(
        m.domain_Dtilde(), [&](const Vec& v) { return m.eval_F(v); },
        [&](const Vec& v) { return m.grad_F(v); }, [&](const Vec& v) { return m.hess_F(v); },
        [&](const Vec& v) { return m.third_F(v); });
    probe_side(
        m.domain_D(), [&](const Vec& u) { return m.eval_G(u); },
        [&](const Vec& u) { return m.grad_G(u); }, [&](const Vec& u) { return m.hess_G(u); },
        [&](const Vec& u) { return m.third_G(u); });
    return make_check("model.derivative_consistency[" + nm.label + "]", worst, 1e-5);
}

std::pair<Check, Check> hessian_structure(const NamedModel& nm, std::mt19937_64& rng) {
    const SystemModel& m = *nm.model;
    double asym = 0.0;
    double neg = 0.0;
    for (int pt = 0; pt < 100; ++pt) {
        const Vec u = sample_interior(m.domain_D(), rng, 0.0);
        const Vec v = sample_interior(m.domain_Dtilde(), rng, 0.0);
        const Mat hg = m.hess_G(u);
        const Mat hf = m.hess_F(v);
        for (std::size_t a = 0; a < m.dim(); ++a)
            for (std::size_t b = 0; b < m.dim(); ++b) {
                asym = std::max(asym, std::abs(hg(a, b) - hg(b, a)));
                asym = std::max(asym, std::abs(hf(a, b) - hf(b, a)));
            }
        neg = std::max(neg, -sym_eigenvalues(hg).front());
    }
    return {make_check("model.hessian_symmetry[" + nm.label + "]", asym, 1e-12),
            make_check("model.hessG_psd[" + nm.label + "]", neg, 1e-10)};
}

Check third_symmetry(const NamedModel& nm, std::mt19937_64& rng) {
    const SystemModel& m = *nm.model;
    const std::size_t n = m.dim();
    double worst = 0.0;
    for (int pt = 0; pt < 20; ++pt) {
        const Vec u = sample_interior(m.domain_D(), rng, 0.05);
        const Vec v = sample_interior(m.domain_Dtilde(), rng, 0.05);
        for (const Tensor3& t : {m.third_G(u), m.third_F(v)}) {
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    for (std::size_t c = 0; c < n; ++c) {
                        const double base = t(a, b, c);
                        worst = std::max({worst, std::abs(t(a, c, b) - base),
                                          std::abs(t(b, a, c) - base),
                                          std::abs(t(b, c, a) - base),
                                          std::abs(t(c, a, b) - base),
                                          std::abs(t(c, b, a) - base)});
                    }
        }
    }
    return make_check("model.third_symmetry[" + nm.label + "]", worst, 1e-12);
}

Check bec_recursion_check(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double u = unit(rng);
        const double eps = unit(rng);
        const ModelPtr m = make_regular_bec(3, 6, eps);
        const auto [next, v] = de_step(*m, VectorState{{u}, Chart::U});
        const double textbook = eps * std::pow(1.0 - std::pow(1.0 - u, 5), 2);
        worst = std::max(worst, std::abs(next.values[0] - textbook));
    }
    return make_check("model.bec_recursion", worst, 1e-12);
}

// ---- potential module checks ----

Check prop1_equality(const NamedModel& nm) {
    const FixedPointReport report = find_fixed_points(*nm.model);
    double worst = 0.0;
    for (const FixedPoint& p : report.points)
        worst = std::max(worst, std::abs(p.potential_value -
                                         dual_potential(*nm.model, p.v.values)));
    return make_check("potential.prop1_equality[" + nm.label + "]", worst, 1e-10);
}

Check fp_residual(const NamedModel& nm) {
    const FixedPointReport report = find_fixed_points(*nm.model);
    double worst = 0.0;
    for (const FixedPoint& p : report.points) {
        const Vec img = nm.model->grad_F(nm.model->grad_G(p.u.values));
        worst = std::max(worst, linf_diff(p.u.values, img));
    }
    return make_check("potential.fp_residual[" + nm.label + "]", worst, 1e-10);
}

Check gradient_identity(const NamedModel& nm, std::mt19937_64& rng) {
    const SystemModel& m = *nm.model;
    double worst = 0.0;
    for (int pt = 0; pt < 100; ++pt) {
        const Vec u = sample_interior(m.domain_D(), rng, 0.05);
        const Vec closed = potential_gradient(m, u);
        for (std::size_t i = 0; i < m.dim(); ++i) {
            const double step = 1e-5 * m.domain_D().width(i);
            Vec up = u, um = u;
            up[i] += step;
            um[i] -= step;
            const double fd = (potential(m, up) - potential(m, um)) / (2 * step);
            worst = std::max(worst, rel_dev(fd, closed[i]));
        }
    }
    return make_check("potential.gradient_identity[" + nm.label + "]", worst, 1e-5);
}

std::pair<Check, Check> lyapunov_flow_checks(const NamedModel& nm,
                                             std::mt19937_64& rng) {
    const SystemModel& m = *nm.model;
    const FixedPointReport report = find_fixed_points(m);
    double worst_increase = 0.0;
    double worst_distance = 0.0;
    for (int start = 0; start < 10; ++start) {
        const Vec u0 = sample_interior(m.domain_D(), rng, 0.02);
        const FlowResult flow = gradient_flow(m, u0);
        worst_increase = std::max(worst_increase, flow.max_potential_increase);
        double nearest = std::numeric_limits<double>::infinity();
        for (const FixedPoint& p : report.points)
            nearest = std::min(nearest, linf_diff(flow.u, p.u.values));
        worst_distance = std::max(worst_distance, nearest);
    }
    return {make_check("potential.lyapunov_descent[" + nm.label + "]", worst_increase,
                       1e-12),
            make_check("potential.flow_terminates_at_fp[" + nm.label + "]",
                       worst_distance, 1e-6)};
}

Check line_integral_check(const NamedModel& nm, std::mt19937_64& rng) {
    const SystemModel& m = *nm.model;
    const Box& vbox = m.domain_Dtilde();
    const std::size_t n = m.dim();
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Vec a = sample_interior(vbox, rng, 0.06);
        const Vec b = sample_interior(vbox, rng, 0.06);
        const int nodes = 2001;  // composite Simpson
        Vec seed = m.domain_D().center();
        std::vector<double> phi(nodes);
        Vec u_a, u_b;
        for (int i = 0; i < nodes; ++i) {
            const double s = static_cast<double>(i) / (nodes - 1);
            Vec vt(n);
            for (std::size_t c = 0; c < n; ++c) vt[c] = a[c] + s * (b[c] - a[c]);
            seed = affine_invert(m, Chart::VAffine, vt, std::move(seed));
            if (i == 0) u_a = seed;
            if (i == nodes - 1) u_b = seed;
            const Vec gf = m.grad_F(vt);
            double val = 0.0;
            for (std::size_t c = 0; c < n; ++c) val += (seed[c] - gf[c]) * (b[c] - a[c]);
            phi[i] = val;
        }
        double integral = 0.0;
        const double h = 1.0 / (nodes - 1);
        for (int i = 0; i + 2 < nodes; i += 2)
            integral += (phi[i] + 4.0 * phi[i + 1] + phi[i + 2]) * h / 3.0;
        const double delta = potential(m, u_b) - potential(m, u_a);
        worst = std::max(worst, std::abs(integral - delta));
    }
    return make_check("potential.line_integral[" + nm.label + "]", worst, 1e-6);
}

// ---- continuum checks ----

Check roundtrip_check(const NamedModel& nm, std::mt19937_64& rng) {
    AffineMap map(nm.model);
    double worst = 0.0;
    for (int pt = 0; pt < 100; ++pt) {
        // inset keeps the inverse well conditioned; at the domain edge the
        // Hessian vanishes and the preimage error grows as residual / g
        const Vec u = sample_interior(nm.model->domain_D(), rng, 0.15);
        const VectorState back = map.from_affine(map.to_affine(VectorState{u, Chart::U}));
        worst = std::max(worst, linf_diff(back.values, u));
        const Vec v = sample_interior(nm.model->domain_Dtilde(), rng, 0.15);
        const VectorState back2 = map.from_affine(map.to_affine(VectorState{v, Chart::V}));
        worst = std::max(worst, linf_diff(back2.values, v));
    }
    return make_check("continuum.affine_roundtrip[" + nm.label + "]", worst, 1e-10);
}

Check gamma_check(const NamedModel& nm, std::mt19937_64& rng) {
    double worst = 0.0;
    for (int pt = 0; pt < 50; ++pt) {
        // central half of the box: the inverse-Hessian amplification makes the
        // identity unverifiable at this tolerance near the singular edge
        const Vec u = sample_interior(nm.model->domain_D(), rng, 0.25);
        const Tensor3 gamma = verify_affine_connection(*nm.model, u);
        worst = std::max(worst, linf_norm(gamma.a));
    }
    return make_check("continuum.gamma_identity[" + nm.label + "]", worst, 1e-6);
}

double coupling_sup_error(const SystemModel& model, int k, int n) {
    const double a = 0.5, b = 0.3;
    const double m_coeff = 1e-3;
    ContinuumField field(k, n, 1, Chart::VAffine, m_coeff, Vec{a}, Vec{a});
    for (std::size_t node = 0; node < field.node_count(); ++node) {
        const auto coords = field.coords_of(node);
        double prod = 1.0;
        for (int ax = 0; ax < k; ++ax)
            prod *= std::cos(0.5 * M_PI * field.x_of(coords[ax]));
        field.values[node] = a + b * prod;
    }
    double worst = 0.0;
    for (std::size_t node = 0; node < field.node_count(); ++node) {
        if (field.is_boundary(node)) continue;
        const auto coords = field.coords_of(node);
        const double w = field.values[node];
        double gradsq = 0.0;
        for (int ax = 0; ax < k; ++ax) {
            double term = b * 0.5 * M_PI * std::sin(0.5 * M_PI * field.x_of(coords[ax]));
            for (int bx = 0; bx < k; ++bx)
                if (bx != ax) term *= std::cos(0.5 * M_PI * field.x_of(coords[bx]));
            gradsq += term * term;
        }
        const double lap = -k * 0.25 * M_PI * M_PI * (w - a);
        const double f = model.hess_F(Vec{w})(0, 0);
        const double fp = model.third_F(Vec{w})(0, 0, 0);
        const double exact = f * lap + 0.5 * fp * gradsq;
        const Vec fd = coupling_operator(model, field, node);
        worst = std::max(worst, std::abs(fd[0] - exact));
    }
    return worst;
}

Check coupling_convergence_check(int k) {
    const ModelPtr m = make_regular_bec(3, 6, 0.45);
    const int n_coarse = k == 1 ? 33 : 17;
    const int n_fine = 2 * n_coarse - 1;
    const double coarse = coupling_sup_error(*m, k, n_coarse);
    const double fine = coupling_sup_error(*m, k, n_fine);
    return make_check("continuum.coupling_refinement[k=" + std::to_string(k) + "]",
                      coarse / fine, 2.5, CheckCmp::GE);
}

Check uniform_energy_check(int k) {
    const ModelPtr m = make_regular_bec(3, 6, 0.45);
    const Vec u{0.3};
    const Vec vt = m->grad_G(u);
    ContinuumField field(k, 17, 1, Chart::VAffine, 1e-3, vt, vt);
    const double h = energy_functional(*m, field);
    const double expect = std::pow(2.0, k) * potential(*m, u);
    return make_check("continuum.uniform_energy[k=" + std::to_string(k) + "]",
                      std::abs(h - expect), 1e-12);
}

// ---- lattice checks ----

Check w0_reduction_check() {
    const ModelPtr m = make_regular_bec(3, 6, 0.45);
    const CouplingConfig cfg =
        make_coupling_config(1, 8, 0, VectorState{{0.0}, Chart::U});
    LatticeField field(cfg, 1, Vec{0.5}, Vec{0.0});
    const std::size_t nsites = field.site_count();
    for (std::size_t s = 0; s < nsites; ++s)
        field.data[s] = 0.1 + 0.8 * static_cast<double>(s) / (nsites - 1);
    LatticeField expected = field;
    for (std::size_t s = 0; s < nsites; ++s) {
        const auto [next, v] = de_step(*m, VectorState{{expected.data[s]}, Chart::U});
        expected.data[s] = next.values[0];
    }
    GscWorkspace work;
    gsc_step(*m, field, work, Execution::Parallel);
    return make_check("lattice.w0_reduction", linf_diff(field.data, expected.data), 0.0);
}

Check symmetry_check(Execution exec) {
    double worst = 0.0;
    // K=1, W=2
    {
        const ModelPtr m = make_regular_bec(3, 6, 0.46);
        const CouplingConfig cfg =
            make_coupling_config(1, 16, 2, VectorState{{0.0}, Chart::U});
        LatticeField field(cfg, 1, Vec{0.4}, Vec{0.0});
        GscWorkspace work;
        for (int iter = 0; iter < 30; ++iter) {
            gsc_step(*m, field, work, exec);
            const int l1 = cfg.l_size - 1;
            for (int p = 1; p <= l1; ++p) {
                const int a[1] = {p}, b[1] = {-p};
                worst = std::max(worst, std::abs(field.at(a, 0) - field.at(b, 0)));
            }
        }
    }
    // K=2, W=1; check each axis reflection
    {
        const ModelPtr m = make_regular_bec(3, 6, 0.46);
        const CouplingConfig cfg =
            make_coupling_config(2, 6, 1, VectorState{{0.0}, Chart::U});
        LatticeField field(cfg, 1, Vec{0.4}, Vec{0.0});
        GscWorkspace work;
        for (int iter = 0; iter < 15; ++iter) {
            gsc_step(*m, field, work, exec);
            const int l1 = cfg.l_size - 1;
            for (int x = -l1; x <= l1; ++x)
                for (int y = -l1; y <= l1; ++y) {
                    const int a[2] = {x, y}, bx[2] = {-x, y}, by[2] = {x, -y};
                    worst = std::max(worst,
                                     std::abs(field.at(a, 0) - field.at(bx, 0)));
                    worst = std::max(worst,
                                     std::abs(field.at(a, 0) - field.at(by, 0)));
                }
        }
    }
    return make_check("lattice.reflection_symmetry", worst, 0.0);
}

Check monotone_check(Execution exec) {
    const ModelPtr m = make_regular_bec(3, 6, 0.46);
    const CouplingConfig cfg =
        make_coupling_config(1, 16, 1, VectorState{{0.0}, Chart::U});
    const FixedPointReport report = find_fixed_points(*m);
    const Vec bad = report.bad ? report.points[*report.bad].u.values : Vec{1.0};
    LatticeField field(cfg, 1, bad, Vec{0.0});
    GscWorkspace work;
    double worst = 0.0;
    Vec prev = field.data;
    for (int iter = 0; iter < 200; ++iter) {
        gsc_step(*m, field, work, exec);
        for (std::size_t i = 0; i < field.data.size(); ++i)
            worst = std::max(worst, field.data[i] - prev[i]);
        prev = field.data;
    }
    return make_check("lattice.monotone_from_all_bad", worst, 1e-12);
}

Check uniform_fp_check(Execution exec) {
    const ModelPtr m = make_regular_bec(3, 6, 0.45);
    const FixedPointReport report = find_fixed_points(*m);
    if (!report.bad) return make_check("lattice.uniform_fixed_point", 1.0, 1e-12);
    const Vec ub = report.points[*report.bad].u.values;
    const CouplingConfig cfg = make_coupling_config(1, 12, 2, VectorState{ub, Chart::U});
    LatticeField field(cfg, 1, ub, ub);
    GscWorkspace work;
    const GscStepInfo info = gsc_step(*m, field, work, exec);
    return make_check("lattice.uniform_fixed_point", info.linf_change, 1e-12);
}

}  // namespace

SaturationResult saturation_experiment(double eps, int k, int l_size, int w,
                                       long max_iters, double stop_eps, Execution exec,
                                       int bec_l, int bec_r) {
    const ModelPtr m = make_regular_bec(bec_l, bec_r, eps);
    const CouplingConfig cfg =
        make_coupling_config(k, l_size, w, VectorState{{0.0}, Chart::U});
    GscRunOptions opts;
    opts.init = GscInit::AllBad;
    opts.max_iters = max_iters;
    opts.stop_eps = stop_eps;
    opts.exec = exec;
    const GscRunResult run = run_gsc(*m, cfg, opts);

    SaturationResult out;
    out.converged = run.converged;
    out.iters = run.iters;
    out.final_max_perf = run.history.empty() ? 0.0 : run.history.back().max_perf;

    const FixedPointReport report = find_fixed_points(*m);
    if (report.bad) {
        int coords[kMaxCouplingDim] = {0, 0, 0};
        for (int a = 0; a < k; ++a) coords[a] = l_size - 1;
        const Vec u_center =
            run.field.site(run.field.flat_index(std::span<const int>(coords, k)));
        out.center_gap_to_bad =
            linf_diff(u_center, report.points[*report.bad].u.values);
    } else {
        out.center_gap_to_bad = std::numeric_limits<double>::infinity();
    }
    return out;
}

PdeSaturationResult pde_saturation_experiment(double eps, int k, int n,
                                              double m_coeff, Execution exec,
                                              long max_steps, double stop_eps) {
    const ModelPtr m = make_regular_bec(3, 6, eps);
    const FixedPointReport report = find_fixed_points(*m);
    const Vec u_bad = report.bad ? report.points[*report.bad].u.values : Vec{1.0};
    const Vec u_good{0.0};
    const Vec vt_bad = m->grad_G(u_bad);
    const Vec vt_good = m->grad_G(u_good);

    PdeRunOptions opts;
    opts.max_steps = max_steps;
    opts.stop_eps = stop_eps;
    opts.exec = exec;
    ContinuumField init(k, n, 1, Chart::VAffine, m_coeff, vt_bad, vt_good);

    PdeSaturationResult out{run_pde(*m, init, opts), 0.0, 0.0, 0.0};
    out.interior_deviation = max_interior_deviation(out.run.field, vt_good);

    const ContinuumField u_chart = transform_to_u_chart(*m, out.run.field);
    out.residual_converged = linf_norm(bvp_residual(*m, u_chart));

    ContinuumField u_init(k, n, 1, Chart::UAffine, m_coeff, u_bad, u_good);
    out.residual_initial = linf_norm(bvp_residual(*m, u_init));
    return out;
}

double conservation_drift(double eps, int n, double m_coeff, Execution exec) {
    const ModelPtr m = make_regular_bec(3, 6, eps);
    const FixedPointReport report = find_fixed_points(*m);
    const Vec u_bad = report.bad ? report.points[*report.bad].u.values : Vec{1.0};

    PdeRunOptions opts;
    opts.max_steps = 2000000;
    opts.stop_eps = 1e-12;
    opts.monitor_energy = false;
    opts.exec = exec;
    ContinuumField init(1, n, 1, Chart::UAffine, m_coeff, u_bad, Vec{0.0});
    const PdeRunResult run = run_pde(*m, init, opts);
    return conservation_check(*m, run.field).max_drift;
}

double lattice_continuum_gap(double eps, int l_size, Execution exec) {
    const ModelPtr m = make_regular_bec(3, 6, eps);
    const double m_coeff = coupling_m_coeff(l_size, 1);

    const CouplingConfig cfg =
        make_coupling_config(1, l_size, 1, VectorState{{0.0}, Chart::U});
    GscRunOptions lopts;
    lopts.init = GscInit::AllBad;
    lopts.max_iters = 500000;
    lopts.stop_eps = 1e-11;
    lopts.exec = exec;
    const GscRunResult lrun = run_gsc(*m, cfg, lopts);

    const FixedPointReport report = find_fixed_points(*m);
    const Vec u_bad = report.bad ? report.points[*report.bad].u.values : Vec{1.0};
    const int n = 8 * l_size + 1;
    PdeRunOptions popts;
    popts.max_steps = 2000000;
    popts.stop_eps = 1e-12;
    popts.monitor_energy = false;
    popts.exec = exec;
    ContinuumField init(1, n, 1, Chart::VAffine, m_coeff, m->grad_G(u_bad),
                        m->grad_G(Vec{0.0}));
    const PdeRunResult prun = run_pde(*m, init, popts);

    Vec seed = m->domain_D().center();
    double gap = 0.0;
    for (int p = -(l_size - 1); p <= l_size - 1; ++p) {
        const int coords[1] = {p + l_size - 1};
        const double u_lat = lrun.field.data[lrun.field.flat_index(coords)];
        const std::size_t node = static_cast<std::size_t>(4 * l_size + 4 * p);
        seed = affine_invert(*m, Chart::VAffine, prun.field.node(node), std::move(seed));
        gap = std::max(gap, std::abs(u_lat - seed[0]));
    }
    return gap;
}

double uniformity_deviation(double eps, double m_coeff, int n, Execution exec) {
    const ModelPtr m = make_regular_bec(3, 6, eps);
    const FixedPointReport report = find_fixed_points(*m);
    const Vec u_bad = report.bad ? report.points[*report.bad].u.values : Vec{1.0};
    PdeRunOptions opts;
    opts.max_steps = 4000000;
    opts.stop_eps = 1e-12;
    opts.monitor_energy = false;
    opts.exec = exec;
    ContinuumField init(1, n, 1, Chart::VAffine, m_coeff, m->grad_G(u_bad),
                        m->grad_G(Vec{0.0}));
    const PdeRunResult run = run_pde(*m, init, opts);
    return max_interior_deviation(run.field, m->grad_G(Vec{0.0}));
}

double step_consistency_error(double eps, int l_size, Execution exec) {
    const ModelPtr m = make_regular_bec(3, 6, eps);
    const int w = 1;
    const double m_coeff = coupling_m_coeff(l_size, w);
    const CouplingConfig cfg =
        make_coupling_config(1, l_size, w, VectorState{{0.0}, Chart::U});

    // smooth profile with a C^3 zero extension across the pinned boundary
    const double amp = 0.3;
    const auto s_of = [&](double x) {
        const double c = std::cos(0.5 * M_PI * x);
        return amp * c * c * c * c;
    };
    const auto s1_of = [&](double x) {
        const double c = std::cos(0.5 * M_PI * x), s = std::sin(0.5 * M_PI * x);
        return -2.0 * M_PI * amp * c * c * c * s;
    };
    const auto s2_of = [&](double x) {
        const double c = std::cos(0.5 * M_PI * x), s = std::sin(0.5 * M_PI * x);
        return -M_PI * M_PI * amp * (c * c * c * c - 3.0 * c * c * s * s);
    };

    LatticeField field(cfg, 1, Vec{0.0}, Vec{0.0});
    for (int p = -(l_size - 1); p <= l_size - 1; ++p) {
        const int coords[1] = {p + l_size - 1};
        field.data[field.flat_index(coords)] = s_of(static_cast<double>(p) / l_size);
    }
    GscWorkspace work;
    gsc_step(*m, field, work, exec);

    double worst = 0.0;
    for (int p = -(l_size - 1); p <= l_size - 1; ++p) {
        const double x = static_cast<double>(p) / l_size;
        const Vec u0{s_of(x)};
        const double s1 = s1_of(x), s2 = s2_of(x);
        const double g = m->hess_G(u0)(0, 0);
        const double tg = m->third_G(u0)(0, 0, 0);
        const double v0 = m->grad_G(u0)[0];
        const double v = v0 + 0.5 * m_coeff * (g * s2 + tg * s1 * s1);
        const double v1 = g * s1;                  // d/dx of grad_G(s)
        const double v2 = tg * s1 * s1 + g * s2;   // d2/dx2
        const double f = m->hess_F(Vec{v0})(0, 0);
        const double tf = m->third_F(Vec{v0})(0, 0, 0);
        const double pred =
            m->grad_F(Vec{v})[0] + 0.5 * m_coeff * (f * v2 + tf * v1 * v1);
        const int coords[1] = {p + l_size - 1};
        worst = std::max(worst, std::abs(field.data[field.flat_index(coords)] - pred));
    }
    return worst;
}

std::vector<Check> run_verify(const VerifyOptions& opts) {
    std::vector<Check> checks;
    std::mt19937_64 rng(opts.seed);

    for (const NamedModel& nm : structural_models()) {
        checks.push_back(derivative_consistency(nm, rng));
        const auto [sym, psd] = hessian_structure(nm, rng);
        checks.push_back(sym);
        checks.push_back(psd);
        checks.push_back(third_symmetry(nm, rng));
    }
    checks.push_back(bec_recursion_check(rng));

    for (const NamedModel& nm : instance_models()) {
        checks.push_back(prop1_equality(nm));
        checks.push_back(fp_residual(nm));
        checks.push_back(gradient_identity(nm, rng));
        const auto [descent, terminates] = lyapunov_flow_checks(nm, rng);
        checks.push_back(descent);
        checks.push_back(terminates);
        checks.push_back(line_integral_check(nm, rng));
        checks.push_back(roundtrip_check(nm, rng));
        checks.push_back(gamma_check(nm, rng));
    }

    checks.push_back(coupling_convergence_check(1));
    checks.push_back(coupling_convergence_check(2));
    checks.push_back(uniform_energy_check(1));
    checks.push_back(uniform_energy_check(2));

    checks.push_back(w0_reduction_check());
    checks.push_back(symmetry_check(opts.exec));
    checks.push_back(monotone_check(opts.exec));
    checks.push_back(uniform_fp_check(opts.exec));

    // quick PDE descent on a small grid
    {
        const PdeSaturationResult r =
            pde_saturation_experiment(0.46, 1, 65, 1e-2, opts.exec, 200000, 1e-11);
        checks.push_back(
            make_check("continuum.pde_energy_descent[n=65]", r.run.max_energy_increase, 1e-9));
        const ModelPtr m = make_regular_bec(3, 6, 0.46);
        // stationary field mapped back through the inverse transform stays at
        // or above the good potential level
        double min_pot = std::numeric_limits<double>::infinity();
        Vec seed = m->domain_D().center();
        for (std::size_t node = 0; node < r.run.field.node_count(); ++node) {
            seed = affine_invert(*m, Chart::VAffine, r.run.field.node(node), std::move(seed));
            min_pot = std::min(min_pot, potential(*m, seed));
        }
        checks.push_back(make_check("continuum.stationary_potential_bridge",
                                    potential(*m, Vec{0.0}) - min_pot, 1e-6));
    }

    if (opts.quick) return checks;

    // thresholds
    {
        const ModelFamily fam = regular_bec_family(3, 6);
        const double bp = threshold_scan(fam, ThresholdKind::BP, 2e-4);
        const double pot = threshold_scan(fam, ThresholdKind::Potential, 2e-4);
        checks.push_back(make_check("potential.bp_threshold(3,6)", std::abs(bp - 0.4294), 1e-3));
        checks.push_back(
            make_check("potential.potential_threshold(3,6)", std::abs(pot - 0.4881), 1e-3));
    }

    // threshold saturation, K=1 and K=2
    {
        const SaturationResult below =
            saturation_experiment(0.46, 1, 64, 2, 400000, 1e-10, opts.exec);
        checks.push_back(
            make_check("lattice.saturation_k1[eps=0.46]", below.final_max_perf, 1e-6));
        const SaturationResult above =
            saturation_experiment(0.50, 1, 64, 2, 400000, 1e-10, opts.exec);
        checks.push_back(
            make_check("lattice.stall_k1[eps=0.50]", above.center_gap_to_bad, 1e-3));
        const SaturationResult below2 =
            saturation_experiment(0.46, 2, 16, 1, 400000, 1e-10, opts.exec);
        checks.push_back(
            make_check("lattice.saturation_k2[eps=0.46]", below2.final_max_perf, 1e-6));
        // L=32: at L=16 the good frame's curvature pressure collapses the bad
        // island even above the potential threshold
        const SaturationResult above2 =
            saturation_experiment(0.50, 2, 32, 1, 400000, 1e-10, opts.exec);
        checks.push_back(
            make_check("lattice.stall_k2[eps=0.50,L=32]", above2.center_gap_to_bad, 1e-3));
    }

    // full-size PDE descent and stationarity residual
    {
        const PdeSaturationResult r =
            pde_saturation_experiment(0.46, 1, 257, 1e-3, opts.exec);
        checks.push_back(
            make_check("continuum.pde_energy_descent[n=257]", r.run.max_energy_increase, 1e-9));
        checks.push_back(
            make_check("continuum.pde_reaches_good[n=257]", r.interior_deviation, 1e-4));
        const double dx = 2.0 / 256.0;
        checks.push_back(make_check("continuum.bvp_residual[n=257]", r.residual_converged,
                                    10.0 * dx * dx * r.residual_initial));
    }

    // conservation drift halves under refinement
    {
        const double coarse = conservation_drift(0.50, 129, 1e-3, opts.exec);
        const double fine = conservation_drift(0.50, 257, 1e-3, opts.exec);
        checks.push_back(
            make_check("continuum.conservation_refinement", coarse / fine, 2.0, CheckCmp::GE));
    }

    // continuum approximation: one-step error on a smooth macroscopic
    // profile falls off with the neglected window moments
    {
        const double e16 = step_consistency_error(0.46, 16, opts.exec);
        const double e32 = step_consistency_error(0.46, 32, opts.exec);
        const double e64 = step_consistency_error(0.46, 64, opts.exec);
        checks.push_back(make_check("continuum.step_consistency_ratio",
                                    std::min(e16 / e32, e32 / e64), 4.0, CheckCmp::GE));
    }

    // uniformity tolerance shrinking with M
    {
        const double d2 = uniformity_deviation(0.46, 1e-2, 129, opts.exec);
        const double d3 = uniformity_deviation(0.46, 1e-3, 257, opts.exec);
        const double d4 = uniformity_deviation(0.46, 1e-4, 769, opts.exec);
        checks.push_back(make_check("continuum.uniform_at_good[m=1e-2]", d2, 1e-3));
        checks.push_back(make_check("continuum.uniform_at_good[m=1e-3]", d3, 1e-4));
        checks.push_back(make_check("continuum.uniform_at_good[m=1e-4]", d4, 1e-5));
    }

    return checks;
}

}  // namespace gsc
