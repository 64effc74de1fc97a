#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gsc/continuum.hpp"
#include "gsc/reference.hpp"
#include "oracles.hpp"

using namespace gsc;

namespace {

// quadratic pair: constant Hessians, vanishing thirds
class QuadraticModel final : public SystemModel {
public:
    std::size_t dim() const override { return 1; }
    double eval_F(const Vec& v) const override { return 0.15 * v[0] * v[0]; }
    double eval_G(const Vec& u) const override { return 0.5 * u[0] * u[0]; }
    Vec grad_F(const Vec& v) const override { return {0.3 * v[0]}; }
    Vec grad_G(const Vec& u) const override { return {u[0]}; }
    Mat hess_F(const Vec&) const override {
        Mat m(1);
        m(0, 0) = 0.3;
        return m;
    }
    Mat hess_G(const Vec&) const override {
        Mat m(1);
        m(0, 0) = 1.0;
        return m;
    }
    const Box& domain_D() const override { return box_; }
    const Box& domain_Dtilde() const override { return box_; }
    std::string name() const override { return "quadratic_test"; }

private:
    Box box_{{-2.0}, {2.0}};
};

ContinuumField parabola_field(std::size_t n) {
    // v_tilde(x) = x^2 on [-1,1], boundary value 1
    ContinuumField f(1, static_cast<int>(n), 1, Chart::VAffine, 1e-3, Vec{0.0}, Vec{1.0});
    for (std::size_t node = 0; node < f.node_count(); ++node) {
        const double x = f.x_of(static_cast<int>(node));
        f.values[node] = x * x;
    }
    return f;
}

}  // namespace

TEST_CASE("affine transform closed form and round trips") {
    const ModelPtr m = make_regular_bec(3, 6, 0.45);
    AffineMap map(m);

    const VectorState vt = map.to_affine(VectorState{{0.3}, Chart::U});
    CHECK(vt.chart == Chart::VAffine);
    CHECK(vt.values[0] == doctest::Approx(1.0 - std::pow(0.7, 5)).epsilon(1e-15));

    const VectorState u = map.from_affine(VectorState{{0.5}, Chart::VAffine});
    CHECK(u.chart == Chart::U);
    CHECK(u.values[0] ==
          doctest::Approx(1.0 - std::pow(0.5, 0.2)).epsilon(1e-11));  // 0.129449

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mid(0.1, 0.9);
    for (int i = 0; i < 30; ++i) {
        const double x = mid(rng);
        const VectorState back = map.from_affine(map.to_affine(VectorState{{x}, Chart::U}));
        CHECK(std::abs(back.values[0] - x) < 1e-10);
        const VectorState back2 =
            map.from_affine(map.to_affine(VectorState{{x}, Chart::V}));
        CHECK(std::abs(back2.values[0] - x) < 1e-10);
    }

    // fixed point: the affine image of u* is v*, and it inverts back
    const double bad = oracle::bec_bad_solution(3, 6, 0.45);
    const VectorState vstar = map.to_affine(VectorState{{bad}, Chart::U});
    CHECK(vstar.values[0] == doctest::Approx(1.0 - std::pow(1.0 - bad, 5)).epsilon(1e-14));
    const VectorState ustar = map.from_affine(vstar);
    CHECK(std::abs(ustar.values[0] - bad) < 1e-11);
}

TEST_CASE("inversion outside the image reports the last iterate") {
    const ModelPtr m = make_regular_bec(3, 6, 0.45);
    try {
        affine_invert(*m, Chart::VAffine, Vec{1.5}, Vec{0.5});
        FAIL("expected AffineInversionError");
    } catch (const AffineInversionError& e) {
        CHECK(e.last_iterate.size() == 1);
        CHECK(e.last_iterate[0] <= 1.0);
    }
    CHECK_THROWS_AS(affine_invert(*m, Chart::U, Vec{0.5}, Vec{0.5}),
                    std::invalid_argument);
}

TEST_CASE("coupling operator on a parabola with constant Hessian") {
    QuadraticModel m;
    const ContinuumField f = parabola_field(17);
    for (std::size_t node = 1; node + 1 < f.node_count(); ++node) {
        // pure Laplacian term: hess_F * 2, gradient term vanishes
        CHECK(coupling_operator(m, f, node)[0] == doctest::Approx(0.6).epsilon(1e-12));
    }
    CHECK_THROWS_AS(coupling_operator(m, f, 0), std::invalid_argument);
}

TEST_CASE("coupling operator vanishes on uniform fields") {
    const ModelPtr m = make_regular_bec(3, 6, 0.45);
    const Vec vt = m->grad_G(Vec{0.35});
    ContinuumField f(2, 9, 1, Chart::VAffine, 1e-3, vt, vt);
    int coords[2] = {4, 4};
    CHECK(coupling_operator(*m, f, f.flat_index(coords))[0] == 0.0);
}

TEST_CASE("pde step pins the boundary and preserves stationary states") {
    const ModelPtr m = make_regular_bec(3, 6, 0.46);
    const Vec vt_good = m->grad_G(Vec{0.0});

    ContinuumField f(1, 33, 1, Chart::VAffine, 1e-3, vt_good, vt_good);
    PdeWorkspace ws;
    const double dt = pde_auto_dt(*m, f.m_coeff(), f.dx());
    const PdeStepInfo info = pde_step(*m, f, dt, ws);
    CHECK(info.max_change < 1e-13);
    CHECK(f.values.front() == vt_good[0]);
    CHECK(f.values.back() == vt_good[0]);

    // boundary stays pinned on a non-stationary field too
    const double bad = oracle::bec_bad_solution(3, 6, 0.46);
    ContinuumField g(1, 33, 1, Chart::VAffine, 1e-3, m->grad_G(Vec{bad}), vt_good);
    PdeWorkspace ws2;
    pde_step(*m, g, dt, ws2);
    CHECK(g.values.front() == vt_good[0]);
    CHECK(g.values.back() == vt_good[0]);
    CHECK_THROWS_AS(pde_step(*m, g, 0.0, ws2), std::invalid_argument);
}

TEST_CASE("energy of uniform fields") {
    const ModelPtr m = make_regular_bec(3, 6, 0.45);
    const Vec vt_good = m->grad_G(Vec{0.0});
    ContinuumField good(1, 17, 1, Chart::VAffine, 1e-3, vt_good, vt_good);
    CHECK(std::abs(energy_functional(*m, good)) < 1e-15);

    const Vec vt = m->grad_G(Vec{0.3});
    ContinuumField f1(1, 17, 1, Chart::VAffine, 1e-3, vt, vt);
    CHECK(energy_functional(*m, f1) ==
          doctest::Approx(2.0 * oracle::bec_potential(3, 6, 0.45, 0.3)).epsilon(1e-13));
    ContinuumField f2(2, 9, 1, Chart::VAffine, 1e-3, vt, vt);
    CHECK(energy_functional(*m, f2) ==
          doctest::Approx(4.0 * oracle::bec_potential(3, 6, 0.45, 0.3)).epsilon(1e-13));
}

TEST_CASE("energy descends along a small pde run") {
    const ModelPtr m = make_regular_bec(3, 6, 0.46);
    const double bad = oracle::bec_bad_solution(3, 6, 0.46);
    ContinuumField init(1, 33, 1, Chart::VAffine, 1e-2, m->grad_G(Vec{bad}),
                        m->grad_G(Vec{0.0}));
    PdeRunOptions opts;
    opts.max_steps = 100000;
    opts.stop_eps = 1e-11;
    const PdeRunResult run = run_pde(*m, init, opts);
    CHECK(run.converged);
    CHECK(run.max_energy_increase <= 1e-9);
    CHECK(max_interior_deviation(run.field, m->grad_G(Vec{0.0})) < 1e-4);
    // history records the pre-step energies, strictly decreasing early on
    REQUIRE(run.history.size() > 10);
    CHECK(run.history[0].energy > run.history[5].energy);
}

TEST_CASE("serial reference pde step tracks the parallel kernel") {
    const ModelPtr m = make_regular_bec(3, 6, 0.46);
    const double bad = oracle::bec_bad_solution(3, 6, 0.46);
    ContinuumField fast(1, 33, 1, Chart::VAffine, 1e-2, m->grad_G(Vec{bad}),
                        m->grad_G(Vec{0.0}));
    ContinuumField ref = fast;
    PdeWorkspace ws;
    const double dt = pde_auto_dt(*m, fast.m_coeff(), fast.dx());
    for (int i = 0; i < 5; ++i) {
        pde_step(*m, fast, dt, ws);
        ref::pde_step(*m, ref, dt);
    }
    CHECK(linf_diff(fast.values, ref.values) < 1e-12);

    CHECK(std::abs(ref::energy_functional(*m, fast) -
                   energy_functional(*m, fast)) < 1e-13);
}

TEST_CASE("serial and parallel pde kernels agree bitwise") {
    const ModelPtr m = make_regular_bec(3, 6, 0.46);
    const double bad = oracle::bec_bad_solution(3, 6, 0.46);
    ContinuumField a(2, 17, 1, Chart::VAffine, 1e-2, m->grad_G(Vec{bad}),
                     m->grad_G(Vec{0.0}));
    ContinuumField b = a;
    PdeWorkspace wa, wb;
    const double dt = pde_auto_dt(*m, a.m_coeff(), a.dx());
    for (int i = 0; i < 4; ++i) {
        pde_step(*m, a, dt, wa, Execution::Serial);
        pde_step(*m, b, dt, wb, Execution::Parallel);
    }
    CHECK(a.values == b.values);
    CHECK(energy_functional(*m, a, nullptr, Execution::Serial) ==
          energy_functional(*m, b, nullptr, Execution::Parallel));
}

TEST_CASE("bvp residual at uniform states") {
    const ModelPtr m = make_regular_bec(3, 6, 0.46);
    // stationary: the good solution
    ContinuumField good(1, 17, 1, Chart::UAffine, 1e-3, Vec{0.0}, Vec{0.0});
    CHECK(linf_norm(bvp_residual(*m, good)) < 1e-10);

    // non-stationary uniform: residual equals minus the dual-potential slope
    const double u0 = 0.3;
    ContinuumField f(1, 17, 1, Chart::UAffine, 1e-3, Vec{u0}, Vec{u0});
    const Vec res = bvp_residual(*m, f);
    const Vec psi = affine_invert(*m, Chart::UAffine, Vec{u0}, Vec{0.5});
    const double expect = -(psi[0] - m->grad_G(Vec{u0})[0]);
    for (std::size_t node = 1; node + 1 < f.node_count(); ++node)
        CHECK(res[node] == doctest::Approx(expect).epsilon(1e-10));

    ContinuumField wrong(1, 17, 1, Chart::VAffine, 1e-3, Vec{0.1}, Vec{0.1});
    CHECK_THROWS_AS(bvp_residual(*m, wrong), std::invalid_argument);
}

TEST_CASE("conservation check on uniform and stationary profiles") {
    const ModelPtr m = make_regular_bec(3, 6, 0.46);
    ContinuumField good(1, 33, 1, Chart::UAffine, 1e-3, Vec{0.0}, Vec{0.0});
    const ConservationResult cons = conservation_check(*m, good);
    CHECK(cons.max_drift <= 1e-14);
    // dual potential vanishes at the origin
    CHECK(std::abs(cons.boundary_energy) <= 1e-14);
    for (double e : cons.energy) CHECK(std::abs(e) <= 1e-14);

    ContinuumField k2(2, 9, 1, Chart::UAffine, 1e-3, Vec{0.0}, Vec{0.0});
    CHECK_THROWS_AS(conservation_check(*m, k2), std::invalid_argument);
}

TEST_CASE("energy tensor identities") {
    const ModelPtr m = make_regular_bec(3, 6, 0.50);

    // uniform field: T = -Vdual(Psi(u)) * identity
    const double u0 = 0.35;
    ContinuumField f(2, 9, 1, Chart::UAffine, 1e-3, Vec{u0}, Vec{u0});
    int coords[2] = {4, 4};
    const Mat t = energy_tensor(*m, f, f.flat_index(coords));
    const Vec psi = affine_invert(*m, Chart::UAffine, Vec{u0}, Vec{0.5});
    const double vd = dual_potential(*m, psi);
    CHECK(t(0, 0) == doctest::Approx(-vd).epsilon(1e-10));
    CHECK(t(1, 1) == doctest::Approx(-vd).epsilon(1e-10));
    CHECK(t(0, 1) == 0.0);

    // K=1: T^1_1 equals minus the conserved energy, node by node
    ContinuumField g(1, 33, 1, Chart::UAffine, 1e-3, Vec{0.3}, Vec{0.0});
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const double x = g.x_of(static_cast<int>(node));
        g.values[node] = 0.3 * (1.0 - x * x * x * x);
    }
    const ConservationResult cons = conservation_check(*m, g);
    for (std::size_t node = 1; node + 1 < g.node_count(); ++node) {
        const Mat tt = energy_tensor(*m, g, node);
        CHECK(tt(0, 0) == doctest::Approx(-cons.energy[node]).epsilon(1e-9));
    }
}

TEST_CASE("energy tensor off-diagonal vanishes on the symmetry hyperplane") {
    // K=2 stationary symmetric profile from the dual-chart flow
    const ModelPtr m = make_regular_bec(3, 6, 0.50);
    const double bad = oracle::bec_bad_solution(3, 6, 0.50);
    ContinuumField init(2, 33, 1, Chart::UAffine, 4e-3, Vec{bad}, Vec{0.0});
    PdeRunOptions opts;
    opts.max_steps = 200000;
    opts.stop_eps = 1e-11;
    opts.monitor_energy = false;
    const PdeRunResult run = run_pde(*m, init, opts);
    CHECK(run.converged);

    const int mid = (run.field.n() - 1) / 2;
    for (int j = 1; j + 1 < run.field.n(); ++j) {
        int coords[2] = {mid, j};
        const Mat t = energy_tensor(*m, run.field, run.field.flat_index(coords));
        CHECK(std::abs(t(0, 1)) < 1e-8);  // d/dx1 = 0 on the x1 = 0 plane
    }
}

TEST_CASE("connection coefficients vanish") {
    SUBCASE("exactly for a quadratic potential pair") {
        QuadraticModel m;
        for (double u : {-1.0, 0.2, 1.4}) {
            const Tensor3 gamma = verify_affine_connection(m, Vec{u});
            CHECK(gamma(0, 0, 0) == 0.0);
        }
    }
    SUBCASE("to finite-difference error for the bec instance") {
        const ModelPtr m = make_regular_bec(3, 6, 0.45);
        CHECK(linf_norm(verify_affine_connection(*m, Vec{0.5}).a) < 1e-6);
    }
    SUBCASE("block structure for products") {
        const ModelPtr p = make_product_model(
            {make_regular_bec(3, 6, 0.45), make_regular_bec(3, 6, 0.50)});
        const Tensor3 gamma = verify_affine_connection(*p, Vec{0.4, 0.5});
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b)
                for (std::size_t c = 0; c < 2; ++c) {
                    if (a == b && b == c) continue;  // cross terms only
                    CHECK(std::abs(gamma(a, b, c)) < 1e-9);
                }
    }
    SUBCASE("rejects the singular edge") {
        const ModelPtr m = make_regular_bec(3, 6, 0.45);
        CHECK_THROWS_AS(verify_affine_connection(*m, Vec{1.0}), SingularHessianError);
    }
}

TEST_CASE("transform to the dual chart") {
    const ModelPtr m = make_regular_bec(3, 6, 0.46);
    ContinuumField f(1, 17, 1, Chart::VAffine, 1e-3, m->grad_G(Vec{0.3}),
                     m->grad_G(Vec{0.0}));
    const ContinuumField g = transform_to_u_chart(*m, f);
    CHECK(g.chart() == Chart::UAffine);
    for (std::size_t node = 0; node < f.node_count(); ++node)
        CHECK(g.values[node] == m->grad_F(Vec{f.values[node]})[0]);
}

TEST_CASE("product-model pde decouples into component runs") {
    // every vector index path (hessian contractions, third tensors, Newton
    // solves) must act blockwise for a block-diagonal model
    const ModelPtr m1 = make_regular_bec(3, 6, 0.46);
    const ModelPtr m2 = make_regular_bec(3, 6, 0.50);
    const ModelPtr prod = make_product_model({m1, m2});

    const double bad1 = oracle::bec_bad_solution(3, 6, 0.46);
    const double bad2 = oracle::bec_bad_solution(3, 6, 0.50);
    const int n = 33;
    const double m_coeff = 4e-3;
    const double dt = 0.005;  // explicit: the auto bound differs per system
    const int steps = 400;

    ContinuumField joint(1, n, 2, Chart::VAffine, m_coeff,
                         prod->grad_G(Vec{bad1, bad2}), prod->grad_G(Vec{0.0, 0.0}));
    ContinuumField part1(1, n, 1, Chart::VAffine, m_coeff, m1->grad_G(Vec{bad1}),
                         m1->grad_G(Vec{0.0}));
    ContinuumField part2(1, n, 1, Chart::VAffine, m_coeff, m2->grad_G(Vec{bad2}),
                         m2->grad_G(Vec{0.0}));
    PdeWorkspace wj, w1, w2;
    for (int i = 0; i < steps; ++i) {
        pde_step(*prod, joint, dt, wj);
        pde_step(*m1, part1, dt, w1);
        pde_step(*m2, part2, dt, w2);
    }
    double worst = 0.0;
    for (std::size_t node = 0; node < joint.node_count(); ++node) {
        worst = std::max(worst, std::abs(joint.values[2 * node] - part1.values[node]));
        worst = std::max(worst, std::abs(joint.values[2 * node + 1] - part2.values[node]));
    }
    CHECK(worst < 1e-12);

    const double hj = energy_functional(*prod, joint);
    const double h1 = energy_functional(*m1, part1);
    const double h2 = energy_functional(*m2, part2);
    CHECK(std::abs(hj - (h1 + h2)) < 1e-12);
}

TEST_CASE("continuum profile slices through the center") {
    const ModelPtr m = make_regular_bec(3, 6, 0.46);
    const Vec vt = m->grad_G(Vec{0.25});
    ContinuumField f(2, 9, 1, Chart::VAffine, 1e-3, vt, vt);
    const auto profile = continuum_profile(*m, f, 0);
    REQUIRE(profile.size() == 9);
    CHECK(profile.front().x == -1.0);
    CHECK(profile.back().x == 1.0);
    for (const auto& s : profile) {
        CHECK(s.value[0] == vt[0]);
        CHECK(std::abs(s.preimage[0] - 0.25) < 1e-11);
        CHECK(std::abs(s.perf - 0.25) < 1e-11);
    }
}
