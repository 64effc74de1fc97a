#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gsc/model.hpp"
#include "gsc/potential.hpp"
#include "oracles.hpp"

using namespace gsc;

TEST_CASE("regular bec closed forms") {
    const ModelPtr m = make_regular_bec(3, 6, 0.5);
    CHECK(m->dim() == 1);
    CHECK(m->grad_G(Vec{1.0})[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m->grad_F(Vec{1.0})[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m->grad_G(Vec{0.0})[0] == 0.0);
    CHECK(m->grad_F(Vec{0.0})[0] == 0.0);
    CHECK(m->eval_G(Vec{1.0}) == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
    CHECK(m->eval_F(Vec{1.0}) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(m->perf(Vec{0.37}) == 0.37);

    const ModelPtr m45 = make_regular_bec(3, 6, 0.45);
    for (double u : {0.0, 0.2, 0.61, 0.95, 1.0}) {
        const double expect = 5.0 * std::pow(1.0 - u, 4);
        CHECK(m45->hess_G(Vec{u})(0, 0) == doctest::Approx(expect).epsilon(1e-13));
        CHECK(m45->hess_G(Vec{u})(0, 0) >= 0.0);
    }
}

TEST_CASE("regular bec rejects bad parameters") {
    CHECK_THROWS_AS(make_regular_bec(2, 6, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_regular_bec(3, 2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_regular_bec(4, 3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_regular_bec(3, 6, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(make_regular_bec(3, 6, -0.1), std::invalid_argument);
    CHECK_NOTHROW(make_regular_bec(3, 3, 0.0));
}

TEST_CASE("de_step matches the textbook recursion") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double u = unit(rng), eps = unit(rng);
        const ModelPtr m = make_regular_bec(3, 6, eps);
        const auto [next, v] = de_step(*m, VectorState{{u}, Chart::U});
        CHECK(std::abs(next.values[0] - oracle::bec_map(3, 6, eps, u)) < 1e-12);
        CHECK(v.chart == Chart::V);
        CHECK(v.values[0] == doctest::Approx(1.0 - std::pow(1.0 - u, 5)).epsilon(1e-14));
    }
}

TEST_CASE("de_step direct example and chart checks") {
    const ModelPtr m = make_regular_bec(3, 6, 0.5);
    const auto [next, v] = de_step(*m, VectorState{{1.0}, Chart::U});
    CHECK(v.values[0] == 1.0);
    CHECK(next.values[0] == 0.5);
    CHECK_THROWS_AS(de_step(*m, VectorState{{0.5}, Chart::V}), std::invalid_argument);
}

TEST_CASE("fixed points of the map are preserved by de_step") {
    for (double eps : {0.45, 0.50, 0.55}) {
        const ModelPtr m = make_regular_bec(3, 6, eps);
        for (double u : oracle::bec_fixed_points(3, 6, eps)) {
            const auto [next, v] = de_step(*m, VectorState{{u}, Chart::U});
            CHECK(std::abs(next.values[0] - u) < 1e-12);
        }
    }
}

TEST_CASE("below the iterative threshold the recursion decodes") {
    const ModelPtr m = make_regular_bec(3, 6, 0.42);
    const Vec end = iterate_de(*m, Vec{1.0}, 10000);
    CHECK(end[0] < 1e-8);
    // cross-check against the plain textbook iteration
    CHECK(std::abs(end[0] - oracle::bec_iterate(3, 6, 0.42, 1.0, 10000)) < 1e-12);
}

TEST_CASE("product model block structure") {
    const ModelPtr a = make_regular_bec(3, 6, 0.3);
    const ModelPtr b = make_regular_bec(3, 6, 0.3);
    const ModelPtr p = make_product_model({a, b});
    CHECK(p->dim() == 2);

    const Vec u{0.3, 0.7};
    const Mat h = p->hess_G(u);
    CHECK(h(0, 1) == 0.0);
    CHECK(h(1, 0) == 0.0);
    CHECK(h(0, 0) == doctest::Approx(a->hess_G(Vec{0.3})(0, 0)));
    CHECK(h(1, 1) == doctest::Approx(b->hess_G(Vec{0.7})(0, 0)));

    CHECK(p->perf(u) == doctest::Approx(1.0));
    CHECK(p->eval_G(u) ==
          doctest::Approx(a->eval_G(Vec{0.3}) + b->eval_G(Vec{0.7})).epsilon(1e-15));

    const Vec g = p->grad_G(u);
    CHECK(g[0] == a->grad_G(Vec{0.3})[0]);
    CHECK(g[1] == b->grad_G(Vec{0.7})[0]);
}

TEST_CASE("product potential splits into component potentials") {
    const ModelPtr p =
        make_product_model({make_regular_bec(3, 6, 0.45), make_regular_bec(3, 6, 0.50)});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const double u1 = unit(rng), u2 = unit(rng);
        const double split = oracle::bec_potential(3, 6, 0.45, u1) +
                             oracle::bec_potential(3, 6, 0.50, u2);
        CHECK(std::abs(potential(*p, Vec{u1, u2}) - split) < 1e-12);
    }
}

TEST_CASE("product fixed points are the component products") {
    const ModelPtr p =
        make_product_model({make_regular_bec(3, 6, 0.45), make_regular_bec(3, 6, 0.50)});
    const auto r1 = oracle::bec_fixed_points(3, 6, 0.45);
    const auto r2 = oracle::bec_fixed_points(3, 6, 0.50);
    const FixedPointReport report = find_fixed_points(*p, 129);
    CHECK(report.points.size() == r1.size() * r2.size());
    for (double a : r1)
        for (double b : r2) {
            bool found = false;
            for (const FixedPoint& fp : report.points)
                if (std::abs(fp.u.values[0] - a) < 1e-7 &&
                    std::abs(fp.u.values[1] - b) < 1e-7)
                    found = true;
            CHECK(found);
        }
}

namespace {

// quartic/quadratic pair without analytic thirds: exercises the
// finite-difference fallback against hand-computed values
class FallbackModel final : public SystemModel {
public:
    std::size_t dim() const override { return 1; }
    double eval_F(const Vec& v) const override { return 0.1 * std::pow(v[0], 4); }
    double eval_G(const Vec& u) const override { return 0.25 * std::pow(u[0], 4); }
    Vec grad_F(const Vec& v) const override { return {0.4 * std::pow(v[0], 3)}; }
    Vec grad_G(const Vec& u) const override { return {std::pow(u[0], 3)}; }
    Mat hess_F(const Vec& v) const override {
        Mat m(1);
        m(0, 0) = 1.2 * v[0] * v[0];
        return m;
    }
    Mat hess_G(const Vec& u) const override {
        Mat m(1);
        m(0, 0) = 3.0 * u[0] * u[0];
        return m;
    }
    const Box& domain_D() const override { return box_; }
    const Box& domain_Dtilde() const override { return box_; }
    std::string name() const override { return "fallback_test"; }

private:
    Box box_{{0.0}, {1.0}};
};

}  // namespace

TEST_CASE("finite-difference third derivatives fall back correctly") {
    FallbackModel m;
    for (double x : {0.2, 0.5, 0.8}) {
        CHECK(m.third_F(Vec{x})(0, 0, 0) == doctest::Approx(2.4 * x).epsilon(1e-6));
        CHECK(m.third_G(Vec{x})(0, 0, 0) == doctest::Approx(6.0 * x).epsilon(1e-6));
    }
}

TEST_CASE("third tensors are symmetric in all index pairs") {
    const ModelPtr p =
        make_product_model({make_regular_bec(3, 6, 0.45), make_regular_bec(4, 8, 0.5)});
    const Vec u{0.4, 0.6};
    const Tensor3 t = p->third_G(u);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t c = 0; c < 2; ++c) {
                CHECK(t(a, b, c) == t(a, c, b));
                CHECK(t(a, b, c) == t(b, a, c));
                CHECK(t(a, b, c) == t(c, b, a));
            }
}

TEST_CASE("swapped model exchanges the two sides") {
    const ModelPtr m = make_regular_bec(3, 6, 0.45);
    const ModelPtr s = make_swapped_model(m);
    const Vec x{0.37};
    CHECK(s->eval_F(x) == m->eval_G(x));
    CHECK(s->grad_G(x)[0] == m->grad_F(x)[0]);
    CHECK(s->hess_F(x)(0, 0) == m->hess_G(x)(0, 0));
    // the potential of the swapped model is the dual potential
    CHECK(potential(*s, x) == doctest::Approx(dual_potential(*m, x)).epsilon(1e-15));
}

TEST_CASE("gradients match finite differences of the scalar fields") {
    // tighter than the sampled consistency sweep: 1e-6 relative
    const ModelPtr p =
        make_product_model({make_regular_bec(3, 6, 0.45), make_regular_bec(4, 10, 0.6)});
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> mid(0.05, 0.95);
    for (int i = 0; i < 25; ++i) {
        Vec x{mid(rng), mid(rng)};
        const Vec gg = p->grad_G(x);
        const Vec gf = p->grad_F(x);
        for (std::size_t c = 0; c < 2; ++c) {
            Vec xp = x, xm = x;
            xp[c] += 1e-6;
            xm[c] -= 1e-6;
            const double fd_g = (p->eval_G(xp) - p->eval_G(xm)) / 2e-6;
            const double fd_f = (p->eval_F(xp) - p->eval_F(xm)) / 2e-6;
            CHECK(std::abs(fd_g - gg[c]) / std::max(1.0, std::abs(gg[c])) < 1e-6);
            CHECK(std::abs(fd_f - gf[c]) / std::max(1.0, std::abs(gf[c])) < 1e-6);
        }
    }
}

TEST_CASE("de_step outputs stay in the domain boxes") {
    const ModelPtr m = make_regular_bec(3, 6, 1.0);
    for (double u : {0.0, 0.3, 0.9999999, 1.0}) {
        const auto [next, v] = de_step(*m, VectorState{{u}, Chart::U});
        CHECK(next.values[0] >= 0.0);
        CHECK(next.values[0] <= 1.0);
        CHECK(v.values[0] >= 0.0);
        CHECK(v.values[0] <= 1.0);
    }
}
