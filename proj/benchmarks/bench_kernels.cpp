// Timings of the data-parallel kernels: production kernel with serial vs
// parallel execution, plus an agreement check against the plain reference
// implementations in gsc::ref.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "gsc/reference.hpp"

using namespace gsc;
namespace chrono = std::chrono;

namespace {

double ms_since(chrono::steady_clock::time_point t0) {
    return chrono::duration<double, std::milli>(chrono::steady_clock::now() - t0).count();
}

void report(const char* kernel, double serial_ms, double parallel_ms, double ref_diff) {
    std::printf(
        "%-24s serial %8.1f ms   parallel %8.1f ms   speedup %4.2fx   |ref diff| %g\n",
        kernel, serial_ms, parallel_ms, serial_ms / parallel_ms, ref_diff);
}

}  // namespace

int main() {
    std::printf("workers: %d\n", worker_count());
    const ModelPtr model = make_regular_bec(3, 6, 0.46);

    // lattice step, K=2
    {
        const int iters = 40;
        const CouplingConfig cfg =
            make_coupling_config(2, 64, 2, VectorState{{0.0}, Chart::U});
        LatticeField serial_field(cfg, 1, Vec{0.4}, Vec{0.0});
        LatticeField parallel_field = serial_field;
        GscWorkspace w1, w2;

        auto t0 = chrono::steady_clock::now();
        for (int i = 0; i < iters; ++i) gsc_step(*model, serial_field, w1, Execution::Serial);
        const double serial_ms = ms_since(t0);

        t0 = chrono::steady_clock::now();
        for (int i = 0; i < iters; ++i)
            gsc_step(*model, parallel_field, w2, Execution::Parallel);
        const double parallel_ms = ms_since(t0);

        // correctness vs the direct reference on a smaller field
        const CouplingConfig small =
            make_coupling_config(2, 12, 2, VectorState{{0.0}, Chart::U});
        LatticeField fast(small, 1, Vec{0.4}, Vec{0.0});
        LatticeField ref = fast;
        GscWorkspace w3;
        for (int i = 0; i < 3; ++i) {
            gsc_step(*model, fast, w3, Execution::Parallel);
            ref::gsc_step(*model, ref);
        }
        report("gsc_step k=2 L=64 W=2", serial_ms, parallel_ms,
               linf_diff(fast.data, ref.data));

        if (serial_field.data != parallel_field.data)
            std::printf("  WARNING: serial/parallel mismatch in gsc_step\n");
    }

    // pde step, K=1
    {
        const int steps = 200;
        const double m_coeff = 1e-3;
        const int n = 4097;
        const Vec vt_bad = model->grad_G(Vec{0.4});
        const Vec vt_good = model->grad_G(Vec{0.0});
        ContinuumField serial_field(1, n, 1, Chart::VAffine, m_coeff, vt_bad, vt_good);
        ContinuumField parallel_field = serial_field;
        const double dt = pde_auto_dt(*model, m_coeff, serial_field.dx());

        PdeWorkspace ws1, ws2;
        auto t0 = chrono::steady_clock::now();
        for (int i = 0; i < steps; ++i)
            pde_step(*model, serial_field, dt, ws1, Execution::Serial);
        const double serial_ms = ms_since(t0);

        t0 = chrono::steady_clock::now();
        for (int i = 0; i < steps; ++i)
            pde_step(*model, parallel_field, dt, ws2, Execution::Parallel);
        const double parallel_ms = ms_since(t0);

        ContinuumField fast(1, 129, 1, Chart::VAffine, m_coeff, vt_bad, vt_good);
        ContinuumField ref = fast;
        PdeWorkspace ws3;
        const double dt_small = pde_auto_dt(*model, m_coeff, fast.dx());
        for (int i = 0; i < 5; ++i) {
            pde_step(*model, fast, dt_small, ws3, Execution::Parallel);
            ref::pde_step(*model, ref, dt_small);
        }
        report("pde_step k=1 n=4097", serial_ms, parallel_ms,
               linf_diff(fast.values, ref.values));

        if (serial_field.values != parallel_field.values)
            std::printf("  WARNING: serial/parallel mismatch in pde_step\n");
    }

    // energy functional, K=2
    {
        const int reps = 20;
        const Vec vt = model->grad_G(Vec{0.35});
        ContinuumField field(2, 257, 1, Chart::VAffine, 1e-3, vt, vt);
        for (std::size_t node = 0; node < field.node_count(); ++node) {
            if (field.is_boundary(node)) continue;
            const auto c = field.coords_of(node);
            field.values[node] +=
                0.05 * std::sin(1.7 * field.x_of(c[0])) * std::cos(0.9 * field.x_of(c[1]));
        }

        auto t0 = chrono::steady_clock::now();
        double serial_h = 0.0;
        for (int i = 0; i < reps; ++i)
            serial_h = energy_functional(*model, field, nullptr, Execution::Serial);
        const double serial_ms = ms_since(t0);

        t0 = chrono::steady_clock::now();
        double parallel_h = 0.0;
        for (int i = 0; i < reps; ++i)
            parallel_h = energy_functional(*model, field, nullptr, Execution::Parallel);
        const double parallel_ms = ms_since(t0);

        const double ref_h = ref::energy_functional(*model, field);
        report("energy k=2 n=257^2", serial_ms, parallel_ms, std::abs(ref_h - parallel_h));
        if (serial_h != parallel_h)
            std::printf("  WARNING: serial/parallel mismatch in energy\n");
    }
    return 0;
}
