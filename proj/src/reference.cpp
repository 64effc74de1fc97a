#include "gsc/reference.hpp"

#include <algorithm>
#include <cmath>

namespace gsc::ref {

namespace {

// Enumerate the window [-W:W]^K lexicographically.
bool next_offset(int* m, int k, int w) {
    for (int a = k; a-- > 0;) {
        if (m[a] < w) {
            ++m[a];
            for (int b = a + 1; b < k; ++b) m[b] = -w;
            return true;
        }
    }
    return false;
}

Vec averaged_read(const LatticeField& field, const Vec& values, const Vec& pinned,
                  const int* pos, int dir, int k, int w, std::size_t nc) {
    const int l1 = field.config().l_size - 1;
    const int extent = field.extent();
    Vec acc(nc, 0.0);
    int m[kMaxCouplingDim] = {-w, -w, -w};
    long count = 0;
    do {
        std::size_t flat = 0;
        bool inside = true;
        for (int a = 0; a < k; ++a) {
            const int c = pos[a] + l1 + dir * m[a];
            if (c < 0 || c >= extent) {
                inside = false;
                break;
            }
            flat = flat * static_cast<std::size_t>(extent) + static_cast<std::size_t>(c);
        }
        for (std::size_t comp = 0; comp < nc; ++comp)
            acc[comp] += inside ? values[flat * nc + comp] : pinned[comp];
        ++count;
    } while (next_offset(m, k, w));
    for (std::size_t comp = 0; comp < nc; ++comp) acc[comp] /= static_cast<double>(count);
    return acc;
}

}  // namespace

Vec window_average(const LatticeField& field, std::span<const int> position,
                   WindowDirection direction) {
    const CouplingConfig& cfg = field.config();
    int pos[kMaxCouplingDim] = {0, 0, 0};
    for (int a = 0; a < cfg.k; ++a) pos[a] = position[a];
    return averaged_read(field, field.data, field.pinned(), pos,
                         direction == WindowDirection::Forward ? 1 : -1, cfg.k, cfg.w,
                         field.ncomp());
}

GscStepInfo gsc_step(const SystemModel& model, LatticeField& field) {
    const CouplingConfig& cfg = field.config();
    const std::size_t nc = field.ncomp();
    const std::size_t nsites = field.site_count();

    // u value at an arbitrary position; off-lattice resolves to the boundary
    const auto u_at = [&](const int* pos) {
        Vec u(nc);
        for (std::size_t c = 0; c < nc; ++c)
            u[c] = field.at(std::span<const int>(pos, static_cast<std::size_t>(cfg.k)), c);
        return u;
    };

    // v(q) = < grad_G(u(q - m)) >_m, defined for any position q
    const auto v_at = [&](const int* pos) {
        Vec acc(nc, 0.0);
        int m[kMaxCouplingDim] = {-cfg.w, -cfg.w, -cfg.w};
        long count = 0;
        do {
            int q[kMaxCouplingDim] = {0, 0, 0};
            for (int a = 0; a < cfg.k; ++a) q[a] = pos[a] - m[a];
            const Vec g = model.grad_G(u_at(q));
            for (std::size_t c = 0; c < nc; ++c) acc[c] += g[c];
            ++count;
        } while (next_offset(m, cfg.k, cfg.w));
        for (std::size_t c = 0; c < nc; ++c) acc[c] /= static_cast<double>(count);
        model.domain_Dtilde().clamp(acc);
        return acc;
    };

    Vec next(nsites * nc);
    GscStepInfo info;
    for (std::size_t s = 0; s < nsites; ++s) {
        const auto coords = field.coords_of(s);
        int pos[kMaxCouplingDim] = {0, 0, 0};
        for (int a = 0; a < cfg.k; ++a) pos[a] = coords[a] - (cfg.l_size - 1);
        Vec acc(nc, 0.0);
        int m[kMaxCouplingDim] = {-cfg.w, -cfg.w, -cfg.w};
        long count = 0;
        do {
            int q[kMaxCouplingDim] = {0, 0, 0};
            for (int a = 0; a < cfg.k; ++a) q[a] = pos[a] + m[a];
            const Vec f = model.grad_F(v_at(q));
            for (std::size_t c = 0; c < nc; ++c) acc[c] += f[c];
            ++count;
        } while (next_offset(m, cfg.k, cfg.w));
        for (std::size_t c = 0; c < nc; ++c) acc[c] /= static_cast<double>(count);
        model.domain_D().clamp(acc);
        for (std::size_t c = 0; c < nc; ++c) {
            info.linf_change =
                std::max(info.linf_change, std::abs(acc[c] - field.data[s * nc + c]));
            next[s * nc + c] = acc[c];
        }
    }
    field.data.swap(next);
    field.t += 1;
    return info;
}

PdeStepInfo pde_step(const SystemModel& model, ContinuumField& field, double dt) {
    const std::size_t nc = field.ncomp();
    const std::size_t nodes = field.node_count();
    const double m = field.m_coeff();
    const Box& box = model.chart_box(field.chart());
    const bool primal = field.chart() == Chart::VAffine;

    Vec next(nodes * nc);
    PdeStepInfo info;
    Vec seed = primal ? model.domain_D().center() : model.domain_Dtilde().center();
    for (std::size_t node = 0; node < nodes; ++node) {
        if (field.is_boundary(node)) {
            std::copy(field.boundary_value().begin(), field.boundary_value().end(),
                      next.begin() + node * nc);
            continue;
        }
        const Vec w = field.node(node);
        seed = affine_invert(model, field.chart(), w, std::move(seed));
        const Vec c = coupling_operator(model, field, node);
        const Vec fw = primal ? model.grad_F(w) : model.grad_G(w);
        Vec bracket(nc);
        for (std::size_t b = 0; b < nc; ++b) bracket[b] = -(seed[b] - fw[b]) + m * c[b];
        const Vec rate =
            mat_vec(primal ? model.hess_G(seed) : model.hess_F(seed), bracket);
        info.max_rate = std::max(info.max_rate, linf_norm(rate));
        for (std::size_t cc = 0; cc < nc; ++cc) {
            double v = w[cc] + dt * rate[cc];
            v = std::min(box.hi[cc], std::max(box.lo[cc], v));
            info.max_change =
                std::max(info.max_change, std::abs(v - field.values[node * nc + cc]));
            next[node * nc + cc] = v;
        }
    }
    field.values.swap(next);
    return info;
}

double energy_functional(const SystemModel& model, const ContinuumField& field) {
    const std::size_t nc = field.ncomp();
    const double m = field.m_coeff();
    double cell = 1.0;
    for (int a = 0; a < field.k(); ++a) cell *= field.dx();
    const bool primal = field.chart() == Chart::VAffine;

    double total = 0.0;
    Vec seed = primal ? model.domain_D().center() : model.domain_Dtilde().center();
    for (std::size_t node = 0; node < field.node_count(); ++node) {
        const Vec w = field.node(node);
        seed = affine_invert(model, field.chart(), w, std::move(seed));
        const double pot =
            primal ? potential(model, seed) : dual_potential(model, seed);
        const Mat h = primal ? model.hess_F(w) : model.hess_G(w);
        double grad_term = 0.0;
        for (int ax = 0; ax < field.k(); ++ax)
            for (std::size_t a = 0; a < nc; ++a)
                for (std::size_t b = 0; b < nc; ++b)
                    grad_term +=
                        field_d1(field, node, ax, a) * field_d1(field, node, ax, b) * h(a, b);
        double weight = cell;
        const auto coords = field.coords_of(node);
        for (int ax = 0; ax < field.k(); ++ax)
            if (coords[ax] == 0 || coords[ax] == field.n() - 1) weight *= 0.5;
        total += weight * (pot + 0.5 * m * grad_term);
    }
    return total;
}

}  // namespace gsc::ref
