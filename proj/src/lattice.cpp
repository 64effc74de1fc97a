#include "gsc/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gsc {

double coupling_m_coeff(int l_size, int w) {
    double s = 0.0;
    for (int m = -w; m <= w; ++m) s += static_cast<double>(m) * m;
    return s / (static_cast<double>(l_size) * l_size * (2.0 * w + 1.0));
}

CouplingConfig make_coupling_config(int k, int l_size, int w, VectorState boundary) {
    if (k < 1 || k > kMaxCouplingDim)
        throw std::invalid_argument("coupling config: k must lie in [1,3]");
    if (l_size < 2) throw std::invalid_argument("coupling config: l_size must be >= 2");
    if (w < 0) throw std::invalid_argument("coupling config: w must be >= 0");
    if (boundary.chart != Chart::U)
        throw std::invalid_argument("coupling config: boundary must be in chart u");
    if (!all_finite(boundary.values))
        throw std::invalid_argument("coupling config: non-finite boundary");
    CouplingConfig cfg;
    cfg.k = k;
    cfg.l_size = l_size;
    cfg.w = w;
    cfg.boundary = std::move(boundary);
    cfg.m_coeff = coupling_m_coeff(l_size, w);
    return cfg;
}

LatticeField::LatticeField(const CouplingConfig& config, std::size_t ncomp,
                           Vec fill, Vec pinned)
    : config_(config), ncomp_(ncomp), pinned_(std::move(pinned)) {
    if (fill.size() != ncomp_ || pinned_.size() != ncomp_)
        throw std::invalid_argument("lattice field: component count mismatch");
    site_count_ = 1;
    for (int a = 0; a < config_.k; ++a) site_count_ *= static_cast<std::size_t>(extent());
    data.resize(site_count_ * ncomp_);
    for (std::size_t s = 0; s < site_count_; ++s)
        std::copy(fill.begin(), fill.end(), data.begin() + s * ncomp_);
}

std::size_t LatticeField::flat_index(std::span<const int> coords) const {
    std::size_t flat = 0;
    for (int a = 0; a < config_.k; ++a)
        flat = flat * static_cast<std::size_t>(extent()) + static_cast<std::size_t>(coords[a]);
    return flat;
}

std::array<int, kMaxCouplingDim> LatticeField::coords_of(std::size_t flat) const {
    std::array<int, kMaxCouplingDim> c{};
    for (int a = config_.k; a-- > 0;) {
        c[a] = static_cast<int>(flat % static_cast<std::size_t>(extent()));
        flat /= static_cast<std::size_t>(extent());
    }
    return c;
}

double LatticeField::at(std::span<const int> position, std::size_t comp) const {
    std::size_t flat = 0;
    for (int a = 0; a < config_.k; ++a) {
        const int c = position[a] + (config_.l_size - 1);
        if (c < 0 || c >= extent()) return pinned_[comp];
        flat = flat * static_cast<std::size_t>(extent()) + static_cast<std::size_t>(c);
    }
    return data[flat * ncomp_ + comp];
}

Vec LatticeField::site(std::size_t flat) const {
    return Vec(data.begin() + flat * ncomp_, data.begin() + (flat + 1) * ncomp_);
}

void LatticeField::set_site(std::size_t flat, std::span<const double> value) {
    std::copy(value.begin(), value.end(), data.begin() + flat * ncomp_);
}

namespace {

// Window sum over [-W:W]^K accumulated in sign-orbit pairs: per axis the
// m=0 branch first, then (+m) + (-m) for m = 1..W. A field that is symmetric
// under reflection of any axis stays symmetric to the last bit.
struct WindowSummer {
    const double* values;  // site-major, ncomp fastest
    const double* pinned;
    int k;
    int extent;
    int w;
    std::size_t ncomp;
    std::size_t comp;
    int dir;  // +1 forward, -1 backward
    const int* base;  // 0-based coords of the center site

    double read(const int* off) const {
        std::size_t flat = 0;
        for (int a = 0; a < k; ++a) {
            const int c = base[a] + dir * off[a];
            if (c < 0 || c >= extent) return pinned[comp];
            flat = flat * static_cast<std::size_t>(extent) + static_cast<std::size_t>(c);
        }
        return values[flat * ncomp + comp];
    }

    double rec(int axis, int* off) const {
        if (axis == k) return read(off);
        off[axis] = 0;
        double total = rec(axis + 1, off);
        for (int m = 1; m <= w; ++m) {
            off[axis] = m;
            const double plus = rec(axis + 1, off);
            off[axis] = -m;
            const double minus = rec(axis + 1, off);
            total += plus + minus;
        }
        off[axis] = 0;
        return total;
    }

    double average() const {
        int off[kMaxCouplingDim] = {0, 0, 0};
        double denom = 1.0;
        for (int a = 0; a < k; ++a) denom *= 2.0 * w + 1.0;
        return rec(0, off) / denom;
    }
};

double window_component(const double* values, const double* pinned, int k, int extent,
                        int w, std::size_t ncomp, std::size_t comp, int dir,
                        const int* base) {
    WindowSummer s{values, pinned, k, extent, w, ncomp, comp, dir, base};
    return s.average();
}

std::string position_string(const LatticeField& field, std::size_t flat) {
    const auto c = field.coords_of(flat);
    std::ostringstream os;
    os << "(";
    for (int a = 0; a < field.config().k; ++a) {
        if (a) os << ",";
        os << c[a] - (field.config().l_size - 1);
    }
    os << ")";
    return os.str();
}

void check_pass_finite(const LatticeField& field, const Vec& values, const char* pass) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw std::domain_error(std::string("gsc_step: non-finite ") + pass +
                                    " value at position " +
                                    position_string(field, i / field.ncomp()));
        }
    }
}

}  // namespace

Vec window_average(const LatticeField& field, std::span<const int> position,
                   WindowDirection direction) {
    const CouplingConfig& cfg = field.config();
    int base[kMaxCouplingDim] = {0, 0, 0};
    for (int a = 0; a < cfg.k; ++a) {
        base[a] = position[a] + (cfg.l_size - 1);
        if (base[a] < 0 || base[a] >= field.extent())
            throw std::invalid_argument("window_average: position outside the lattice");
    }
    const int dir = direction == WindowDirection::Forward ? 1 : -1;
    Vec out(field.ncomp());
    for (std::size_t c = 0; c < field.ncomp(); ++c)
        out[c] = window_component(field.data.data(), field.pinned().data(), cfg.k,
                                  field.extent(), cfg.w, field.ncomp(), c, dir, base);
    return out;
}

GscStepInfo gsc_step(const SystemModel& model, LatticeField& field,
                     GscWorkspace& work, Execution exec) {
    const CouplingConfig& cfg = field.config();
    const std::size_t nsites = field.site_count();
    const std::size_t nc = field.ncomp();
    const int extent = field.extent();

    // The v half-step lives on the W-extended lattice: the u update reads
    // v(l+m), and v there is well defined from the pinned u field alone.
    const int ext_extent = extent + 2 * cfg.w;
    std::size_t ext_sites = 1;
    for (int a = 0; a < cfg.k; ++a) ext_sites *= static_cast<std::size_t>(ext_extent);

    work.gvals.resize(nsites * nc);
    work.v.resize(ext_sites * nc);
    work.fvals.resize(ext_sites * nc);
    work.next.resize(nsites * nc);

    const Vec gpin = model.grad_G(field.pinned());
    const Box& box_dt = model.domain_Dtilde();
    const Box& box_d = model.domain_D();

    parallel_for(static_cast<std::int64_t>(nsites), exec, [&](std::int64_t s) {
        const Vec g = model.grad_G(field.site(static_cast<std::size_t>(s)));
        std::copy(g.begin(), g.end(), work.gvals.begin() + s * static_cast<std::int64_t>(nc));
    });
    check_pass_finite(field, work.gvals, "grad_G");

    // extended-lattice coordinates run over [-L+1-W : L-1+W]^K; reads of
    // grad_G(u) beyond the stored lattice resolve to grad_G(boundary) exactly
    const auto ext_coords = [&](std::size_t flat, int* out) {
        for (int a = cfg.k; a-- > 0;) {
            out[a] = static_cast<int>(flat % static_cast<std::size_t>(ext_extent)) - cfg.w;
            flat /= static_cast<std::size_t>(ext_extent);
        }
    };

    // v(l) = < grad_G(u(l-m)) >_m on the extended lattice
    parallel_for(static_cast<std::int64_t>(ext_sites), exec, [&](std::int64_t s) {
        int base[kMaxCouplingDim] = {0, 0, 0};
        ext_coords(static_cast<std::size_t>(s), base);
        for (std::size_t c = 0; c < nc; ++c) {
            double v = window_component(work.gvals.data(), gpin.data(), cfg.k, extent,
                                        cfg.w, nc, c, -1, base);
            v = std::min(box_dt.hi[c], std::max(box_dt.lo[c], v));
            work.v[static_cast<std::size_t>(s) * nc + c] = v;
        }
    });

    parallel_for(static_cast<std::int64_t>(ext_sites), exec, [&](std::int64_t s) {
        const std::size_t off = static_cast<std::size_t>(s) * nc;
        const Vec f = model.grad_F(Vec(work.v.begin() + off, work.v.begin() + off + nc));
        std::copy(f.begin(), f.end(), work.fvals.begin() + off);
    });
    check_pass_finite(field, work.fvals, "grad_F");

    // u+(l) = < grad_F(v(l+m)) >_m ; every read stays inside the extension
    parallel_for(static_cast<std::int64_t>(nsites), exec, [&](std::int64_t s) {
        auto coords = field.coords_of(static_cast<std::size_t>(s));
        int base[kMaxCouplingDim] = {0, 0, 0};
        for (int a = 0; a < cfg.k; ++a) base[a] = coords[a] + cfg.w;
        for (std::size_t c = 0; c < nc; ++c) {
            double u = window_component(work.fvals.data(), nullptr, cfg.k, ext_extent,
                                        cfg.w, nc, c, +1, base);
            u = std::min(box_d.hi[c], std::max(box_d.lo[c], u));
            work.next[static_cast<std::size_t>(s) * nc + c] = u;
        }
    });
    check_pass_finite(field, work.next, "update");

    GscStepInfo info;
    for (std::size_t i = 0; i < nsites * nc; ++i)
        info.linf_change = std::max(info.linf_change, std::abs(work.next[i] - field.data[i]));
    field.data.swap(work.next);
    field.t += 1;
    return info;
}

GscRunResult run_gsc(const SystemModel& model, const CouplingConfig& config,
                     const GscRunOptions& opts) {
    const std::size_t n = model.dim();
    if (config.boundary.values.size() != n)
        throw std::invalid_argument("run_gsc: boundary dimension mismatch");

    Vec fill;
    switch (opts.init) {
        case GscInit::AllGood:
            fill = config.boundary.values;
            break;
        case GscInit::AllBad: {
            const FixedPointReport report = find_fixed_points(model);
            fill = report.bad ? report.points[*report.bad].u.values : model.domain_D().hi;
            break;
        }
        case GscInit::Custom:
            if (opts.custom_init.size() != n)
                throw std::invalid_argument("run_gsc: custom init dimension mismatch");
            fill = opts.custom_init;
            break;
    }

    GscRunResult out{LatticeField(config, n, fill, config.boundary.values), {}, false, 0};
    GscWorkspace work;
    Vec perf_buf(out.field.site_count());

    for (long iter = 1; iter <= opts.max_iters; ++iter) {
        const GscStepInfo info = gsc_step(model, out.field, work, opts.exec);

        parallel_for(static_cast<std::int64_t>(out.field.site_count()), opts.exec,
                     [&](std::int64_t s) {
                         perf_buf[static_cast<std::size_t>(s)] =
                             model.perf(out.field.site(static_cast<std::size_t>(s)));
                     });
        double max_perf = perf_buf[0];
        for (double p : perf_buf) max_perf = std::max(max_perf, p);
        const double mean_perf = pairwise_sum(perf_buf) / static_cast<double>(perf_buf.size());

        out.history.push_back({iter, info.linf_change, max_perf, mean_perf});
        out.iters = iter;
        if (opts.snapshot_every > 0 && opts.snapshot && iter % opts.snapshot_every == 0)
            opts.snapshot(out.field);
        if (info.linf_change < opts.stop_eps) {
            out.converged = true;
            break;
        }
    }
    return out;
}

std::vector<ProfileSample> profile_extract(const SystemModel& model,
                                           const LatticeField& field, int axis) {
    const CouplingConfig& cfg = field.config();
    if (axis < 0 || axis >= cfg.k)
        throw std::invalid_argument("profile_extract: axis out of range");
    std::vector<ProfileSample> out;
    out.reserve(static_cast<std::size_t>(field.extent()));
    int coords[kMaxCouplingDim] = {0, 0, 0};
    for (int a = 0; a < cfg.k; ++a) coords[a] = cfg.l_size - 1;  // center
    for (int p = -(cfg.l_size - 1); p <= cfg.l_size - 1; ++p) {
        coords[axis] = p + (cfg.l_size - 1);
        const std::size_t flat = field.flat_index(std::span<const int>(coords, cfg.k));
        Vec u = field.site(flat);
        out.push_back({static_cast<double>(p) / cfg.l_size, model.perf(u), std::move(u)});
    }
    return out;
}

namespace {

void put_u64_le(std::ofstream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}

std::uint64_t get_u64_le(std::ifstream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64_le(std::ofstream& os, double d) {
    put_u64_le(os, std::bit_cast<std::uint64_t>(d));
}

}  // namespace

void write_lattice_snapshot(const std::string& path, const LatticeField& field) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path);
    put_u64_le(os, static_cast<std::uint64_t>(field.config().k));
    put_u64_le(os, static_cast<std::uint64_t>(field.config().l_size));
    put_u64_le(os, static_cast<std::uint64_t>(field.ncomp()));
    for (double d : field.data) put_f64_le(os, d);
    if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

SnapshotData read_lattice_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path);
    SnapshotData out;
    out.k = get_u64_le(is);
    out.l_size = get_u64_le(is);
    out.ncomp = get_u64_le(is);
    std::size_t sites = 1;
    for (std::uint64_t a = 0; a < out.k; ++a)
        sites *= static_cast<std::size_t>(2 * out.l_size - 1);
    out.data.resize(sites * static_cast<std::size_t>(out.ncomp));
    for (double& d : out.data) {
        unsigned char b[8];
        is.read(reinterpret_cast<char*>(b), 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        d = std::bit_cast<double>(v);
    }
    if (!is) throw std::runtime_error("snapshot: truncated file " + path);
    return out;
}

}  // namespace gsc
