#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gsc/exec.hpp"
#include "gsc/model.hpp"
#include "gsc/potential.hpp"

namespace gsc {

/// Coupling geometry: dimension K, half-size L (positions [-L+1 : L-1]^K),
/// window W, pinned boundary state, and the derived diffusion coefficient
/// m_coeff = (1 / (L^2 (2W+1))) * sum_{m=-W..W} m^2.
struct CouplingConfig {
    int k = 1;
    int l_size = 2;
    int w = 0;
    VectorState boundary;  // chart U; read for every position off the lattice
    double m_coeff = 0.0;
};

CouplingConfig make_coupling_config(int k, int l_size, int w, VectorState boundary);

double coupling_m_coeff(int l_size, int w);

/// Dense field over [-L+1 : L-1]^K, one N-vector per site, site-major storage
/// with components fastest (C order over positions). Reads off the lattice
/// return the pinned value exactly.
class LatticeField {
public:
    LatticeField(const CouplingConfig& config, std::size_t ncomp, Vec fill,
                 Vec pinned);

    const CouplingConfig& config() const { return config_; }
    std::size_t ncomp() const { return ncomp_; }
    int extent() const { return 2 * config_.l_size - 1; }
    std::size_t site_count() const { return site_count_; }
    const Vec& pinned() const { return pinned_; }

    long t = 0;
    Vec data;  // site_count * ncomp

    /// Flat index of lattice coordinates c in [0, extent)^K.
    std::size_t flat_index(std::span<const int> coords) const;
    /// Lattice coordinates of a flat index; position = coords - (L-1).
    std::array<int, kMaxCouplingDim> coords_of(std::size_t flat) const;

    /// Component value at an arbitrary position (may be off-lattice).
    double at(std::span<const int> position, std::size_t comp) const;

    Vec site(std::size_t flat) const;
    void set_site(std::size_t flat, std::span<const double> value);

private:
    CouplingConfig config_;
    std::size_t ncomp_;
    std::size_t site_count_;
    Vec pinned_;
};

enum class WindowDirection { Forward, Backward };

/// Uniform average over the (2W+1)^K window around `position`, off-lattice
/// shifts pinned. Forward reads position+m, backward position-m. Terms are
/// accumulated in sign-orbit pairs so the result is exactly invariant under
/// per-axis reflection of a symmetric field.
Vec window_average(const LatticeField& field, std::span<const int> position,
                   WindowDirection direction);

/// Scratch buffers reused across gsc_step calls.
struct GscWorkspace {
    Vec gvals, v, fvals, next;
};

struct GscStepInfo {
    double linf_change = 0.0;
};

/// One synchronous update of the coupled DE: all v's from the frozen u field,
/// then all u's from the frozen v field. Both half-steps are parallel maps
/// over sites; results do not depend on the worker count. Throws on a
/// non-finite value, naming the offending position.
GscStepInfo gsc_step(const SystemModel& model, LatticeField& field,
                     GscWorkspace& work, Execution exec = Execution::Parallel);

enum class GscInit { AllBad, AllGood, Custom };

struct GscRunOptions {
    GscInit init = GscInit::AllBad;
    Vec custom_init;
    long max_iters = 100000;
    double stop_eps = 1e-10;
    Execution exec = Execution::Parallel;
    long snapshot_every = 0;
    std::function<void(const LatticeField&)> snapshot;
};

struct GscHistoryRow {
    long iter;
    double linf_change;
    double max_perf;
    double mean_perf;
};

struct GscRunResult {
    LatticeField field;
    std::vector<GscHistoryRow> history;
    bool converged = false;
    long iters = 0;
};

/// Iterate gsc_step until the l-inf change drops below stop_eps or max_iters
/// is hit (reported as converged=false with the last field). AllBad starts
/// from the worst stable fixed point (domain top corner when none exists),
/// AllGood from the boundary state.
GscRunResult run_gsc(const SystemModel& model, const CouplingConfig& config,
                     const GscRunOptions& opts);

struct ProfileSample {
    double x;  // position / L
    double perf;
    Vec u;
};

/// 1-D slice along `axis` through the lattice center (other coordinates 0).
std::vector<ProfileSample> profile_extract(const SystemModel& model,
                                           const LatticeField& field, int axis);

/// Flat binary snapshot: header of three little-endian uint64 (K, L, N), then
/// site-major little-endian doubles.
void write_lattice_snapshot(const std::string& path, const LatticeField& field);

struct SnapshotData {
    std::uint64_t k, l_size, ncomp;
    Vec data;
};
SnapshotData read_lattice_snapshot(const std::string& path);

}  // namespace gsc
