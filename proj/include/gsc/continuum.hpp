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

struct AffineInversionError : std::runtime_error {
    Vec last_iterate;
    AffineInversionError(const std::string& msg, Vec last)
        : std::runtime_error(msg), last_iterate(std::move(last)) {}
};

struct SingularHessianError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invert one of the gradient maps by damped Newton to residual 1e-12:
/// VAffine solves grad_G(u) = target for u, UAffine solves grad_F(v) = target
/// for v. Iterates are clamped to the image-side domain box. Throws
/// AffineInversionError with the last iterate when Newton stalls.
///
/// A positive step_tol keeps iterating until the accepted step also falls
/// below it; at degenerate roots (vanishing Hessian) the residual criterion
/// alone leaves a square-root-scale error in the unknown.
Vec affine_invert(const SystemModel& model, Chart affine_chart, const Vec& target,
                  Vec seed, double tol = 1e-12, int max_iters = 80,
                  double step_tol = 0.0);

/// Forward/inverse coordinate change between the original and affine charts.
/// Inversions are seeded from the most recent solution, which keeps Newton at
/// one or two iterations when queried along a continuous path.
class AffineMap {
public:
    explicit AffineMap(ModelPtr model);

    /// u -> v_tilde = grad_G(u), v -> u_tilde = grad_F(v).
    VectorState to_affine(const VectorState& s) const;
    /// v_tilde -> u (Phi), u_tilde -> v (Psi).
    VectorState from_affine(const VectorState& s);

private:
    ModelPtr model_;
    Vec seed_u_, seed_v_;
};

/// N-vector field on the grid of n points per axis over [-1,1]^K, stored in
/// an affine chart. Boundary nodes stay pinned to the boundary value at all
/// times; interior values stay inside the chart's domain box.
class ContinuumField {
public:
    ContinuumField(int k, int n, std::size_t ncomp, Chart chart, double m_coeff,
                   const Vec& interior, Vec boundary);

    int k() const { return k_; }
    int n() const { return n_; }
    std::size_t ncomp() const { return ncomp_; }
    Chart chart() const { return chart_; }
    double m_coeff() const { return m_coeff_; }
    double dx() const { return 2.0 / (n_ - 1); }
    std::size_t node_count() const { return node_count_; }
    const Vec& boundary_value() const { return boundary_; }
    const std::array<std::size_t, kMaxCouplingDim>& strides() const { return strides_; }

    std::array<int, kMaxCouplingDim> coords_of(std::size_t flat) const;
    std::size_t flat_index(std::span<const int> coords) const;
    bool is_boundary(std::size_t flat) const;
    double x_of(int coord) const { return -1.0 + dx() * coord; }

    Vec node(std::size_t flat) const;

    Vec values;  // node-major, components fastest

private:
    int k_, n_;
    std::size_t ncomp_;
    Chart chart_;
    double m_coeff_;
    Vec boundary_;
    std::size_t node_count_;
    std::array<std::size_t, kMaxCouplingDim> strides_{};
};

/// First spatial derivative of component c along axis at a node: central in
/// the interior, second-order one-sided on the boundary.
double field_d1(const ContinuumField& f, std::size_t flat, int axis, std::size_t c);
/// Second derivative; interior nodes only.
double field_d2(const ContinuumField& f, std::size_t flat, int axis, std::size_t c);

/// Second-order coupling operator at an interior node:
///   sum_alpha ( H^{ab} d2_alpha w_b + 1/2 T^{abc} d1_alpha w_b d1_alpha w_c )
/// with (H,T) = (hess_F, third_F) at the node value in the v_tilde chart and
/// (hess_G, third_G) in the u_tilde chart.
Vec coupling_operator(const SystemModel& model, const ContinuumField& field,
                      std::size_t flat);

struct PdeWorkspace {
    Vec next;
    Vec preimage;  // node-major inverse-map values matching the current field
    Vec rate_buf;  // per-node l-inf rate, for deterministic reductions
    bool seeded = false;
};

struct PdeStepInfo {
    double max_rate = 0.0;    // l-inf of the time derivative over interior nodes
    double max_change = 0.0;  // dt * max_rate
};

/// Refresh the cached inverse-map values for the current field state.
void pde_refresh_preimages(const SystemModel& model, const ContinuumField& field,
                           PdeWorkspace& ws, Execution exec = Execution::Parallel);

/// Explicit Euler step of the gradient-flow PDE on interior nodes. In the
/// v_tilde chart the rate is g_ab(Phi(w)) { -(Phi(w) - grad_F(w))^b + M c^b };
/// the u_tilde chart is the mirror image with F and G exchanged. Boundary
/// nodes are re-pinned. Aborts on non-finite values naming the node.
PdeStepInfo pde_step(const SystemModel& model, ContinuumField& field, double dt,
                     PdeWorkspace& ws, Execution exec = Execution::Parallel);

/// Same step, assuming ws.preimage already matches the current field state.
PdeStepInfo pde_step_prepared(const SystemModel& model, ContinuumField& field,
                              double dt, PdeWorkspace& ws,
                              Execution exec = Execution::Parallel);

/// Stability-bound step size 0.2 dx^2 / (M lambda_max + dx^2), lambda_max a
/// sampled spectral bound of the hess_F*hess_G product over the domain.
double pde_auto_dt(const SystemModel& model, double m_coeff, double dx);

/// Energy functional: trapezoidal quadrature of
///   V(Phi(w)) + (M/2) sum_alpha d1 w_a d1 w_b H^{ab}(w)
/// (dual potential and hess_G in the u_tilde chart). Gradients by central
/// differences, one-sided on the boundary; the reduction is a fixed pairwise
/// tree, so the value is bitwise-deterministic.
double energy_functional(const SystemModel& model, const ContinuumField& field,
                         const Vec* preimage = nullptr,
                         Execution exec = Execution::Parallel);

struct PdeRunOptions {
    double dt = 0.0;  // 0 = auto stability bound
    long max_steps = 500000;
    double stop_eps = 1e-12;  // on the per-step l-inf change
    bool monitor_energy = true;
    long energy_every = 1;
    long snapshot_every = 0;
    std::function<void(const ContinuumField&, long)> snapshot;
    Execution exec = Execution::Parallel;
};

struct PdeHistoryRow {
    long step;
    double energy;
    double max_residual;
};

struct PdeRunResult {
    ContinuumField field;
    std::vector<PdeHistoryRow> history;
    bool converged = false;
    long steps = 0;
    double dt = 0.0;
    double max_energy_increase = 0.0;  // worst observed single-step increase
    double final_energy = 0.0;
};

PdeRunResult run_pde(const SystemModel& model, ContinuumField field,
                     const PdeRunOptions& opts);

/// Pointwise transform of a stationary v_tilde field to the u_tilde chart via
/// u_tilde = grad_F(v_tilde).
ContinuumField transform_to_u_chart(const SystemModel& model,
                                    const ContinuumField& field);

/// Residual of the stationary boundary-value problem at each interior node
/// (u_tilde chart): M ctilde_a(w) - (Psi(w)_a - grad_G(w)_a). Boundary slots
/// are zero.
Vec bvp_residual(const SystemModel& model, const ContinuumField& field,
                 const Vec* preimage = nullptr);

struct ConservationResult {
    Vec energy;  // E(x) per node; one-sided derivatives at the two ends
    double boundary_energy = 0.0;
    double max_drift = 0.0;  // max over interior of |E(x) - E(boundary)|
};

/// K=1 conservation law for a stationary u_tilde field:
/// E(x) = Vdual(Psi(w)) - (M/2) <w', hess_G(w) w'> should be constant.
ConservationResult conservation_check(const SystemModel& model,
                                      const ContinuumField& field,
                                      const Vec* preimage = nullptr);

/// Energy tensor at an interior node (u_tilde chart):
/// T^alpha_beta = M d1_alpha w^a d1_beta w^b g_ab(w) - delta^alpha_beta L
/// with L = Vdual(Psi(w)) + (M/2) sum_alpha d1 w^a d1 w^b g_ab(w).
Mat energy_tensor(const SystemModel& model, const ContinuumField& field,
                  std::size_t flat, const Vec* preimage = nullptr);

/// Connection-coefficient identity check: evaluates
///   g^{db} g^{ec} third_G[a,d,e]  minus  (dg_ad / dv_tilde_c) g^{db}
/// with the dv_tilde derivative taken as a central finite difference of
/// hess_G in u contracted with the inverse Hessian. Exactly zero for
/// quadratic G; otherwise zero up to finite-difference error. Throws
/// SingularHessianError near the singular set.
Tensor3 verify_affine_connection(const SystemModel& model, const Vec& u);

struct ContinuumProfileSample {
    double x;
    Vec value;     // affine-chart components
    Vec preimage;  // inverse-map components
    double perf;
};

/// 1-D slice along `axis` through the grid center.
std::vector<ContinuumProfileSample> continuum_profile(const SystemModel& model,
                                                      const ContinuumField& field,
                                                      int axis);

/// Largest l-inf deviation of interior nodes from a reference vector.
double max_interior_deviation(const ContinuumField& field, const Vec& ref);

/// Flat binary snapshot, header of three little-endian uint64 (K, n, N).
void write_grid_snapshot(const std::string& path, const ContinuumField& field);

}  // namespace gsc
