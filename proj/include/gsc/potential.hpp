#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gsc/model.hpp"

namespace gsc {

/// Divergence D(u,v) = G(u) + F(v) - <u,v>. Rejects non-finite inputs.
double divergence(const SystemModel& model, const Vec& u, const Vec& v);
double divergence(const SystemModel& model, const VectorState& u,
                  const VectorState& v);

/// Potential V(u) = -D(u, grad_G(u)) and its dual V~(v) = -D(grad_F(v), v).
/// Stationary points of either are exactly the fixed points of the DE map,
/// and the two agree there.
double potential(const SystemModel& model, const Vec& u);
double potential(const SystemModel& model, const VectorState& u);
double dual_potential(const SystemModel& model, const Vec& v);
double dual_potential(const SystemModel& model, const VectorState& v);

/// Closed-form gradient d_a V(u) = g_ab(u) { u^b - grad_F(grad_G(u))^b }.
Vec potential_gradient(const SystemModel& model, const Vec& u);
Vec potential_gradient(const SystemModel& model, const VectorState& u);
Vec dual_potential_gradient(const SystemModel& model, const Vec& v);

enum class FixedPointClass { Stable, Unstable, Degenerate };

const char* fixed_point_class_name(FixedPointClass c);

struct FixedPoint {
    VectorState u;
    VectorState v;
    double potential_value = 0.0;
    double perf = 0.0;
    FixedPointClass cls = FixedPointClass::Degenerate;
    double spectral_radius = 0.0;  // of the DE-map Jacobian at the point
};

/// Fixed points sorted by potential value ascending. `good` is the unique
/// stable strict minimizer of V over all stationary solutions when one
/// exists; `bad` the stable point with the worst perf when it differs from
/// the best. Perf is reported separately and never assumed to follow V.
struct FixedPointReport {
    std::vector<FixedPoint> points;
    std::optional<std::size_t> good;
    std::optional<std::size_t> bad;

    bool has_stable() const;
    /// Stable point with the best (smallest) perf, if any.
    std::optional<std::size_t> best_perf_stable() const;
};

/// Grid scan of the DE residual u - grad_F(grad_G(u)) at grid_resolution
/// points per axis, damped-Newton refinement of the seeds, dedup within
/// l-inf distance 1e-7. Seeds that fail to converge are dropped.
FixedPointReport find_fixed_points(const SystemModel& model,
                                   int grid_resolution = 257);

/// Explicit Euler on du/dt = -g^{ab}(u) d_b V(u), the continuous-time descent
/// whose Lyapunov function is V.
struct FlowResult {
    Vec u;
    long steps = 0;
    bool converged = false;
    double max_potential_increase = 0.0;  // worst single-step V increase
};
FlowResult gradient_flow(const SystemModel& model, Vec u0, double dt = 1e-3,
                         long max_steps = 2000000, double residual_tol = 1e-10);

/// One-parameter model family, monotone in the parameter (smaller parameter
/// on the "converges" side of both thresholds).
struct ModelFamily {
    std::string name;
    std::function<ModelPtr(double)> build;
    double lo = 0.0;
    double hi = 1.0;
    Vec good_state;  // target of the uncoupled DE on the good side
};

ModelFamily regular_bec_family(int l, int r);

enum class ThresholdKind { BP, Potential };

struct ThresholdOptions {
    int de_iters = 10000;       // budget for the BP-side iteration oracle
    double conv_tol = 1e-6;     // distance to good_state that counts as converged
    int grid_resolution = 513;  // fixed-point scan resolution (potential side)
};

struct NonBracketingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bisection on the family parameter to absolute tolerance tol.
/// BP: largest parameter for which the uncoupled DE from the worst-case
/// initial state reaches good_state. Potential: largest parameter for which
/// the best-perf stable fixed point is the unique strict minimizer of V over
/// all stationary solutions. Throws NonBracketingError when both endpoints
/// fall on the same side.
double threshold_scan(const ModelFamily& family, ThresholdKind kind, double tol,
                      const ThresholdOptions& opts = {});

}  // namespace gsc
