#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gsc/linalg.hpp"

namespace gsc {

/// Largest supported coupling dimension K; dense storage beyond 3 is not
/// desk scale.
inline constexpr int kMaxCouplingDim = 3;

/// Coordinate chart of a state vector: the original u/v pair or the affine
/// images (u_tilde = grad_F(v), v_tilde = grad_G(u)).
enum class Chart { U, V, UAffine, VAffine };

const char* chart_name(Chart c);

/// Axis-aligned box in R^N; every chart has one and iterates are clamped to
/// it componentwise.
struct Box {
    Vec lo;
    Vec hi;

    std::size_t dim() const { return lo.size(); }
    double width(std::size_t i) const { return hi[i] - lo[i]; }
    bool contains(std::span<const double> x, double slack = 0.0) const;
    void clamp(Vec& x) const;
    Vec center() const;
};

struct VectorState {
    Vec values;
    Chart chart = Chart::U;
};

/// An uncoupled system: two scalar fields F and G on R^N with their
/// derivatives, the domain boxes of the two gradient images, and a scalar
/// performance map (smaller is better).
///
/// Evaluation is pure and stateless; instances are safe to share across
/// threads.
class SystemModel {
public:
    virtual ~SystemModel() = default;

    virtual std::size_t dim() const = 0;

    virtual double eval_F(const Vec& v) const = 0;
    virtual double eval_G(const Vec& u) const = 0;
    virtual Vec grad_F(const Vec& v) const = 0;
    virtual Vec grad_G(const Vec& u) const = 0;
    virtual Mat hess_F(const Vec& v) const = 0;
    virtual Mat hess_G(const Vec& u) const = 0;

    // Third derivatives. The default is a symmetrized central difference of
    // the Hessian with step 1e-4 of the domain width; these only enter small
    // correction terms, so that accuracy suffices.
    virtual Tensor3 third_F(const Vec& v) const;
    virtual Tensor3 third_G(const Vec& u) const;

    virtual const Box& domain_D() const = 0;
    virtual const Box& domain_Dtilde() const = 0;

    virtual double perf(const Vec& u) const { return u[0]; }

    virtual std::string name() const = 0;

    const Box& chart_box(Chart c) const;
};

using ModelPtr = std::shared_ptr<const SystemModel>;

/// (l,r)-regular LDPC / BEC instance with erasure probability eps:
///   G(u) = u - (1 - (1-u)^r) / r,   F(v) = eps v^l / l,
/// whose two-step recursion is u+ = eps (1 - (1-u)^(r-1))^(l-1) on [0,1].
/// Rejects l < 3, r < l, or eps outside [0,1].
ModelPtr make_regular_bec(int l, int r, double eps);

/// Block-diagonal composition of independent systems: F and G add, gradients
/// and Hessians are block stacked, perf adds.
ModelPtr make_product_model(std::vector<ModelPtr> components);

/// View with the roles of F and G exchanged. The potential of the swapped
/// model is the dual potential of the original, which turns every dual-chart
/// computation into a primal one.
ModelPtr make_swapped_model(ModelPtr base);

/// One density-evolution step: v = grad_G(u), u_next = grad_F(v), both
/// clamped to their domain boxes. Requires chart U; throws on non-finite
/// output.
std::pair<VectorState, VectorState> de_step(const SystemModel& model,
                                            const VectorState& u);

/// Plain iteration of the DE map from u0 (chart U) for at most max_iters
/// steps, stopping early once the step change falls below stop_eps.
Vec iterate_de(const SystemModel& model, Vec u0, int max_iters,
               double stop_eps = 0.0);

}  // namespace gsc
