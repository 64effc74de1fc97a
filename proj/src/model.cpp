#include "gsc/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace gsc {

const char* chart_name(Chart c) {
    switch (c) {
        case Chart::U: return "u";
        case Chart::V: return "v";
        case Chart::UAffine: return "u_affine";
        case Chart::VAffine: return "v_affine";
    }
    return "?";
}

bool Box::contains(std::span<const double> x, double slack) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
}

void Box::clamp(Vec& x) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        x[i] = std::min(hi[i], std::max(lo[i], x[i]));
}

Vec Box::center() const {
    Vec c(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
}

const Box& SystemModel::chart_box(Chart c) const {
    // u_tilde = grad_F(v) lives in D, v_tilde = grad_G(u) lives in D~.
    switch (c) {
        case Chart::U:
        case Chart::UAffine: return domain_D();
        case Chart::V:
        case Chart::VAffine: return domain_Dtilde();
    }
    return domain_D();
}

namespace {

// Central difference of a Hessian-valued map, symmetrized over all index
// permutations (the true tensor is fully symmetric).
Tensor3 fd_third(const std::function<Mat(const Vec&)>& hess, const Vec& x,
                 const Box& box) {
    const std::size_t n = x.size();
    Tensor3 raw(n);
    for (std::size_t c = 0; c < n; ++c) {
        const double h = 1e-4 * box.width(c);
        Vec xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        const Mat hp = hess(xp), hm = hess(xm);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                raw(a, b, c) = (hp(a, b) - hm(a, b)) / (2.0 * h);
    }
    Tensor3 out(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                out(a, b, c) = (raw(a, b, c) + raw(a, c, b) + raw(b, a, c) +
                                raw(b, c, a) + raw(c, a, b) + raw(c, b, a)) /
                               6.0;
    return out;
}

}  // namespace

Tensor3 SystemModel::third_F(const Vec& v) const {
    return fd_third([this](const Vec& x) { return hess_F(x); }, v, domain_Dtilde());
}

Tensor3 SystemModel::third_G(const Vec& u) const {
    return fd_third([this](const Vec& x) { return hess_G(x); }, u, domain_D());
}

namespace {

class RegularBecModel final : public SystemModel {
public:
    RegularBecModel(int l, int r, double eps) : l_(l), r_(r), eps_(eps) {
        box_.lo = {0.0};
        box_.hi = {1.0};
    }

    std::size_t dim() const override { return 1; }

    double eval_F(const Vec& v) const override {
        return eps_ * std::pow(v[0], l_) / l_;
    }
    double eval_G(const Vec& u) const override {
        return u[0] - (1.0 - std::pow(1.0 - u[0], r_)) / r_;
    }
    Vec grad_F(const Vec& v) const override {
        return {eps_ * std::pow(v[0], l_ - 1)};
    }
    Vec grad_G(const Vec& u) const override {
        return {1.0 - std::pow(1.0 - u[0], r_ - 1)};
    }
    Mat hess_F(const Vec& v) const override {
        Mat m(1);
        m(0, 0) = eps_ * (l_ - 1) * std::pow(v[0], l_ - 2);
        return m;
    }
    Mat hess_G(const Vec& u) const override {
        Mat m(1);
        m(0, 0) = (r_ - 1) * std::pow(1.0 - u[0], r_ - 2);
        return m;
    }
    Tensor3 third_F(const Vec& v) const override {
        Tensor3 t(1);
        t(0, 0, 0) = eps_ * (l_ - 1) * (l_ - 2) * std::pow(v[0], l_ - 3);
        return t;
    }
    Tensor3 third_G(const Vec& u) const override {
        Tensor3 t(1);
        t(0, 0, 0) = -(r_ - 1.0) * (r_ - 2.0) * std::pow(1.0 - u[0], r_ - 3);
        return t;
    }

    const Box& domain_D() const override { return box_; }
    const Box& domain_Dtilde() const override { return box_; }

    std::string name() const override {
        std::ostringstream os;
        os << "regular_bec(" << l_ << "," << r_ << ",eps=" << eps_ << ")";
        return os.str();
    }

private:
    int l_;
    int r_;
    double eps_;
    Box box_;
};

class ProductModel final : public SystemModel {
public:
    explicit ProductModel(std::vector<ModelPtr> parts) : parts_(std::move(parts)) {
        for (const auto& p : parts_) {
            offsets_.push_back(dim_);
            dim_ += p->dim();
            const Box& d = p->domain_D();
            const Box& dt = p->domain_Dtilde();
            box_d_.lo.insert(box_d_.lo.end(), d.lo.begin(), d.lo.end());
            box_d_.hi.insert(box_d_.hi.end(), d.hi.begin(), d.hi.end());
            box_dt_.lo.insert(box_dt_.lo.end(), dt.lo.begin(), dt.lo.end());
            box_dt_.hi.insert(box_dt_.hi.end(), dt.hi.begin(), dt.hi.end());
        }
    }

    std::size_t dim() const override { return dim_; }

    double eval_F(const Vec& v) const override {
        double s = 0.0;
        for (std::size_t k = 0; k < parts_.size(); ++k) s += parts_[k]->eval_F(part(v, k));
        return s;
    }
    double eval_G(const Vec& u) const override {
        double s = 0.0;
        for (std::size_t k = 0; k < parts_.size(); ++k) s += parts_[k]->eval_G(part(u, k));
        return s;
    }
    Vec grad_F(const Vec& v) const override {
        return gather_vec(v, [](const SystemModel& m, const Vec& x) { return m.grad_F(x); });
    }
    Vec grad_G(const Vec& u) const override {
        return gather_vec(u, [](const SystemModel& m, const Vec& x) { return m.grad_G(x); });
    }
    Mat hess_F(const Vec& v) const override {
        return gather_mat(v, [](const SystemModel& m, const Vec& x) { return m.hess_F(x); });
    }
    Mat hess_G(const Vec& u) const override {
        return gather_mat(u, [](const SystemModel& m, const Vec& x) { return m.hess_G(x); });
    }
    Tensor3 third_F(const Vec& v) const override {
        return gather_t3(v, [](const SystemModel& m, const Vec& x) { return m.third_F(x); });
    }
    Tensor3 third_G(const Vec& u) const override {
        return gather_t3(u, [](const SystemModel& m, const Vec& x) { return m.third_G(x); });
    }

    const Box& domain_D() const override { return box_d_; }
    const Box& domain_Dtilde() const override { return box_dt_; }

    double perf(const Vec& u) const override {
        double s = 0.0;
        for (std::size_t k = 0; k < parts_.size(); ++k) s += parts_[k]->perf(part(u, k));
        return s;
    }

    std::string name() const override {
        std::string s = "product(";
        for (std::size_t k = 0; k < parts_.size(); ++k) {
            if (k) s += ", ";
            s += parts_[k]->name();
        }
        return s + ")";
    }

private:
    Vec part(const Vec& x, std::size_t k) const {
        const std::size_t off = offsets_[k], nd = parts_[k]->dim();
        return Vec(x.begin() + off, x.begin() + off + nd);
    }

    template <class Fn>
    Vec gather_vec(const Vec& x, Fn&& f) const {
        Vec out(dim_, 0.0);
        for (std::size_t k = 0; k < parts_.size(); ++k) {
            const Vec g = f(*parts_[k], part(x, k));
            std::copy(g.begin(), g.end(), out.begin() + offsets_[k]);
        }
        return out;
    }

    template <class Fn>
    Mat gather_mat(const Vec& x, Fn&& f) const {
        Mat out(dim_);
        for (std::size_t k = 0; k < parts_.size(); ++k) {
            const Mat h = f(*parts_[k], part(x, k));
            const std::size_t off = offsets_[k];
            for (std::size_t i = 0; i < h.n; ++i)
                for (std::size_t j = 0; j < h.n; ++j) out(off + i, off + j) = h(i, j);
        }
        return out;
    }

    template <class Fn>
    Tensor3 gather_t3(const Vec& x, Fn&& f) const {
        Tensor3 out(dim_);
        for (std::size_t k = 0; k < parts_.size(); ++k) {
            const Tensor3 t = f(*parts_[k], part(x, k));
            const std::size_t off = offsets_[k];
            for (std::size_t i = 0; i < t.n; ++i)
                for (std::size_t j = 0; j < t.n; ++j)
                    for (std::size_t c = 0; c < t.n; ++c)
                        out(off + i, off + j, off + c) = t(i, j, c);
        }
        return out;
    }

    std::vector<ModelPtr> parts_;
    std::vector<std::size_t> offsets_;
    std::size_t dim_ = 0;
    Box box_d_, box_dt_;
};

class SwappedModel final : public SystemModel {
public:
    explicit SwappedModel(ModelPtr base) : base_(std::move(base)) {}

    std::size_t dim() const override { return base_->dim(); }
    double eval_F(const Vec& v) const override { return base_->eval_G(v); }
    double eval_G(const Vec& u) const override { return base_->eval_F(u); }
    Vec grad_F(const Vec& v) const override { return base_->grad_G(v); }
    Vec grad_G(const Vec& u) const override { return base_->grad_F(u); }
    Mat hess_F(const Vec& v) const override { return base_->hess_G(v); }
    Mat hess_G(const Vec& u) const override { return base_->hess_F(u); }
    Tensor3 third_F(const Vec& v) const override { return base_->third_G(v); }
    Tensor3 third_G(const Vec& u) const override { return base_->third_F(u); }
    const Box& domain_D() const override { return base_->domain_Dtilde(); }
    const Box& domain_Dtilde() const override { return base_->domain_D(); }
    std::string name() const override { return "swapped(" + base_->name() + ")"; }

private:
    ModelPtr base_;
};

}  // namespace

ModelPtr make_regular_bec(int l, int r, double eps) {
    if (l < 3) throw std::invalid_argument("regular_bec: l must be >= 3");
    if (r < l) throw std::invalid_argument("regular_bec: r must be >= l");
    if (!(eps >= 0.0 && eps <= 1.0))
        throw std::invalid_argument("regular_bec: eps must lie in [0,1]");
    return std::make_shared<RegularBecModel>(l, r, eps);
}

ModelPtr make_product_model(std::vector<ModelPtr> components) {
    if (components.empty())
        throw std::invalid_argument("product model: needs at least one component");
    return std::make_shared<ProductModel>(std::move(components));
}

ModelPtr make_swapped_model(ModelPtr base) {
    return std::make_shared<SwappedModel>(std::move(base));
}

std::pair<VectorState, VectorState> de_step(const SystemModel& model,
                                            const VectorState& u) {
    if (u.chart != Chart::U)
        throw std::invalid_argument("de_step: state must be in chart u");
    Vec v = model.grad_G(u.values);
    if (!all_finite(v)) throw std::domain_error("de_step: non-finite grad_G output");
    model.domain_Dtilde().clamp(v);
    Vec un = model.grad_F(v);
    if (!all_finite(un)) throw std::domain_error("de_step: non-finite grad_F output");
    model.domain_D().clamp(un);
    return {VectorState{std::move(un), Chart::U}, VectorState{std::move(v), Chart::V}};
}

Vec iterate_de(const SystemModel& model, Vec u0, int max_iters, double stop_eps) {
    VectorState s{std::move(u0), Chart::U};
    for (int t = 0; t < max_iters; ++t) {
        auto [next, v] = de_step(model, s);
        const double change = linf_diff(next.values, s.values);
        s = std::move(next);
        if (change <= stop_eps) break;
    }
    return s.values;
}

}  // namespace gsc
