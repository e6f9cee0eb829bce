#include "specgap/weights.hpp"

#include <cmath>

#include "specgap/errors.hpp"

namespace specgap {

Weight identity_weight(int d) {
    Weight w;
    w.kind = Weight::Kind::Scalar;
    w.dim = d;
    w.is_identity = true;
    w.name = "identity";
    ScalarField zero;
    zero.value = [](std::span<const double>) { return 0.0; };
    zero.gradient = [](std::span<const double> x, std::span<double> g) {
        for (size_t i = 0; i < x.size(); ++i) g[i] = 0.0;
    };
    zero.laplacian = [](std::span<const double>) { return 0.0; };
    w.w.push_back(std::move(zero));
    // V_a == V for the identity weight; the bound is resolved against the
    // potential at simulation time.
    return w;
}

Weight make_epsilon_weight(const Potential& p, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw ParameterOutOfRange("make_epsilon_weight: epsilon must lie in (0, 1/2)");
    Weight w;
    w.kind = Weight::Kind::Scalar;
    w.dim = p.dim;
    w.name = "epsilon";
    w.params["epsilon"] = epsilon;
    w.has_epsilon = true;
    w.epsilon = epsilon;

    ScalarField f;
    f.value = [eps = epsilon, value = p.value](std::span<const double> x) {
        return eps * value(x);
    };
    f.gradient = [eps = epsilon, grad = p.gradient](std::span<const double> x,
                                                    std::span<double> g) {
        grad(x, g);
        for (size_t i = 0; i < x.size(); ++i) g[i] *= eps;
    };
    f.laplacian = [eps = epsilon, lap = p.laplacian](std::span<const double> x) {
        return eps * lap(x);
    };
    w.w.push_back(std::move(f));

    // hess V_a = (1 - 2 eps) hess V
    if (p.hessian_bound_valid) {
        w.va_bound_valid = true;
        w.va_hessian_lower_bound = (1.0 - 2.0 * epsilon) * p.hessian_lower_bound;
    }
    return w;
}

Weight make_scalar_weight(int d, ScalarField w_field, const std::string& name) {
    if (!w_field.value || !w_field.gradient || !w_field.laplacian)
        throw ParameterOutOfRange("make_scalar_weight: W needs value/gradient/laplacian");
    Weight w;
    w.kind = Weight::Kind::Scalar;
    w.dim = d;
    w.name = name;
    w.w.push_back(std::move(w_field));
    return w;
}

Weight make_quartic_z_weight(const Potential& quartic, double b, double c) {
    if (quartic.dim != 2)
        throw ParameterOutOfRange("make_quartic_z_weight: potential must be two-dimensional");
    Weight w;
    w.kind = Weight::Kind::Diagonal;
    w.dim = 2;
    w.name = "diagonal_quartic_Z";
    w.params["b"] = b;
    w.params["c"] = c;

    // W_1 = V/2 - Z with Z(x,y) = b y^4/4 + c x^2/2, and W_2(x,y) = W_1(y,x)
    const auto value = quartic.value;
    const auto grad = quartic.gradient;
    const auto lap = quartic.laplacian;

    for (int coord = 0; coord < 2; ++coord) {
        const bool swap = (coord == 1);
        ScalarField f;
        f.value = [=](std::span<const double> p) {
            const double x = swap ? p[1] : p[0];
            const double y = swap ? p[0] : p[1];
            const double z = 0.25 * b * y * y * y * y + 0.5 * c * x * x;
            return 0.5 * value(p) - z;
        };
        f.gradient = [=](std::span<const double> p, std::span<double> g) {
            grad(p, g);
            g[0] *= 0.5;
            g[1] *= 0.5;
            const double x = swap ? p[1] : p[0];
            const double y = swap ? p[0] : p[1];
            const double zx = c * x;
            const double zy = b * y * y * y;
            if (swap) {
                g[0] -= zy;
                g[1] -= zx;
            } else {
                g[0] -= zx;
                g[1] -= zy;
            }
        };
        f.laplacian = [=](std::span<const double> p) {
            const double y = swap ? p[0] : p[1];
            return 0.5 * lap(p) - (c + 3.0 * b * y * y);
        };
        w.w.push_back(std::move(f));
    }
    return w;
}

MField::MField(Potential p, Weight w, MFieldMode mode)
    : potential_(std::move(p)), weight_(std::move(w)), mode_(mode) {
    if (potential_.dim != weight_.dim)
        throw ParameterOutOfRange("m_field: potential and weight dimensions differ");
    if (mode_ == MFieldMode::ClosedForm && !weight_.has_epsilon)
        throw ParameterOutOfRange("m_field: closed-form route requires an epsilon weight");
    if (mode_ == MFieldMode::Auto)
        mode_ = weight_.has_epsilon ? MFieldMode::ClosedForm : MFieldMode::Generic;
}

double MField::a_l_a_inv(int i, std::span<const double> x) const {
    if (weight_.is_identity) return 0.0;
    const ScalarField& f = weight_.field(i);
    const int d = potential_.dim;
    static thread_local Vec gw, gv;
    gw.resize(d);
    gv.resize(d);
    f.gradient(x, gw);
    potential_.gradient(x, gv);
    double dot_vw = 0.0, norm_w = 0.0;
    for (int k = 0; k < d; ++k) {
        dot_vw += gv[k] * gw[k];
        norm_w += gw[k] * gw[k];
    }
    return f.laplacian(x) + norm_w - dot_vw;
}

void MField::eval(std::span<const double> x, SymMat& out) const {
    const int d = potential_.dim;
    potential_.hessian(x, out);
    if (weight_.is_identity) return;

    if (mode_ == MFieldMode::ClosedForm) {
        // a = e^{-eps V}: correction (-eps Lap V + eps (1-eps) |grad V|^2) I
        const double eps = weight_.epsilon;
        static thread_local Vec gv;
        gv.resize(d);
        potential_.gradient(x, gv);
        double norm_v = 0.0;
        for (int k = 0; k < d; ++k) norm_v += gv[k] * gv[k];
        const double corr = -eps * potential_.laplacian(x) + eps * (1.0 - eps) * norm_v;
        for (int i = 0; i < d; ++i) out(i, i) += corr;
        return;
    }

    if (weight_.kind == Weight::Kind::Scalar) {
        const double s = a_l_a_inv(0, x);
        for (int i = 0; i < d; ++i) out(i, i) -= s;
    } else {
        for (int i = 0; i < d; ++i) out(i, i) -= a_l_a_inv(i, x);
    }
}

double MField::rho(std::span<const double> x) const {
    static thread_local SymMat m;
    eval(x, m);
    return smallest_eigenvalue(m);
}

MField m_field(const Potential& p, const Weight& w, MFieldMode mode) {
    return MField(p, w, mode);
}

double rho_min(const MField& m, std::span<const double> x) { return m.rho(x); }

void metric_S(const Weight& w, std::span<const double> x, SymMat& out) {
    const int d = w.dim;
    out.resize(d);
    if (w.is_identity) {
        for (int i = 0; i < d; ++i) out(i, i) = 1.0;
        return;
    }
    for (int i = 0; i < d; ++i) {
        const double wi = w.field(i).value(x);
        out(i, i) = std::exp(2.0 * wi);
    }
}

} // namespace specgap
