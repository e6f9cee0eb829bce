#include "specgap/potential.hpp"

#include <cmath>

#include "specgap/errors.hpp"

namespace specgap {

namespace {

double sq_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

void check_dim(const char* who, int d, size_t got) {
    if (static_cast<size_t>(d) != got)
        throw ParameterOutOfRange(std::string(who) + ": point has wrong dimension");
}

} // namespace

Potential make_gaussian(int d) {
    if (d < 1) throw ParameterOutOfRange("make_gaussian: d must be >= 1");
    Potential p;
    p.dim = d;
    p.name = "gaussian";
    p.value = [d](std::span<const double> x) {
        check_dim("gaussian", d, x.size());
        return 0.5 * sq_norm(x);
    };
    p.gradient = [d](std::span<const double> x, std::span<double> g) {
        check_dim("gaussian", d, x.size());
        for (int i = 0; i < d; ++i) g[i] = x[i];
    };
    p.hessian = [d](std::span<const double> x, SymMat& h) {
        check_dim("gaussian", d, x.size());
        h.resize(d);
        for (int i = 0; i < d; ++i) h(i, i) = 1.0;
    };
    p.laplacian = [d](std::span<const double> x) {
        check_dim("gaussian", d, x.size());
        return static_cast<double>(d);
    };
    p.grad_laplacian = [d](std::span<const double>, std::span<double> g) {
        for (int i = 0; i < d; ++i) g[i] = 0.0;
    };
    p.hessian_lower_bound = 1.0;
    p.hessian_bound_valid = true;
    return p;
}

RadialProfile subbotin_profile(double alpha) {
    RadialProfile rp;
    rp.u = [alpha](double r) { return std::pow(r, alpha) / alpha; };
    rp.du = [alpha](double r) { return std::pow(r, alpha - 1.0); };
    rp.ddu = [alpha](double r) { return (alpha - 1.0) * std::pow(r, alpha - 2.0); };
    return rp;
}

Potential make_subbotin(int d, double alpha) {
    if (d < 1) throw ParameterOutOfRange("make_subbotin: d must be >= 1");
    if (!(alpha > 1.0)) throw ParameterOutOfRange("make_subbotin: alpha must be > 1");
    Potential p;
    p.dim = d;
    p.name = "subbotin";
    p.params["alpha"] = alpha;
    const bool quadratic = (alpha == 2.0);

    p.value = [d, alpha, quadratic](std::span<const double> x) {
        check_dim("subbotin", d, x.size());
        const double s = sq_norm(x);
        if (quadratic) return 0.5 * s;
        return std::pow(std::sqrt(s), alpha) / alpha;
    };
    // grad V = |x|^{alpha-2} x; the limit at the origin is 0 for alpha > 1
    p.gradient = [d, alpha, quadratic](std::span<const double> x, std::span<double> g) {
        check_dim("subbotin", d, x.size());
        const double s = sq_norm(x);
        if (s == 0.0) {
            for (int i = 0; i < d; ++i) g[i] = 0.0;
            return;
        }
        const double c = quadratic ? 1.0 : std::pow(std::sqrt(s), alpha - 2.0);
        for (int i = 0; i < d; ++i) g[i] = c * x[i];
    };
    p.hessian = [d, alpha, quadratic](std::span<const double> x, SymMat& h) {
        check_dim("subbotin", d, x.size());
        h.resize(d);
        const double s = sq_norm(x);
        if (s == 0.0) {
            if (alpha < 2.0)
                throw SingularPoint("subbotin: Hessian diverges at the origin for alpha < 2");
            const double diag = quadratic ? 1.0 : 0.0;
            for (int i = 0; i < d; ++i) h(i, i) = diag;
            return;
        }
        const double r = std::sqrt(s);
        const double c1 = quadratic ? 1.0 : std::pow(r, alpha - 2.0);
        const double c2 = quadratic ? 0.0 : (alpha - 2.0) * std::pow(r, alpha - 4.0);
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                double v = c2 * x[i] * x[j];
                if (i == j) v += c1;
                h.set(i, j, v);
            }
        }
    };
    p.laplacian = [d, alpha, quadratic](std::span<const double> x) {
        check_dim("subbotin", d, x.size());
        const double s = sq_norm(x);
        if (s == 0.0) {
            if (alpha < 2.0)
                throw SingularPoint("subbotin: Laplacian diverges at the origin for alpha < 2");
            return quadratic ? static_cast<double>(d) : 0.0;
        }
        const double c = quadratic ? 1.0 : std::pow(std::sqrt(s), alpha - 2.0);
        return (alpha + d - 2.0) * c;
    };
    // grad(Lap V) = (alpha+d-2)(alpha-2) |x|^{alpha-4} x
    p.grad_laplacian = [d, alpha, quadratic](std::span<const double> x, std::span<double> g) {
        check_dim("subbotin", d, x.size());
        const double s = sq_norm(x);
        if (s == 0.0) {
            if (!quadratic && alpha <= 3.0)
                throw SingularPoint("subbotin: grad(Lap V) diverges at the origin");
            for (int i = 0; i < d; ++i) g[i] = 0.0;
            return;
        }
        const double c =
            quadratic ? 0.0
                      : (alpha + d - 2.0) * (alpha - 2.0) * std::pow(std::sqrt(s), alpha - 4.0);
        for (int i = 0; i < d; ++i) g[i] = c * x[i];
    };
    // smallest Hessian eigenvalue min{1, alpha-1} |x|^{alpha-2}: infimum 0
    p.hessian_lower_bound = 0.0;
    p.hessian_bound_valid = true;
    return p;
}

RadialProfile gen_cauchy_profile(double beta) {
    RadialProfile rp;
    rp.u = [beta](double r) { return beta * std::log1p(r * r); };
    rp.du = [beta](double r) { return 2.0 * beta * r / (1.0 + r * r); };
    rp.ddu = [beta](double r) {
        const double q = 1.0 + r * r;
        return 2.0 * beta * (1.0 - r * r) / (q * q);
    };
    return rp;
}

Potential make_gen_cauchy(int d, double beta) {
    if (d < 1) throw ParameterOutOfRange("make_gen_cauchy: d must be >= 1");
    if (!(beta > 0.5 * d))
        throw ParameterOutOfRange("make_gen_cauchy: beta must exceed d/2 for integrability");
    Potential p;
    p.dim = d;
    p.name = "gen_cauchy";
    p.params["beta"] = beta;
    p.value = [d, beta](std::span<const double> x) {
        check_dim("gen_cauchy", d, x.size());
        return beta * std::log1p(sq_norm(x));
    };
    p.gradient = [d, beta](std::span<const double> x, std::span<double> g) {
        check_dim("gen_cauchy", d, x.size());
        const double c = 2.0 * beta / (1.0 + sq_norm(x));
        for (int i = 0; i < d; ++i) g[i] = c * x[i];
    };
    p.hessian = [d, beta](std::span<const double> x, SymMat& h) {
        check_dim("gen_cauchy", d, x.size());
        h.resize(d);
        const double q = 1.0 + sq_norm(x);
        const double c1 = 2.0 * beta / q;
        const double c2 = -4.0 * beta / (q * q);
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                double v = c2 * x[i] * x[j];
                if (i == j) v += c1;
                h.set(i, j, v);
            }
        }
    };
    p.laplacian = [d, beta](std::span<const double> x) {
        check_dim("gen_cauchy", d, x.size());
        const double s = sq_norm(x);
        const double q = 1.0 + s;
        return 2.0 * beta * d / q - 4.0 * beta * s / (q * q);
    };
    p.grad_laplacian = [d, beta](std::span<const double> x, std::span<double> g) {
        check_dim("gen_cauchy", d, x.size());
        const double s = sq_norm(x);
        const double q = 1.0 + s;
        const double c = -4.0 * beta * (3.0 - s) / (q * q * q) - 4.0 * beta * (d - 1.0) / (q * q);
        for (int i = 0; i < d; ++i) g[i] = c * x[i];
    };
    p.hessian_lower_bound = -beta / 4.0;
    p.hessian_bound_valid = true;
    return p;
}

Potential make_coupled_quartic(double beta) {
    if (!(beta >= 0.0)) throw ParameterOutOfRange("make_coupled_quartic: beta must be >= 0");
    Potential p;
    p.dim = 2;
    p.name = "coupled_quartic";
    p.params["beta"] = beta;
    p.value = [beta](std::span<const double> x) {
        check_dim("coupled_quartic", 2, x.size());
        return 0.25 * (x[0] * x[0] * x[0] * x[0] + x[1] * x[1] * x[1] * x[1]) -
               beta * x[0] * x[1];
    };
    p.gradient = [beta](std::span<const double> x, std::span<double> g) {
        check_dim("coupled_quartic", 2, x.size());
        g[0] = x[0] * x[0] * x[0] - beta * x[1];
        g[1] = x[1] * x[1] * x[1] - beta * x[0];
    };
    p.hessian = [beta](std::span<const double> x, SymMat& h) {
        check_dim("coupled_quartic", 2, x.size());
        h.resize(2);
        h(0, 0) = 3.0 * x[0] * x[0];
        h(1, 1) = 3.0 * x[1] * x[1];
        h.set(0, 1, -beta);
    };
    p.laplacian = [](std::span<const double> x) {
        check_dim("coupled_quartic", 2, x.size());
        return 3.0 * (x[0] * x[0] + x[1] * x[1]);
    };
    p.grad_laplacian = [](std::span<const double> x, std::span<double> g) {
        check_dim("coupled_quartic", 2, x.size());
        g[0] = 6.0 * x[0];
        g[1] = 6.0 * x[1];
    };
    // both eigenvalues are bounded below by min{3x^2, 3y^2} - beta
    p.hessian_lower_bound = -beta;
    p.hessian_bound_valid = true;
    return p;
}

namespace {

double rel_err(double got, double ref) {
    return std::fabs(got - ref) / std::max(1.0, std::fabs(ref));
}

} // namespace

ValidationReport validate_derivatives(const Potential& p,
                                      std::span<const Vec> points, double h) {
    if (!(h > 0.0)) throw ParameterOutOfRange("validate_derivatives: h must be positive");
    const int d = p.dim;
    ValidationReport rep;
    rep.threshold = 100.0 * h * h;

    Vec xp(d), xm(d), gp(d), gm(d), g(d);
    SymMat hess(d);
    for (const Vec& x : points) {
        p.gradient(x, g);
        p.hessian(x, hess);
        const double lap = p.laplacian(x);

        for (int i = 0; i < d; ++i) {
            xp.assign(x.begin(), x.end());
            xm.assign(x.begin(), x.end());
            xp[i] += h;
            xm[i] -= h;
            const double fd_grad = (p.value(xp) - p.value(xm)) / (2.0 * h);
            rep.max_gradient_error = std::max(rep.max_gradient_error, rel_err(g[i], fd_grad));

            p.gradient(xp, gp);
            p.gradient(xm, gm);
            for (int j = 0; j < d; ++j) {
                const double fd_hess = (gp[j] - gm[j]) / (2.0 * h);
                rep.max_hessian_error =
                    std::max(rep.max_hessian_error, rel_err(hess(i, j), fd_hess));
            }
        }
        rep.max_laplacian_error = std::max(rep.max_laplacian_error, rel_err(lap, hess.trace()));
    }
    rep.pass = rep.max_gradient_error <= rep.threshold &&
               rep.max_hessian_error <= rep.threshold &&
               rep.max_laplacian_error <= rep.threshold;
    return rep;
}

void fill_missing_derivatives(Potential& p) {
    if (!p.value) throw ParameterOutOfRange("fill_missing_derivatives: value handle required");
    const int d = p.dim;
    const auto step = [](std::span<const double> x) {
        double m = 1.0;
        for (double v : x) m = std::max(m, std::fabs(v));
        return 1e-5 * m;
    };
    if (!p.gradient) {
        auto value = p.value;
        p.gradient = [d, value, step](std::span<const double> x, std::span<double> g) {
            Vec xp(x.begin(), x.end()), xm(x.begin(), x.end());
            const double h = step(x);
            for (int i = 0; i < d; ++i) {
                xp[i] = x[i] + h;
                xm[i] = x[i] - h;
                g[i] = (value(xp) - value(xm)) / (2.0 * h);
                xp[i] = x[i];
                xm[i] = x[i];
            }
        };
    }
    if (!p.hessian) {
        auto gradient = p.gradient;
        p.hessian = [d, gradient, step](std::span<const double> x, SymMat& hess) {
            hess.resize(d);
            Vec xp(x.begin(), x.end()), xm(x.begin(), x.end());
            Vec gp(d), gm(d);
            const double h = step(x);
            for (int i = 0; i < d; ++i) {
                xp[i] = x[i] + h;
                xm[i] = x[i] - h;
                gradient(xp, gp);
                gradient(xm, gm);
                for (int j = 0; j < d; ++j)
                    hess(i, j) = (gp[j] - gm[j]) / (2.0 * h);
                xp[i] = x[i];
                xm[i] = x[i];
            }
            // symmetrize the finite-difference result
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j)
                    hess.set(i, j, 0.5 * (hess(i, j) + hess(j, i)));
        };
    }
    if (!p.laplacian) {
        auto hessian = p.hessian;
        p.laplacian = [d, hessian](std::span<const double> x) {
            SymMat h(d);
            hessian(x, h);
            return h.trace();
        };
    }
}

} // namespace specgap
