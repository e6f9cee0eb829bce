#include "specgap/inequalities.hpp"

#include <cmath>

#include "specgap/errors.hpp"

namespace specgap {

std::vector<TestFunction> default_test_family(const Potential& p) {
    const int d = p.dim;
    std::vector<TestFunction> fam;

    TestFunction x1;
    x1.name = "x1";
    x1.family = "linear";
    x1.f = [](std::span<const double> x) { return x[0]; };
    x1.grad = [d](std::span<const double>, std::span<double> g) {
        for (int i = 0; i < d; ++i) g[i] = 0.0;
        g[0] = 1.0;
    };
    x1.laplacian = [](std::span<const double>) { return 0.0; };
    fam.push_back(x1);

    if (d >= 2) {
        TestFunction sum;
        sum.name = "x1+x2";
        sum.family = "linear";
        sum.f = [](std::span<const double> x) { return x[0] + x[1]; };
        sum.grad = [d](std::span<const double>, std::span<double> g) {
            for (int i = 0; i < d; ++i) g[i] = 0.0;
            g[0] = 1.0;
            g[1] = 1.0;
        };
        sum.laplacian = [](std::span<const double>) { return 0.0; };
        fam.push_back(sum);

        TestFunction prod;
        prod.name = "x1*x2";
        prod.family = "quadratic";
        prod.f = [](std::span<const double> x) { return x[0] * x[1]; };
        prod.grad = [d](std::span<const double> x, std::span<double> g) {
            for (int i = 0; i < d; ++i) g[i] = 0.0;
            g[0] = x[1];
            g[1] = x[0];
        };
        prod.laplacian = [](std::span<const double>) { return 0.0; };
        fam.push_back(prod);
    }

    TestFunction sq;
    sq.name = "|x|^2";
    sq.family = "radial";
    sq.f = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    };
    sq.grad = [d](std::span<const double> x, std::span<double> g) {
        for (int i = 0; i < d; ++i) g[i] = 2.0 * x[i];
    };
    sq.laplacian = [d](std::span<const double>) { return 2.0 * d; };
    fam.push_back(sq);

    TestFunction osc;
    osc.name = "sin(x1)";
    osc.family = "oscillatory";
    osc.f = [](std::span<const double> x) { return std::sin(x[0]); };
    osc.grad = [d](std::span<const double> x, std::span<double> g) {
        for (int i = 0; i < d; ++i) g[i] = 0.0;
        g[0] = std::cos(x[0]);
    };
    osc.laplacian = [](std::span<const double> x) { return -std::sin(x[0]); };
    fam.push_back(osc);

    Vec e1(d, 0.0);
    e1[0] = 1.0;
    fam.push_back(extremal_test_function(p, e1));
    return fam;
}

TestFunction extremal_test_function(const Potential& p, const Vec& alpha) {
    const int d = p.dim;
    TestFunction tf;
    tf.name = "grad_v";
    tf.family = "custom";
    tf.f = [grad = p.gradient, alpha, d](std::span<const double> x) {
        static thread_local Vec g;
        g.resize(d);
        grad(x, g);
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += alpha[i] * g[i];
        return s;
    };
    tf.grad = [hess = p.hessian, alpha, d](std::span<const double> x, std::span<double> g) {
        static thread_local SymMat h;
        hess(x, h);
        for (int i = 0; i < d; ++i) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += h(i, j) * alpha[j];
            g[i] = s;
        }
    };
    if (p.grad_laplacian) {
        tf.laplacian = [gl = p.grad_laplacian, alpha, d](std::span<const double> x) {
            static thread_local Vec g;
            g.resize(d);
            gl(x, g);
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += alpha[i] * g[i];
            return s;
        };
    }
    return tf;
}

namespace {

MarginReport finish(const std::string& id, const std::string& fname, double lhs, double rhs,
                    double tol_scale) {
    MarginReport r;
    r.inequality = id;
    r.function_name = fname;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tolerance = 1e-8 * (1.0 + std::fabs(tol_scale));
    r.pass = r.margin >= -r.tolerance;
    return r;
}

} // namespace

MarginReport check_generalized_bl(const Measure& mu, const MField& m, const TestFunction& f,
                                  KernelPolicy policy) {
    const EnergyResult rhs = energy_detail(
        mu, f.grad, [&](std::span<const double> x, SymMat& out) { m.eval(x, out); }, policy);
    const double lhs = variance(mu, f.f);
    MarginReport r = finish("gbl", f.name, lhs, rhs.value, rhs.value);
    r.excluded_mass = rhs.excluded_mass;
    if (rhs.excluded_nodes > 0)
        r.note = "kernel below rho_floor at " + std::to_string(rhs.excluded_nodes) +
                 " node(s); their mass was excluded from the energy";
    return r;
}

MarginReport check_classical_bl(const Measure& mu, const Potential& p, const TestFunction& f,
                                KernelPolicy policy) {
    const EnergyResult rhs = energy_detail(
        mu, f.grad, [&](std::span<const double> x, SymMat& out) { p.hessian(x, out); },
        policy);
    const double lhs = variance(mu, f.f);
    MarginReport r = finish("cbl", f.name, lhs, rhs.value, rhs.value);
    r.excluded_mass = rhs.excluded_mass;
    return r;
}

MarginReport check_asymmetric_bl(const Measure& mu, const MField& m, const TestFunction& f,
                                 const TestFunction& g) {
    if (m.weight().kind != Weight::Kind::Scalar)
        throw ParameterOutOfRange("check_asymmetric_bl: scalar weight required");
    const int d = mu.dim();
    Vec gg(d);

    auto ratio_at = [&](std::span<const double> x) {
        const double rho = m.rho(x);
        if (!(rho > 0.0))
            throw NonPositiveRho("check_asymmetric_bl: rho_a not positive on the sup grid");
        g.grad(x, gg);
        double n2 = 0.0;
        for (int i = 0; i < d; ++i) n2 += gg[i] * gg[i];
        return m.weight().a(0, x) * std::sqrt(n2) / rho;
    };

    // sup over quadrature nodes and a 64x denser uniform spot grid
    double sup = 0.0;
    for (size_t i = 0; i < mu.node_count(); ++i) sup = std::max(sup, ratio_at(mu.node(i)));
    const int per_axis_factor = d == 1 ? 64 : (d == 2 ? 8 : 4);
    GridSpec spot;
    spot.box = mu.box();
    for (int i = 0; i < d; ++i) spot.counts.push_back(mu.resolution()[i] * per_axis_factor);
    Vec x;
    for (size_t i = 0; i < spot.node_count(); ++i) {
        spot.node(i, x);
        sup = std::max(sup, ratio_at(x));
    }

    const double integral = mu.integrate([&](std::span<const double> x) {
        static thread_local Vec gf;
        gf.resize(d);
        f.grad(x, gf);
        double n2 = 0.0;
        for (int i = 0; i < d; ++i) n2 += gf[i] * gf[i];
        return std::sqrt(n2) / m.weight().a(0, x);
    });

    const double lhs = std::fabs(covariance(mu, f.f, g.f));
    const double rhs = sup * integral;
    MarginReport r = finish("abl", f.name + "|" + g.name, lhs, rhs, rhs);
    r.note = "rhs sup norm is a grid-sup over the quadrature nodes and a 64x denser grid";
    return r;
}

MarginReport check_poincare(const Measure& mu, double lambda_cand, const TestFunction& f) {
    const int d = mu.dim();
    const double dirichlet = mu.integrate([&](std::span<const double> x) {
        static thread_local Vec g;
        g.resize(d);
        f.grad(x, g);
        double n2 = 0.0;
        for (int i = 0; i < d; ++i) n2 += g[i] * g[i];
        return n2;
    });
    const double lhs = lambda_cand * variance(mu, f.f);
    return finish("poincare", f.name, lhs, dirichlet, dirichlet);
}

MarginReport check_gamma2(const Measure& mu, const MField& m, const TestFunction& f) {
    if (!f.laplacian)
        throw ParameterOutOfRange("check_gamma2: test function lacks a closed-form "
                                  "Laplacian");
    const int d = mu.dim();
    const Potential& p = m.potential();
    const double rhs = mu.integrate([&](std::span<const double> x) {
        static thread_local Vec gv, gf;
        gv.resize(d);
        gf.resize(d);
        p.gradient(x, gv);
        f.grad(x, gf);
        double dot = 0.0;
        for (int i = 0; i < d; ++i) dot += gv[i] * gf[i];
        const double lf = f.laplacian(x) - dot;
        return lf * lf;
    });
    const double lhs = quadratic_energy(
        mu, f.grad, [&](std::span<const double> x, SymMat& out) { m.eval(x, out); });
    return finish("gamma2", f.name, lhs, rhs, rhs);
}

double quadratic_energy(const Measure& mu, const GradFn& grad_f, const KernelFn& kernel) {
    const int d = mu.dim();
    return mu.integrate([&](std::span<const double> x) {
        static thread_local Vec g;
        static thread_local SymMat ker;
        g.resize(d);
        grad_f(x, g);
        kernel(x, ker);
        return ker.quad_form(g);
    });
}

} // namespace specgap
