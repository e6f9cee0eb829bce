#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "specgap/errors.hpp"
#include "specgap/inequalities.hpp"
#include "specgap/rng.hpp"

using namespace specgap;

namespace {

const double kSqrt5 = std::sqrt(5.0);

// central-difference cross-check of a test function's gradient handle
void check_gradient_consistency(const TestFunction& tf, int d, CounterRng& rng) {
    const double h = 1e-5;
    Vec x(d), g(d), xp(d), xm(d);
    for (int trial = 0; trial < 25; ++trial) {
        for (int i = 0; i < d; ++i) x[i] = 3.0 * (2.0 * rng.next_uniform() - 1.0);
        tf.grad(x, g);
        for (int i = 0; i < d; ++i) {
            xp = x;
            xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (tf.f(xp) - tf.f(xm)) / (2.0 * h);
            CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6).scale(
                              std::max(1.0, std::fabs(fd))));
        }
    }
}

TestFunction constant_function(int d) {
    TestFunction tf;
    tf.name = "const";
    tf.family = "custom";
    tf.f = [](std::span<const double>) { return 7.0; };
    tf.grad = [d](std::span<const double>, std::span<double> g) {
        for (int i = 0; i < d; ++i) g[i] = 0.0;
    };
    tf.laplacian = [](std::span<const double>) { return 0.0; };
    return tf;
}

} // namespace

TEST_CASE("default family: members and gradient consistency") {
    const Potential p2 = make_coupled_quartic(0.1);
    const auto fam2 = default_test_family(p2);
    CHECK(fam2.size() == 6);
    const Potential p1 = make_gaussian(1);
    CHECK(default_test_family(p1).size() == 4);

    CounterRng rng(31, 0);
    for (const auto& tf : fam2) check_gradient_consistency(tf, 2, rng);
}

TEST_CASE("generalized BL: gaussian extremal equality and the weighted form") {
    const Potential p = make_gaussian(2);
    const Measure mu = build_measure(p, {200});

    // identity weight, extremal f = e1 . grad V = x1: equality
    const MField mid = m_field(p, identity_weight(2));
    const auto fam = default_test_family(p);
    const MarginReport eq = check_generalized_bl(mu, mid, fam[0]);
    CHECK(eq.pass);
    CHECK(std::fabs(eq.margin) <= eq.tolerance);

    // optimal epsilon: the field is exactly (sqrt5 - 2)(1 + |x|^2) I
    const double eps_star = (3.0 - kSqrt5) / 2.0;
    const MField mw = m_field(p, make_epsilon_weight(p, eps_star));
    auto envelope_kernel = [](std::span<const double> x, SymMat& k) {
        const double v = (kSqrt5 - 2.0) * (1.0 + x[0] * x[0] + x[1] * x[1]);
        k.resize(2);
        k(0, 0) = v;
        k(1, 1) = v;
        k(0, 1) = k(1, 0) = 0.0;
    };
    for (const auto& tf : fam) {
        const MarginReport field_route = check_generalized_bl(mu, mw, tf);
        CHECK(field_route.pass);
        const double rhs_kernel = energy(mu, tf.grad, envelope_kernel);
        CHECK(field_route.rhs == doctest::Approx(rhs_kernel).epsilon(1e-11));
    }
}

TEST_CASE("generalized BL with the cauchy weighted kernel") {
    const double beta = 4.0;
    const Potential p = make_gen_cauchy(2, beta);
    const Box box = {{-50.0, 50.0}, {-50.0, 50.0}};
    const Measure mu = build_measure(p, {800}, &box);
    const auto fam = default_test_family(p);

    // 2 (beta - d) Var <= int (1 + |x|^2) |grad f|^2 dmu as a kernel form
    auto kernel = [&](std::span<const double> x, SymMat& k) {
        const double v = 2.0 * (beta - 2.0) / (1.0 + x[0] * x[0] + x[1] * x[1]);
        k.resize(2);
        k(0, 0) = v;
        k(1, 1) = v;
        k(0, 1) = k(1, 0) = 0.0;
    };
    for (const auto& tf : fam) {
        const double lhs = variance(mu, tf.f);
        const double rhs = energy(mu, tf.grad, kernel);
        CHECK(rhs - lhs >= -1e-8 * (1.0 + std::fabs(rhs)));
    }

    // and through the epsilon field at the optimizing eps = 1/beta
    const MField m = m_field(p, make_epsilon_weight(p, 1.0 / beta));
    for (const auto& tf : fam) CHECK(check_generalized_bl(mu, m, tf).pass);
}

TEST_CASE("classical BL") {
    const Potential g = make_gaussian(2);
    const Measure mug = build_measure(g, {200});
    const auto fam = default_test_family(g);
    const MarginReport eq = check_classical_bl(mug, g, fam[0]);
    CHECK(eq.pass);
    CHECK(std::fabs(eq.margin) <= eq.tolerance);

    // subbotin alpha = 4: positive-definite hessian away from the origin
    const Potential s = make_subbotin(2, 4.0);
    const Measure mus = build_measure(s, {128});
    const auto fams = default_test_family(s);
    const MarginReport sub = check_classical_bl(mus, s, fams[0]);
    CHECK(sub.pass);
    // a fortiori with the smallest-eigenvalue envelope kernel
    auto envelope = [](std::span<const double> x, SymMat& k) {
        const double v = x[0] * x[0] + x[1] * x[1]; // min{1, alpha-1} |x|^{alpha-2}
        k.resize(2);
        k(0, 0) = v;
        k(1, 1) = v;
        k(0, 1) = k(1, 0) = 0.0;
    };
    const double lhs = variance(mus, fams[0].f);
    const double rhs = energy(mus, fams[0].grad, envelope);
    CHECK(rhs >= sub.rhs - 1e-12);
    CHECK(rhs - lhs >= -1e-8 * (1.0 + rhs));

    // cauchy: indefinite hessian is refused
    const Potential c = make_gen_cauchy(2, 4.0);
    const Box box = {{-50.0, 50.0}, {-50.0, 50.0}};
    const Measure muc = build_measure(c, {400}, &box);
    CHECK_THROWS_AS(check_classical_bl(muc, c, default_test_family(c)[0]),
                    KernelSingular);
}

TEST_CASE("generalized equals classical bit for bit under the identity weight") {
    const Potential p = make_subbotin(2, 4.0);
    const Measure mu = build_measure(p, {128});
    const MField m = m_field(p, identity_weight(2));
    for (const auto& tf : default_test_family(p)) {
        const MarginReport a = check_generalized_bl(mu, m, tf);
        const MarginReport b = check_classical_bl(mu, p, tf);
        CHECK(a.lhs == b.lhs);
        CHECK(a.rhs == b.rhs);
        CHECK(a.margin == b.margin);
    }
}

TEST_CASE("asymmetric BL") {
    const Potential p = make_gaussian(2);
    const Measure mu = build_measure(p, {128});
    const MField mid = m_field(p, identity_weight(2));
    const auto fam = default_test_family(p);

    // g constant: both sides vanish
    const MarginReport zero = check_asymmetric_bl(mu, mid, fam[0], constant_function(2));
    CHECK(zero.pass);
    CHECK(zero.lhs <= 1e-16); // mean subtraction leaves ulp dust
    CHECK(zero.rhs == 0.0);

    // equality diagnostic: a == 1, f = g = x1 gives |Cov| = rhs = 1
    const MarginReport eq = check_asymmetric_bl(mu, mid, fam[0], fam[0]);
    CHECK(eq.lhs == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(eq.rhs == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::fabs(eq.margin) <= 1e-8);

    // independence: f = x1, g = x2 decorrelated under the epsilon weight
    const MField meps = m_field(p, make_epsilon_weight(p, 0.1));
    TestFunction x2 = fam[0];
    x2.name = "x2";
    x2.f = [](std::span<const double> x) { return x[1]; };
    x2.grad = [](std::span<const double>, std::span<double> g) {
        g[0] = 0.0;
        g[1] = 1.0;
    };
    const MarginReport ind = check_asymmetric_bl(mu, meps, fam[0], x2);
    CHECK(ind.pass);
    CHECK(ind.lhs <= 1e-10);
    CHECK(ind.rhs > 0.5);

    // scaling by a power of two is an exact symmetry of both sides
    TestFunction scaled = fam[0];
    scaled.f = [](std::span<const double> x) { return 2.0 * x[0]; };
    scaled.grad = [](std::span<const double>, std::span<double> g) {
        g[0] = 2.0;
        g[1] = 0.0;
    };
    const MarginReport base = check_asymmetric_bl(mu, mid, fam[0], fam[3]);
    const MarginReport twice = check_asymmetric_bl(mu, mid, scaled, fam[3]);
    CHECK(twice.lhs == 2.0 * base.lhs);
    CHECK(twice.rhs == 2.0 * base.rhs);

    // positivity precondition
    const Potential c = make_gen_cauchy(2, 4.0);
    const Box box = {{-50.0, 50.0}, {-50.0, 50.0}};
    const Measure muc = build_measure(c, {400}, &box);
    const MField mc = m_field(c, identity_weight(2));
    CHECK_THROWS_AS(check_asymmetric_bl(muc, mc, fam[0], fam[0]), NonPositiveRho);
}

TEST_CASE("poincare margins") {
    const Potential g = make_gaussian(2);
    const Measure mu = build_measure(g, {200});
    const auto fam = default_test_family(g);
    const MarginReport eq = check_poincare(mu, 1.0, fam[0]);
    CHECK(eq.pass);
    CHECK(std::fabs(eq.margin) <= eq.tolerance);

    const Potential q = make_coupled_quartic(0.1);
    const Measure muq = build_measure(q, {200});
    for (const auto& tf : default_test_family(q))
        CHECK(check_poincare(muq, std::sqrt(1.49) - 1.1, tf).pass);
}

TEST_CASE("gamma2 inequality") {
    const Potential g = make_gaussian(1);
    const Measure mu1 = build_measure(g, {200});
    const auto fam1 = default_test_family(g);
    // f = x: both sides equal 1
    const MarginReport eq = check_gamma2(mu1, m_field(g, identity_weight(1)), fam1[0]);
    CHECK(eq.lhs == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(eq.rhs == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(eq.pass);

    // indefinite cauchy field: the inequality holds with no positivity
    const Potential c = make_gen_cauchy(2, 4.0);
    const Box box = {{-50.0, 50.0}, {-50.0, 50.0}};
    const Measure muc = build_measure(c, {800}, &box);
    const MField mc = m_field(c, identity_weight(2));
    for (const auto& tf : default_test_family(c)) CHECK(check_gamma2(muc, mc, tf).pass);

    // constant functions: 0 >= 0
    const MarginReport zero = check_gamma2(muc, mc, constant_function(2));
    CHECK(zero.pass);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
}
