#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "specgap/errors.hpp"
#include "specgap/potential.hpp"
#include "specgap/rng.hpp"

using namespace specgap;

namespace {

Vec random_point(CounterRng& rng, int d, double scale) {
    Vec x(d);
    for (double& v : x) v = scale * (2.0 * rng.next_uniform() - 1.0);
    return x;
}

} // namespace

TEST_CASE("gaussian basics") {
    const Potential p = make_gaussian(2);
    CHECK(p.value(Vec{0.0, 0.0}) == 0.0);
    Vec g(2);
    p.gradient(Vec{0.0, 0.0}, g);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.0);
    CHECK(p.value(Vec{1.0, 2.0}) == doctest::Approx(2.5));
    CHECK(p.laplacian(Vec{1.0, 2.0}) == doctest::Approx(2.0));
    const SymMat h = p.hessian_at(Vec{0.3, -0.4});
    CHECK(h(0, 0) == 1.0);
    CHECK(h(1, 1) == 1.0);
    CHECK(h(0, 1) == 0.0);

    const Potential p3 = make_gaussian(3);
    const Vec ev = sym_eigenvalues(p3.hessian_at(Vec{0.5, -1.0, 2.0}));
    for (double v : ev) CHECK(v == doctest::Approx(1.0));
    CHECK(p.hessian_bound_valid);
    CHECK(p.hessian_lower_bound == 1.0);
}

TEST_CASE("subbotin closed forms and the alpha=4 eigenvalue oracle") {
    const Potential p = make_subbotin(2, 4.0);
    // smallest Hessian eigenvalue min{1, alpha-1} |x|^{alpha-2} at |x| = 2
    const Vec x = {2.0 * std::cos(0.4), 2.0 * std::sin(0.4)};
    const Vec ev = sym_eigenvalues(p.hessian_at(x));
    CHECK(ev.front() == doctest::Approx(std::min(1.0, 3.0) * 4.0).epsilon(1e-12));

    // at (1, 0): eigenvalues {U''(1), U'(1)/1} = {3, 1}
    const Vec ev2 = sym_eigenvalues(p.hessian_at(Vec{1.0, 0.0}));
    CHECK(ev2[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev2[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("subbotin alpha=2 is pointwise identical to the gaussian") {
    const Potential sub = make_subbotin(3, 2.0);
    const Potential gau = make_gaussian(3);
    CounterRng rng(21, 0);
    Vec gs(3), gg(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const Vec x = random_point(rng, 3, 5.0);
        CHECK(sub.value(x) == gau.value(x));
        sub.gradient(x, gs);
        gau.gradient(x, gg);
        for (int i = 0; i < 3; ++i) CHECK(gs[i] == gg[i]);
        CHECK(sub.laplacian(x) == gau.laplacian(x));
        const SymMat hs = sub.hessian_at(x);
        const SymMat hg = gau.hessian_at(x);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(hs(i, j) == hg(i, j));
    }
}

TEST_CASE("subbotin origin singularity policy") {
    const Potential soft = make_subbotin(2, 1.5);
    const Vec origin = {0.0, 0.0};
    Vec g(2);
    soft.gradient(origin, g); // limit 0, no throw
    CHECK(g[0] == 0.0);
    CHECK_THROWS_AS(soft.hessian_at(origin), SingularPoint);
    CHECK_THROWS_AS(soft.laplacian(origin), SingularPoint);

    const Potential quartic = make_subbotin(2, 4.0);
    const SymMat h = quartic.hessian_at(origin); // limit is the zero matrix
    CHECK(h(0, 0) == 0.0);
    CHECK(quartic.laplacian(origin) == 0.0);
}

TEST_CASE("generalized cauchy: rho formula and parameter gate") {
    CHECK_THROWS_AS(make_gen_cauchy(2, 1.0), ParameterOutOfRange);

    const Potential p = make_gen_cauchy(2, 4.0);
    // rho_1(x) = 2 beta (1 - |x|^2) / (1 + |x|^2)^2
    CHECK(sym_eigenvalues(p.hessian_at(Vec{0.0, 0.0})).front() ==
          doctest::Approx(8.0).epsilon(1e-12));
    CHECK(sym_eigenvalues(p.hessian_at(Vec{1.0, 0.0})).front() ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sym_eigenvalues(p.hessian_at(Vec{2.0, 0.0})).front() ==
          doctest::Approx(2.0 * 4.0 * (1.0 - 4.0) / 25.0).epsilon(1e-12));
    CHECK(p.hessian_lower_bound == doctest::Approx(-1.0));

    // the paper formula against the eigensolver at random points
    CounterRng rng(7, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec x = random_point(rng, 2, 4.0);
        const double s = x[0] * x[0] + x[1] * x[1];
        const double expect = 8.0 * (1.0 - s) / ((1.0 + s) * (1.0 + s));
        CHECK(sym_eigenvalues(p.hessian_at(x)).front() ==
              doctest::Approx(expect).epsilon(1e-10));
        // never below the stored uniform bound
        CHECK(sym_eigenvalues(p.hessian_at(x)).front() >= p.hessian_lower_bound - 1e-12);
    }
}

TEST_CASE("coupled quartic") {
    const Potential p0 = make_coupled_quartic(0.0);
    const SymMat h0 = p0.hessian_at(Vec{1.0, 1.0});
    CHECK(h0(0, 0) == doctest::Approx(3.0));
    CHECK(h0(1, 1) == doctest::Approx(3.0));
    CHECK(h0(0, 1) == 0.0);

    const Potential p = make_coupled_quartic(0.5);
    const Vec ev = sym_eigenvalues(p.hessian_at(Vec{0.0, 0.0}));
    CHECK(ev[0] == doctest::Approx(-0.5));
    CHECK(ev[1] == doctest::Approx(0.5));

    const Potential pq = make_coupled_quartic(0.1);
    CHECK(pq.value(Vec{1.0, 2.0}) == doctest::Approx(0.25 + 4.0 - 0.2).epsilon(1e-14));
}

TEST_CASE("radial profile eigenstructure invariant") {
    // eigensolve(hessian(x)) = {U''(r)} union {U'(r)/r x (d-1)} on r in [0.1, 10]
    const double alpha = 4.0, beta = 4.0;
    const RadialProfile sub = subbotin_profile(alpha);
    const RadialProfile cau = gen_cauchy_profile(beta);
    const Potential psub = make_subbotin(3, alpha);
    const Potential pcau = make_gen_cauchy(3, beta);

    CounterRng rng(3, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const double r = 0.1 * std::pow(100.0, rng.next_uniform());
        Vec dir = random_point(rng, 3, 1.0);
        double n = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
        Vec x(3);
        for (int i = 0; i < 3; ++i) x[i] = r * dir[i] / n;

        for (const auto& [prof, pot] : {std::pair{&sub, &psub}, std::pair{&cau, &pcau}}) {
            Vec expect = {prof->ddu(r), prof->du(r) / r, prof->du(r) / r};
            std::sort(expect.begin(), expect.end());
            const Vec got = sym_eigenvalues(pot->hessian_at(x));
            for (int i = 0; i < 3; ++i)
                CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("laplacian equals hessian trace on all builtins") {
    std::vector<Potential> pots;
    pots.push_back(make_gaussian(3));
    pots.push_back(make_subbotin(2, 4.0));
    pots.push_back(make_subbotin(2, 1.5));
    pots.push_back(make_gen_cauchy(2, 4.0));
    pots.push_back(make_coupled_quartic(0.1));
    CounterRng rng(17, 0);
    for (const Potential& p : pots) {
        for (int trial = 0; trial < 200; ++trial) {
            Vec x = random_point(rng, p.dim, 3.0);
            if (p.name == "subbotin") {
                double n = 0;
                for (double v : x) n += v * v;
                if (n < 1e-8) continue;
            }
            const SymMat h = p.hessian_at(x);
            CHECK(h.max_asymmetry() == 0.0);
            const double lap = p.laplacian(x);
            CHECK(std::fabs(lap - h.trace()) <= 1e-10 * std::max(1.0, std::fabs(lap)));
        }
    }
}

TEST_CASE("derivative validator") {
    CounterRng rng(29, 0);

    // exact quadratic: errors at the numerical floor
    const Potential gau = make_gaussian(2);
    std::vector<Vec> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(random_point(rng, 2, 3.0));
    const ValidationReport rep = validate_derivatives(gau, pts, 1e-4);
    CHECK(rep.pass);
    CHECK(rep.max_gradient_error <= 1e-6);

    // coupled quartic at 100 random points of [-3,3]^2
    const Potential q = make_coupled_quartic(0.1);
    pts.clear();
    for (int i = 0; i < 100; ++i) pts.push_back(random_point(rng, 2, 3.0));
    CHECK(validate_derivatives(q, pts, 1e-4).pass);

    // cauchy and subbotin alpha=4 away from the origin
    const Potential c = make_gen_cauchy(2, 4.0);
    CHECK(validate_derivatives(c, pts, 1e-4).pass);

    // singular point propagates
    const Potential soft = make_subbotin(2, 1.5);
    std::vector<Vec> with_origin = {Vec{1.0, 1.0}, Vec{0.0, 0.0}};
    CHECK_THROWS_AS(validate_derivatives(soft, with_origin, 1e-4), SingularPoint);
}

TEST_CASE("finite-difference fallbacks for user potentials") {
    Potential user;
    user.dim = 2;
    user.name = "user";
    user.value = [](std::span<const double> x) {
        return std::cos(x[0]) + 0.5 * x[1] * x[1] * x[1] * x[1];
    };
    fill_missing_derivatives(user);
    Vec g(2);
    user.gradient(Vec{0.3, 0.5}, g);
    CHECK(g[0] == doctest::Approx(-std::sin(0.3)).epsilon(1e-8));
    CHECK(g[1] == doctest::Approx(2.0 * 0.125).epsilon(1e-6));
    const SymMat h = user.hessian_at(Vec{0.3, 0.5});
    CHECK(h(0, 0) == doctest::Approx(-std::cos(0.3)).epsilon(1e-4));
    CHECK(user.laplacian(Vec{0.3, 0.5}) ==
          doctest::Approx(-std::cos(0.3) + 6.0 * 0.25).epsilon(1e-4));
}
