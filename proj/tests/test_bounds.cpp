#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "specgap/bounds.hpp"
#include "specgap/errors.hpp"
#include "specgap/rng.hpp"

using namespace specgap;

namespace {

// independent 1D oracle: maximize min{1 - gamma eps, eps (1 - eps)} over
// eps in (0, 1/gamma) by grid search plus golden refinement
double subbotin_prefactor_oracle(double gamma) {
    auto objective = [gamma](double eps) {
        return std::min(1.0 - gamma * eps, eps * (1.0 - eps));
    };
    const double hi = 1.0 / gamma;
    double best_e = 0.0, best_v = -1.0;
    for (int i = 1; i < 4000; ++i) {
        const double e = hi * i / 4000.0;
        if (objective(e) > best_v) {
            best_v = objective(e);
            best_e = e;
        }
    }
    const double cell = hi / 4000.0;
    const double e = golden_section_max(objective, std::max(1e-12, best_e - cell),
                                        std::min(hi, best_e + cell), 1e-12);
    return objective(e);
}

} // namespace

TEST_CASE("grid spec node enumeration") {
    GridSpec g = make_grid({{0.0, 1.0}, {-1.0, 1.0}}, 3);
    CHECK(g.node_count() == 9);
    Vec x;
    g.node(0, x);
    CHECK(x[0] == 0.0);
    CHECK(x[1] == -1.0);
    g.node(8, x);
    CHECK(x[0] == 1.0);
    CHECK(x[1] == 1.0);
    g.node(4, x);
    CHECK(x[0] == 0.5);
    CHECK(x[1] == 0.0);
}

TEST_CASE("inf rho bound: constant gaussian field is exactly one") {
    const Potential p = make_gaussian(2);
    const MField m = m_field(p, identity_weight(2));
    const GridSpec grid = make_grid(auto_box(p), 51);
    const BoundReport rep = inf_rho_bound(m, grid);
    CHECK(rep.value == 1.0);
    CHECK(rep.kind == BoundReport::Kind::InfRho);
    CHECK(rep.potential_name == "gaussian");
}

TEST_CASE("inf rho bound refuses the indefinite cauchy hessian") {
    const Potential p = make_gen_cauchy(2, 4.0);
    const MField m = m_field(p, identity_weight(2));
    const GridSpec grid = make_grid({{-50.0, 50.0}, {-50.0, 50.0}}, 101);
    CHECK_THROWS_AS(inf_rho_bound(m, grid), NonPositiveBound);
}

TEST_CASE("quartic Z-weight certificate bound") {
    const Potential p = make_coupled_quartic(0.1);
    const Weight w = make_quartic_z_weight(p, 0.25, std::sqrt(1.49));
    const MField m = m_field(p, w);
    const GridSpec grid = make_grid(auto_box(p), 101);
    const BoundReport rep = inf_rho_bound(m, grid);
    const double paper_value = std::sqrt(1.49) - 1.1;
    CHECK(rep.value >= paper_value - 1e-12);

    // report invariant: value below rho at every evidence node
    Vec x;
    for (size_t i = 0; i < grid.node_count(); i += 7) {
        grid.node(i, x);
        CHECK(m.rho(x) >= rep.value - 1e-12);
    }
}

TEST_CASE("certified value survives an independent random audit") {
    const Potential p = make_coupled_quartic(0.1);
    const Weight w = make_quartic_z_weight(p, 0.25, std::sqrt(1.49));
    const MField m = m_field(p, w);
    const GridSpec grid = make_grid(auto_box(p), 101);
    const BoundReport rep = inf_rho_bound(m, grid, 1234);
    CounterRng rng(0xfeedULL, 0);
    Vec x(2);
    for (int i = 0; i < 10000; ++i) {
        for (int k = 0; k < 2; ++k) {
            const double u = rng.next_uniform();
            x[k] = grid.box[k].first + u * (grid.box[k].second - grid.box[k].first);
        }
        CHECK(m.rho(x) >= rep.value - 1e-9);
    }
}

TEST_CASE("integrated bound") {
    const Potential p = make_gaussian(1);
    const MField m = m_field(p, identity_weight(1));
    const Measure mu = build_measure(p, {200});

    // identity weight, rho == 1: integral of 1/rho is 1, S term vanishes
    const BoundReport rep = integrated_bound(m, mu, 1.0, 1.0);
    CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.kind == BoundReport::Kind::Integrated);

    // matches the inf-rho route on this constant field
    const BoundReport inf_rep = inf_rho_bound(m, make_grid(mu.box(), 65));
    CHECK(rep.value == doctest::Approx(inf_rep.value).epsilon(1e-10));

    // wrong caller bounds on S are rejected by the spot-check
    CHECK_THROWS_AS(integrated_bound(m, mu, 2.0, 3.0), BoundsUnverified);

    // a genuinely weighted case: alpha_S/beta_S from the box extremes
    const Potential g2 = make_gaussian(2);
    const Weight w = make_epsilon_weight(g2, 0.1);
    const MField m2 = m_field(g2, w);
    const Measure mu2 = build_measure(g2, {128});
    double smax = 1.0;
    for (size_t i = 0; i < mu2.node_count(); ++i) {
        SymMat s(2);
        metric_S(w, mu2.node(i), s);
        smax = std::max(smax, s(0, 0));
    }
    const BoundReport rep2 = integrated_bound(m2, mu2, 1.0, smax * (1.0 + 1e-12));
    CHECK(rep2.value > 0.0);
    CHECK(rep2.value <= 1.0 + 1e-6); // cannot beat the true OU gap
}

TEST_CASE("subbotin closed form against the grid-search oracle") {
    // gamma = 2 boundary: eps* = (3 - sqrt 5)/2, prefactor = sqrt 5 - 2
    const SubbotinConstants c2 = subbotin_closed_form(2.0, 2);
    CHECK(c2.gamma == doctest::Approx(2.0));
    CHECK(c2.epsilon_star == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-14));
    CHECK(c2.epsilon_star > 0.0);
    CHECK(c2.epsilon_star < 0.5);
    CHECK(c2.prefactor == doctest::Approx(std::sqrt(5.0) - 2.0).epsilon(1e-14));
    CHECK(c2.prefactor == doctest::Approx(8.0 / std::pow(1.0 + std::sqrt(5.0), 3)).epsilon(1e-14));

    for (const double gamma : {2.0, 3.0, 5.0, 10.0, 100.0}) {
        // alpha >= 2 so gamma = alpha + d - 2 with d = 4 - alpha + gamma
        const double alpha = 2.0;
        const int d = static_cast<int>(gamma);
        const SubbotinConstants c = subbotin_closed_form(alpha, d);
        CHECK(c.gamma == doctest::Approx(gamma));
        CHECK(c.prefactor ==
              doctest::Approx(subbotin_prefactor_oracle(gamma)).epsilon(1e-6));
        // the optimizing epsilon solves eps^2 - (1+gamma) eps + 1 = 0
        const double res = c.epsilon_star * c.epsilon_star -
                           (1.0 + gamma) * c.epsilon_star + 1.0;
        CHECK(std::fabs(res) <= 1e-12);
        CHECK(c.epsilon_star < 1.0 / gamma);
        // prefactor = 1 - gamma eps* algebraically
        CHECK(c.prefactor == doctest::Approx(1.0 - gamma * c.epsilon_star).epsilon(1e-12));
    }

    // large-dimension behavior: prefactor * d -> min{1, alpha - 1} = 1
    const SubbotinConstants big = subbotin_closed_form(2.0, 10000);
    CHECK(big.prefactor * 10000.0 == doctest::Approx(1.0).epsilon(0.01));

    CHECK_THROWS_AS(subbotin_closed_form(1.5, 1), ParameterOutOfRange);
}

TEST_CASE("cauchy closed form and its epsilon-grid oracle") {
    const BoundReport rep = cauchy_closed_form(4.0, 2);
    CHECK(rep.value == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(rep.kind == BoundReport::Kind::ClosedForm);
    CHECK_THROWS_AS(cauchy_closed_form(2.0, 2), ParameterOutOfRange);

    // grid search over eps in (0, 1/2) of
    // min{1 - eps d, -1 - eps d + 2 eps + 2 beta eps (1 - eps)}
    const double beta = 4.0;
    const int d = 2;
    auto objective = [&](double e) {
        return std::min(1.0 - e * d,
                        -1.0 - e * d + 2.0 * e + 2.0 * beta * e * (1.0 - e));
    };
    double best = -1.0;
    for (int i = 1; i < 20000; ++i) best = std::max(best, objective(0.5 * i / 20000.0));
    // optimum (beta - d)/beta at eps = 1/beta; bound value = 2 beta * optimum
    CHECK(best == doctest::Approx((beta - d) / beta).epsilon(1e-6));
    CHECK(2.0 * beta * best == doctest::Approx(rep.value).epsilon(1e-6));
    CHECK(objective(1.0 / beta) == doctest::Approx((beta - d) / beta).epsilon(1e-14));
}

TEST_CASE("epsilon optimization") {
    // gaussian: the identity-like small-eps end wins; bound stays above
    // the closed-form envelope constant sqrt 5 - 2
    const Potential g = make_gaussian(2);
    const GridSpec grid = make_grid(auto_box(g), 65);
    const BoundReport rep = optimize_epsilon(g, grid, 1e-3, 0.499);
    CHECK(rep.value >= std::sqrt(5.0) - 2.0);
    CHECK(rep.parameters.count("epsilon") == 1);

    // heavy tail: a positive certified bound exists for beta > d
    const Potential c = make_gen_cauchy(2, 4.0);
    const GridSpec cgrid = make_grid({{-50.0, 50.0}, {-50.0, 50.0}}, 65);
    const BoundReport crep = optimize_epsilon(c, cgrid, 1e-3, 0.499);
    CHECK(crep.value > 0.0);

    // barely integrable beta < d: no epsilon yields a positive infimum
    const Potential thin = make_gen_cauchy(2, 1.01);
    const GridSpec tgrid = make_grid({{-60.0, 60.0}, {-60.0, 60.0}}, 65);
    CHECK_THROWS_AS(optimize_epsilon(thin, tgrid, 1e-3, 0.499), NonPositiveBound);
}

TEST_CASE("quartic bound closed form") {
    GridSpec grid = make_grid(auto_box(make_coupled_quartic(0.1)), 101);
    const BoundReport rep = quartic_bound(0.1, &grid);
    CHECK(rep.value == doctest::Approx(std::sqrt(1.49) - 1.1).epsilon(1e-15));
    CHECK(rep.value == doctest::Approx(0.120656).epsilon(1e-5));
    CHECK(rep.parameters.at("lambda") == 0.5);
    CHECK(rep.parameters.at("b") == 0.25);
    CHECK(rep.parameters.at("c") == doctest::Approx(std::sqrt(1.49)).epsilon(1e-15));
    // certificate minimum on the grid stayed above the value
    CHECK(rep.min_rho >= rep.value - 1e-12);

    GridSpec grid0 = make_grid(auto_box(make_coupled_quartic(0.0)), 101);
    const BoundReport rep0 = quartic_bound(0.0, &grid0);
    CHECK(rep0.value == doctest::Approx(std::sqrt(1.5) - 1.0).epsilon(1e-15));

    CHECK_THROWS_AS(quartic_bound(0.3), ParameterOutOfRange);
    // boundary of positivity: sqrt(3/2 - b^2) = 1 + b near b = 0.2071
    CHECK_THROWS_AS(quartic_bound(0.2072), ParameterOutOfRange);
    CHECK_NOTHROW(quartic_bound(0.207, &grid0));
}
