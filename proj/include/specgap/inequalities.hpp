#ifndef SPECGAP_INEQUALITIES_HPP
#define SPECGAP_INEQUALITIES_HPP

#include <string>
#include <vector>

#include "specgap/bounds.hpp"
#include "specgap/measure.hpp"
#include "specgap/weights.hpp"

namespace specgap {

struct TestFunction {
    std::string name;
    std::string family; // linear | quadratic | radial | oscillatory | custom
    std::function<double(std::span<const double>)> f;
    GradFn grad;
    // closed-form Laplacian of f; empty when unavailable (excludes the
    // function from checks needing L f)
    std::function<double(std::span<const double>)> laplacian;
};

// {x1, x1+x2, x1*x2, |x|^2, sin(x1), e1^T grad V}; the pairwise entries
// drop out in dimension one.
std::vector<TestFunction> default_test_family(const Potential& p);

// extremal family of the classical inequality: f = alpha^T grad V
TestFunction extremal_test_function(const Potential& p, const Vec& alpha);

struct MarginReport {
    std::string inequality;
    std::string function_name; // "f" or "f|g" for covariance checks
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0; // rhs - lhs
    double tolerance = 0.0;
    bool pass = false;
    double excluded_mass = 0.0; // kernel-floor exclusions (when permitted)
    std::string note;           // qualifiers, e.g. sup norms are grid-sups
};

// Var(f) <= int (grad f)^T field(x)^{-1} grad f dmu
MarginReport check_generalized_bl(const Measure& mu, const MField& m, const TestFunction& f,
                                  KernelPolicy policy = KernelPolicy::Strict);

// Var(f) <= int (grad f)^T (hess V)^{-1} grad f dmu (strictly convex V)
MarginReport check_classical_bl(const Measure& mu, const Potential& p, const TestFunction& f,
                                KernelPolicy policy = KernelPolicy::Strict);

// |Cov(f,g)| <= sup(|a grad g| / rho_a) * int |grad f| / a dmu, scalar
// weight only. The sup is a grid-sup over the quadrature nodes plus a 64x
// denser uniform grid, recorded in the note.
MarginReport check_asymmetric_bl(const Measure& mu, const MField& m, const TestFunction& f,
                                 const TestFunction& g);

// lambda_cand * Var(f) <= int |grad f|^2 dmu
MarginReport check_poincare(const Measure& mu, double lambda_cand, const TestFunction& f);

// int (grad f)^T field grad f dmu <= int (L f)^2 dmu; needs closed-form
// L f = Lap f - (grad V)^T grad f, no positivity of the field required.
MarginReport check_gamma2(const Measure& mu, const MField& m, const TestFunction& f);

// int (grad f)^T kernel(x) grad f dmu (no inversion)
double quadratic_energy(const Measure& mu, const GradFn& grad_f, const KernelFn& kernel);

} // namespace specgap

#endif
