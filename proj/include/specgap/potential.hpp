#ifndef SPECGAP_POTENTIAL_HPP
#define SPECGAP_POTENTIAL_HPP

#include <functional>
#include <map>
#include <span>
#include <string>

#include "specgap/linalg.hpp"

namespace specgap {

// A smooth scalar field V on R^d with exact derivative evaluators.
// Evaluators are pure; they may throw SingularPoint at isolated points
// where a derivative diverges (radial fields at the origin).
struct Potential {
    int dim = 0;
    std::string name;

    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    std::function<void(std::span<const double>, SymMat&)> hessian;
    std::function<double(std::span<const double>)> laplacian;

    // gradient of the Laplacian; empty when no closed form is available
    std::function<void(std::span<const double>, std::span<double>)> grad_laplacian;

    // Uniform lower bound on the Hessian spectrum. Stored metadata, not
    // recomputed; invalid for user potentials unless supplied.
    double hessian_lower_bound = 0.0;
    bool hessian_bound_valid = false;

    std::map<std::string, double> params;

    SymMat hessian_at(std::span<const double> x) const {
        SymMat h(dim);
        hessian(x, h);
        return h;
    }
};

// Radial profile U with V(x) = U(|x|). The induced Hessian at x != 0 has
// eigenvalues U''(|x|) and U'(|x|)/|x| (multiplicity d-1).
struct RadialProfile {
    std::function<double(double)> u;
    std::function<double(double)> du;
    std::function<double(double)> ddu;
};

// V(x) = |x|^2 / 2
Potential make_gaussian(int d);

// V(x) = |x|^alpha / alpha, alpha > 1. Derivatives at the origin return
// the limiting value when finite and throw SingularPoint otherwise.
Potential make_subbotin(int d, double alpha);

// V(x) = beta * log(1 + |x|^2), beta > d/2
Potential make_gen_cauchy(int d, double beta);

// V(x, y) = x^4/4 + y^4/4 - beta*x*y on R^2, beta >= 0
Potential make_coupled_quartic(double beta);

RadialProfile subbotin_profile(double alpha);
RadialProfile gen_cauchy_profile(double beta);

struct ValidationReport {
    double max_gradient_error = 0.0;  // gradient vs central difference of value
    double max_hessian_error = 0.0;   // hessian vs central difference of gradient
    double max_laplacian_error = 0.0; // laplacian vs trace of hessian
    double threshold = 0.0;           // 100 h^2
    bool pass = false;
};

// Checks the derivative evaluators against central finite differences at
// the given points. Errors are relative to max(1, |reference|).
// SingularPoint from the evaluators propagates.
ValidationReport validate_derivatives(const Potential& p,
                                      std::span<const Vec> points, double h);

// Installs central-difference fallbacks (step 1e-5 * max(1, |x|)) for any
// missing derivative handles of a user-supplied potential. The value
// handle must be present.
void fill_missing_derivatives(Potential& p);

} // namespace specgap

#endif
