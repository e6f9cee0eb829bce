#ifndef SPECGAP_SDE_HPP
#define SPECGAP_SDE_HPP

#include <cstdint>
#include <functional>

#include "specgap/measure.hpp"
#include "specgap/weights.hpp"

namespace specgap {

// Euler-Maruyama configuration. Paths draw from counter-based per-path
// streams of `seed`, so ensembles are reproducible bit for bit.
struct PathConfig {
    double t_final = 1.0;
    double dt = 1e-3;
    size_t n_paths = 1;
    uint64_t seed = 0;
    // acknowledges a Lyapunov-type non-explosion argument when the Hessian
    // lower bound of the simulated potential is not available
    bool allow_lyapunov_override = false;

    size_t n_steps() const;
    void validate() const;
};

struct FKEstimate {
    Vec mean;       // dimension d for vector estimates, 1 for scalars
    Vec std_error;  // matching shape
    size_t n_paths = 0;
    PathConfig config;
};

using ScalarFn = std::function<double(std::span<const double>)>;

// Terminal states of the diffusion with generator L_a (drift
// -grad V + 2 grad W for a scalar weight a = e^{-W}).
struct PathEnsemble {
    Vec terminal; // n_paths x d, row-major
    int dim = 0;
    size_t n_paths = 0;

    std::span<const double> state(size_t path) const {
        return {terminal.data() + path * static_cast<size_t>(dim),
                static_cast<size_t>(dim)};
    }
};

PathEnsemble simulate_paths(const Potential& p, const Weight& w, const Vec& x0,
                            const PathConfig& cfg);

// One recorded path (all intermediate states), for the matrix-process
// diagnostics.
struct SinglePath {
    Vec states; // (n_steps + 1) x d
    int dim = 0;
    size_t n_states = 0;

    std::span<const double> state(size_t k) const {
        return {states.data() + k * static_cast<size_t>(dim), static_cast<size_t>(dim)};
    }
};

SinglePath simulate_single_path(const Potential& p, const Weight& w, const Vec& x0,
                                const PathConfig& cfg, uint64_t path_index);

// Solution of dY/dt = -Y M(X_t) with Y(0) = I along a recorded path; each
// step multiplies by the second-order truncated exponential
// I - dt M + dt^2 M^2 / 2 with M frozen at the step start.
struct YEvolution {
    Vec y_final;              // d x d row-major
    double y_opnorm = 0.0;    // |Y(t)|_op
    double rho_integral = 0.0; // sum dt * rho(X_k), left endpoints
    double max_m_opnorm = 0.0; // max |M(X_k)|_op along the path
};

YEvolution evolve_Y(const MField& m, const SinglePath& path, const PathConfig& cfg);

// Monte Carlo estimate of E[ Y_t a(X_t) grad f(X_t) ] = a(x0) grad P_t f(x0).
FKEstimate fk_vector_estimate(const Potential& p, const Weight& w, const GradFn& grad_f,
                              const Vec& x0, const PathConfig& cfg);

// Common-random-number central differences for grad P_t f(x0): paths from
// x0 +- h e_i share their Brownian increments. h must lie in [1e-4, 1e-2].
FKEstimate crn_gradient_estimate(const Potential& p, const ScalarFn& f, const Vec& x0,
                                 double h, const PathConfig& cfg);

// Feynman-Kac scalar semigroup E[ g(X_t) exp(-int_0^t rho(X_s) ds) ] with a
// trapezoidal exponent.
FKEstimate fk_scalar_estimate(const Potential& p, const Weight& w, const ScalarFn& rho,
                              const ScalarFn& g, const Vec& x0, const PathConfig& cfg);

} // namespace specgap

#endif
