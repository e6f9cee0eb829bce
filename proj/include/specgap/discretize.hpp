#ifndef SPECGAP_DISCRETIZE_HPP
#define SPECGAP_DISCRETIZE_HPP

#include <cstdint>

#include "specgap/bounds.hpp"
#include "specgap/potential.hpp"

namespace specgap {

// Flux-form finite-difference discretization of -L on a truncated grid
// with Neumann (reflecting) boundaries, stored in the symmetrized form
// D^{1/2} K D^{-1/2} where D holds node masses e^{-V} * cell volume.
// The quadratic form is a sum of conductance * (f_i - f_j)^2 over edges,
// so the spectrum is non-negative with a simple zero eigenvalue.
class GridOperator {
public:
    GridOperator(const Potential& p, const GridSpec& grid);

    size_t size() const { return diag_.size(); }
    const GridSpec& grid() const { return grid_; }

    // y = K x for the symmetrized operator
    void apply(std::span<const double> x, std::span<double> y) const;

    // normalized ground vector D^{1/2} 1 (exact null vector)
    const Vec& ground() const { return ground_; }

    // Gershgorin upper bound on the spectrum
    double spectral_upper_bound() const { return upper_; }

    // max |K_ij - K_ji| probe via random vectors (the storage is
    // symmetric by construction; this measures floating-point noise)
    double symmetry_defect(uint64_t seed = 7) const;

private:
    GridSpec grid_;
    int nx_ = 0, ny_ = 1;
    Vec diag_;   // (sum of incident conductances) / mass
    Vec wx_;     // x-edge couplings c / sqrt(m_i m_j), (nx-1) * ny
    Vec wy_;     // y-edge couplings, nx * (ny-1)
    Vec ground_; // sqrt(mass), normalized
    double upper_ = 0.0;
};

GridOperator assemble(const Potential& p, const GridSpec& grid);

struct Lambda1Result {
    double lambda1 = 0.0;
    double residual = 0.0;   // ||K y - lambda1 y||, ||y|| = 1
    size_t matvecs = 0;
    double min_ritz = 0.0;   // smallest Ritz value seen (non-negativity check)
};

// Second-smallest eigenvalue of -L (the spectral gap): thick-restart
// Lanczos with full reorthogonalization against the retained basis and
// the deflated ground vector, Chebyshev-filter accelerated. Converged
// when the Ritz residual on the original operator drops below res_tol.
Lambda1Result lambda1(const GridOperator& op, double res_tol = 1e-8,
                      size_t max_matvecs = 400000);

// Default FD box: per-axis V - min V >= 46 through the minimizer
// (no inflation; FD grids should not extend deep into zero-density
// regions).
Box fd_default_box(const Potential& p);

} // namespace specgap

#endif
