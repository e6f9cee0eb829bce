#ifndef SPECGAP_BOUNDS_HPP
#define SPECGAP_BOUNDS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "specgap/measure.hpp"
#include "specgap/weights.hpp"

namespace specgap {

// Uniform evidence grid, endpoints included.
struct GridSpec {
    Box box;
    std::vector<int> counts;

    size_t node_count() const {
        size_t n = 1;
        for (int c : counts) n *= static_cast<size_t>(c);
        return n;
    }
    int dim() const { return static_cast<int>(counts.size()); }
    void node(size_t flat_index, Vec& out) const;
    double spacing(int axis) const {
        return (box[axis].second - box[axis].first) / (counts[axis] - 1);
    }
};

GridSpec make_grid(const Box& box, int per_axis);

struct BoundReport {
    enum class Kind { InfRho, Integrated, ClosedForm };

    Kind kind = Kind::InfRho;
    double value = 0.0; // certified constant (spectral gap or BL constant)
    GridSpec grid;      // evidence grid; empty for formula-only reports
    Vec min_node;       // minimizing node after refinement
    double min_rho = 0.0;
    size_t excluded_nodes = 0; // singular grid nodes skipped
    std::map<std::string, double> parameters;
    std::string potential_name;
    std::string weight_name;
};

// Infimum of the smallest-eigenvalue field over the evidence grid, with
// golden-section refinement along each axis from the minimizing node
// (3 rounds) and a 10^4-point random audit of the emitted value.
// Throws NonPositiveBound if the refined infimum is not positive and
// CertificateUnsound if the audit cannot be satisfied.
BoundReport inf_rho_bound(const MField& m, const GridSpec& grid,
                          uint64_t audit_seed = 0x5eedULL);

// Integrated lower bound 1 / ( int dmu/rho + (1 - alpha/beta)/inf rho ).
// alpha_S, beta_S are the caller's uniform bounds on the metric S,
// spot-checked on the quadrature nodes.
BoundReport integrated_bound(const MField& m, const Measure& mu, double alpha_S,
                             double beta_S);

struct SubbotinConstants {
    double epsilon_star; // root of eps^2 - (1+gamma) eps + 1 = 0 in (0, 1/gamma)
    double prefactor;    // 8 sqrt(gamma-1) / (sqrt(gamma-1) + sqrt(gamma+3))^3
    double gamma;
};

// Closed-form constants for the exponential-power family; gamma must be >= 2.
SubbotinConstants subbotin_closed_form(double alpha, int d);

// Weighted Brascamp-Lieb constant 2 (beta - d) for the generalized Cauchy
// family with kernel (1 + |x|^2) I; requires beta > d.
BoundReport cauchy_closed_form(double beta, int d);

// Golden-section search over epsilon maximizing the inf-rho bound of the
// e^{-eps V} weight; argument tolerance 1e-6. Falls back to an exhaustive
// grid when the epsilon profile is detected non-unimodal.
BoundReport optimize_epsilon(const Potential& p, const GridSpec& grid, double eps_lo,
                             double eps_hi);

// Two-coordinate quartic bound sqrt(3/2 - beta^2) - 1 - beta with the
// pointwise certificate X - beta >= value checked on the evidence grid.
BoundReport quartic_bound(double beta, const GridSpec* grid = nullptr);

} // namespace specgap

#endif
