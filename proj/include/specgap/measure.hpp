#ifndef SPECGAP_MEASURE_HPP
#define SPECGAP_MEASURE_HPP

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "specgap/linalg.hpp"
#include "specgap/potential.hpp"

namespace specgap {

using Interval = std::pair<double, double>;
using Box = std::vector<Interval>;

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, Vec& nodes, Vec& weights);

// Per-axis box from the minimizer of V: solve V - min V >= level along
// each axis, then inflate the reach by the given factor.
Box confining_box(const Potential& p, double level, double inflate);

// Quadrature default: level 46 (e^{-46} ~ 1e-20 of peak density),
// inflation 1.5.
Box auto_box(const Potential& p);

// Minimizer of V (multi-start damped Newton with gradient fallback).
Vec minimize_potential(const Potential& p);

// Normalized representation of mu ~ e^{-V} on a truncated box as
// quadrature nodes and probability weights.
class Measure {
public:
    const Potential& potential() const { return potential_; }
    const Box& box() const { return box_; }
    const std::vector<int>& resolution() const { return resolution_; }
    double log_norm() const { return log_norm_; }
    bool monte_carlo() const { return monte_carlo_; }

    size_t node_count() const { return weights_.size(); }
    int dim() const { return potential_.dim; }

    std::span<const double> node(size_t i) const {
        return {coords_.data() + i * static_cast<size_t>(dim()), static_cast<size_t>(dim())};
    }
    double weight(size_t i) const { return weights_[i]; }

    // integral of f against the normalized measure (pairwise summation)
    double integrate(const std::function<double(std::span<const double>)>& f) const;

    friend Measure build_measure(const Potential&, const std::vector<int>&, const Box*);
    friend Measure build_measure_mc(const Potential&, size_t, uint64_t);

private:
    Potential potential_;
    Box box_;
    std::vector<int> resolution_;
    Vec coords_;  // node_count x dim, row-major
    Vec weights_; // normalized: sums to 1
    double log_norm_ = 0.0;
    bool monte_carlo_ = false;
};

// Tensor Gauss-Legendre measure; box auto-selected when absent.
// Requires resolution >= 16 per axis and d <= 3.
Measure build_measure(const Potential& p, const std::vector<int>& resolution,
                      const Box* box = nullptr);

// Self-normalized importance sampler for d > 3 exploration. Lower
// accuracy than quadrature; never used on certified paths.
Measure build_measure_mc(const Potential& p, size_t n_samples, uint64_t seed);

double variance(const Measure& m, const std::function<double(std::span<const double>)>& f);

double covariance(const Measure& m, const std::function<double(std::span<const double>)>& f,
                  const std::function<double(std::span<const double>)>& g);

using GradFn = std::function<void(std::span<const double>, std::span<double>)>;
using KernelFn = std::function<void(std::span<const double>, SymMat&)>;

struct EnergyResult {
    double value = 0.0;
    double excluded_mass = 0.0;
    size_t excluded_nodes = 0;
};

enum class KernelPolicy {
    Strict,            // any node below rho_floor raises KernelSingular
    ExcludeBelowFloor, // skip such nodes, track the excluded mass
};

inline constexpr double kRhoFloor = 1e-8;

// Quadrature of (grad f)^T kernel(x)^{-1} grad f. The kernel must be
// symmetric positive definite with smallest eigenvalue above rho_floor at
// every node (subject to the policy).
EnergyResult energy_detail(const Measure& m, const GradFn& grad_f, const KernelFn& kernel,
                           KernelPolicy policy = KernelPolicy::Strict,
                           double rho_floor = kRhoFloor);

double energy(const Measure& m, const GradFn& grad_f, const KernelFn& kernel);

} // namespace specgap

#endif
