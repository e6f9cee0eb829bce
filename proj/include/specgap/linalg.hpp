#ifndef SPECGAP_LINALG_HPP
#define SPECGAP_LINALG_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace specgap {

using Vec = std::vector<double>;

// Dense symmetric matrix, full row-major storage. Sizes here are the
// state-space dimension d (tiny), not grid sizes.
class SymMat {
public:
    SymMat() = default;
    explicit SymMat(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {}

    int size() const { return n_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    // Assigns a(i,j) = a(j,i) = v.
    void set(int i, int j, double v) {
        (*this)(i, j) = v;
        (*this)(j, i) = v;
    }

    void resize(int n) {
        n_ = n;
        a_.assign(static_cast<size_t>(n) * n, 0.0);
    }

    void fill(double v) { std::fill(a_.begin(), a_.end(), v); }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_asymmetry() const;

    // u^T A u
    double quad_form(std::span<const double> u) const;

    const double* data() const { return a_.data(); }
    double* data() { return a_.data(); }

private:
    int n_ = 0;
    std::vector<double> a_;
};

// Eigenvalues of a symmetric matrix in ascending order.
// d = 1, 2 use closed forms; d >= 3 uses cyclic Jacobi rotations with
// off-diagonal Frobenius norm < 1e-12 stopping.
Vec sym_eigenvalues(const SymMat& m);

// Smallest eigenvalue only (same dispatch as sym_eigenvalues).
double smallest_eigenvalue(const SymMat& m);

// Full symmetric eigendecomposition via Jacobi rotations with accumulated
// eigenvectors; ascending order. evecs[k] is the eigenvector of evals[k].
void sym_eigen(const SymMat& m, Vec& evals, std::vector<Vec>& evecs);

// Smallest eigenvalue of ((a, b), (b, c)).
double smallest_eigenvalue_2x2(double a, double b, double c);

// Solves A x = b for symmetric positive-definite A via Cholesky.
// Returns false if a pivot drops below `pivot_floor`.
bool spd_solve(const SymMat& a, std::span<const double> b, std::span<double> x,
               double pivot_floor = 0.0);

// Euclidean operator norm (largest singular value) of a general square
// matrix stored row-major.
double operator_norm(std::span<const double> m, int n);

// 1D golden-section minimization of f on [lo, hi]; returns arg min.
// x_tol is the bracketing tolerance on the argument.
template <typename F>
double golden_section_min(F&& f, double lo, double hi, double x_tol) {
    constexpr double invphi = 0.6180339887498948;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > x_tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

template <typename F>
double golden_section_max(F&& f, double lo, double hi, double x_tol) {
    return golden_section_min([&](double x) { return -f(x); }, lo, hi, x_tol);
}

// Pairwise (tree) sum: deterministic reduction order independent of any
// batching of the producers.
double pairwise_sum(std::span<const double> v);

} // namespace specgap

#endif
