#include "specgap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace specgap {

double SymMat::max_asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            m = std::max(m, std::fabs((*this)(i, j) - (*this)(j, i)));
    return m;
}

double SymMat::quad_form(std::span<const double> u) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_; ++j) row += (*this)(i, j) * u[j];
        s += u[i] * row;
    }
    return s;
}

double smallest_eigenvalue_2x2(double a, double b, double c) {
    const double half_tr = 0.5 * (a + c);
    const double half_diff = 0.5 * (a - c);
    return half_tr - std::hypot(half_diff, b);
}

namespace {

// Cyclic Jacobi sweeps; matrix is destroyed in place. When rot != nullptr
// the rotations are accumulated so rot columns become the eigenvectors.
void jacobi_diagonalize(SymMat& m, SymMat* rot = nullptr) {
    const int n = m.size();
    if (rot) {
        rot->resize(n);
        for (int i = 0; i < n; ++i) (*rot)(i, i) = 1.0;
    }
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (std::sqrt(2.0 * off) < 1e-12) return;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double theta = 0.5 * (m(q, q) - m(p, p)) / apq;
                double t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                if (theta < 0.0) t = -t;
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * cs;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = cs * mkp - sn * mkq;
                    m(k, q) = sn * mkp + cs * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = cs * mpk - sn * mqk;
                    m(q, k) = sn * mpk + cs * mqk;
                }
                if (rot) {
                    for (int k = 0; k < n; ++k) {
                        const double rkp = (*rot)(k, p), rkq = (*rot)(k, q);
                        (*rot)(k, p) = cs * rkp - sn * rkq;
                        (*rot)(k, q) = sn * rkp + cs * rkq;
                    }
                }
            }
        }
    }
}

} // namespace

Vec sym_eigenvalues(const SymMat& m) {
    const int n = m.size();
    Vec ev(n);
    if (n == 1) {
        ev[0] = m(0, 0);
        return ev;
    }
    if (n == 2) {
        const double half_tr = 0.5 * (m(0, 0) + m(1, 1));
        const double rad = std::hypot(0.5 * (m(0, 0) - m(1, 1)), m(0, 1));
        ev[0] = half_tr - rad;
        ev[1] = half_tr + rad;
        return ev;
    }
    SymMat work = m;
    jacobi_diagonalize(work);
    for (int i = 0; i < n; ++i) ev[i] = work(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

double smallest_eigenvalue(const SymMat& m) {
    if (m.size() == 1) return m(0, 0);
    if (m.size() == 2) return smallest_eigenvalue_2x2(m(0, 0), m(0, 1), m(1, 1));
    return sym_eigenvalues(m).front();
}

void sym_eigen(const SymMat& m, Vec& evals, std::vector<Vec>& evecs) {
    const int n = m.size();
    SymMat work = m;
    SymMat rot(n);
    jacobi_diagonalize(work, &rot);

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return work(a, a) < work(b, b); });

    evals.resize(n);
    evecs.assign(n, Vec(n));
    for (int k = 0; k < n; ++k) {
        evals[k] = work(order[k], order[k]);
        for (int i = 0; i < n; ++i) evecs[k][i] = rot(i, order[k]);
    }
}

bool spd_solve(const SymMat& a, std::span<const double> b, std::span<double> x,
               double pivot_floor) {
    const int n = a.size();
    // L stored densely; n <= 3 in practice.
    SymMat l(n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > pivot_floor)) return false;
        const double lj = std::sqrt(d);
        l(j, j) = lj;
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / lj;
        }
    }
    // forward then backward substitution
    Vec y(n);
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return true;
}

double operator_norm(std::span<const double> m, int n) {
    // largest eigenvalue of M^T M
    SymMat mtm(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += m[static_cast<size_t>(k) * n + i] * m[static_cast<size_t>(k) * n + j];
            mtm.set(i, j, s);
        }
    }
    const Vec ev = sym_eigenvalues(mtm);
    return std::sqrt(std::max(0.0, ev.back()));
}

double pairwise_sum(std::span<const double> v) {
    const size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

} // namespace specgap
