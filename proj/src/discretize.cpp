#include "specgap/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specgap/errors.hpp"
#include "specgap/rng.hpp"

namespace specgap {

GridOperator::GridOperator(const Potential& p, const GridSpec& grid) : grid_(grid) {
    const int d = grid.dim();
    if (d < 1 || d > 2)
        throw DimensionTooLarge("assemble: finite-difference operator supports d in {1, 2}");
    if (p.dim != d) throw ParameterOutOfRange("assemble: potential dimension mismatch");
    for (int c : grid.counts)
        if (c < 8) throw ParameterOutOfRange("assemble: need at least 8 nodes per axis");

    nx_ = grid.counts[0];
    ny_ = d == 2 ? grid.counts[1] : 1;
    const double hx = grid.spacing(0);
    const double hy = d == 2 ? grid.spacing(1) : 1.0;
    const size_t n = static_cast<size_t>(nx_) * ny_;

    auto xat = [&](int i) { return grid.box[0].first + i * hx; };
    auto yat = [&](int j) { return d == 2 ? grid.box[1].first + j * hy : 0.0; };
    auto vat = [&](double x, double y) {
        if (d == 1) {
            const double pt[1] = {x};
            return p.value(std::span<const double>(pt, 1));
        }
        const double pt[2] = {x, y};
        return p.value(std::span<const double>(pt, 2));
    };

    // node masses: e^{-V} times the cell volume (half cells at boundaries)
    Vec mass(n);
    for (int j = 0; j < ny_; ++j) {
        const double wy = (d == 2 && (j == 0 || j == ny_ - 1)) ? 0.5 * hy : hy;
        for (int i = 0; i < nx_; ++i) {
            const double wx = (i == 0 || i == nx_ - 1) ? 0.5 * hx : hx;
            const double m = std::exp(-vat(xat(i), yat(j))) * wx * wy;
            if (!(m > 0.0))
                throw MassNotCaptured("assemble: node mass underflowed to zero; "
                                      "shrink the box");
            mass[static_cast<size_t>(j) * nx_ + i] = m;
        }
    }

    // edge conductances from the density at edge midpoints
    wx_.assign(static_cast<size_t>(nx_ - 1) * ny_, 0.0);
    diag_.assign(n, 0.0);
    Vec cond_sum(n, 0.0);
    for (int j = 0; j < ny_; ++j) {
        const double wy = (d == 2 && (j == 0 || j == ny_ - 1)) ? 0.5 * hy : hy;
        for (int i = 0; i + 1 < nx_; ++i) {
            const double c = std::exp(-vat(xat(i) + 0.5 * hx, yat(j))) * wy / hx;
            const size_t a = static_cast<size_t>(j) * nx_ + i;
            const size_t b = a + 1;
            wx_[static_cast<size_t>(j) * (nx_ - 1) + i] = c / std::sqrt(mass[a] * mass[b]);
            cond_sum[a] += c;
            cond_sum[b] += c;
        }
    }
    if (d == 2) {
        wy_.assign(static_cast<size_t>(nx_) * (ny_ - 1), 0.0);
        for (int j = 0; j + 1 < ny_; ++j) {
            for (int i = 0; i < nx_; ++i) {
                const double wx = (i == 0 || i == nx_ - 1) ? 0.5 * hx : hx;
                const double c = std::exp(-vat(xat(i), yat(j) + 0.5 * hy)) * wx / hy;
                const size_t a = static_cast<size_t>(j) * nx_ + i;
                const size_t b = a + nx_;
                wy_[static_cast<size_t>(j) * nx_ + i] = c / std::sqrt(mass[a] * mass[b]);
                cond_sum[a] += c;
                cond_sum[b] += c;
            }
        }
    }
    for (size_t i = 0; i < n; ++i) diag_[i] = cond_sum[i] / mass[i];

    ground_.resize(n);
    for (size_t i = 0; i < n; ++i) ground_[i] = std::sqrt(mass[i]);
    double norm = std::sqrt(pairwise_sum([&] {
        Vec sq(n);
        for (size_t i = 0; i < n; ++i) sq[i] = ground_[i] * ground_[i];
        return sq;
    }()));
    for (double& g : ground_) g /= norm;

    // Gershgorin row sums
    Vec row_abs(diag_);
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i + 1 < nx_; ++i) {
            const double w = wx_[static_cast<size_t>(j) * (nx_ - 1) + i];
            row_abs[static_cast<size_t>(j) * nx_ + i] += w;
            row_abs[static_cast<size_t>(j) * nx_ + i + 1] += w;
        }
    if (d == 2)
        for (int j = 0; j + 1 < ny_; ++j)
            for (int i = 0; i < nx_; ++i) {
                const double w = wy_[static_cast<size_t>(j) * nx_ + i];
                row_abs[static_cast<size_t>(j) * nx_ + i] += w;
                row_abs[static_cast<size_t>(j + 1) * nx_ + i] += w;
            }
    upper_ = *std::max_element(row_abs.begin(), row_abs.end());
}

void GridOperator::apply(std::span<const double> x, std::span<double> y) const {
    const size_t n = size();
    for (size_t i = 0; i < n; ++i) y[i] = diag_[i] * x[i];
    for (int j = 0; j < ny_; ++j) {
        const size_t row = static_cast<size_t>(j) * nx_;
        const size_t erow = static_cast<size_t>(j) * (nx_ - 1);
        for (int i = 0; i + 1 < nx_; ++i) {
            const double w = wx_[erow + i];
            y[row + i] -= w * x[row + i + 1];
            y[row + i + 1] -= w * x[row + i];
        }
    }
    if (ny_ > 1) {
        for (int j = 0; j + 1 < ny_; ++j) {
            const size_t row = static_cast<size_t>(j) * nx_;
            for (int i = 0; i < nx_; ++i) {
                const double w = wy_[row + i];
                y[row + i] -= w * x[row + nx_ + i];
                y[row + nx_ + i] -= w * x[row + i];
            }
        }
    }
}

double GridOperator::symmetry_defect(uint64_t seed) const {
    const size_t n = size();
    CounterRng rng(seed, 0);
    Vec a(n), b(n), ka(n), kb(n);
    double worst = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
        double na = 0.0, nb = 0.0;
        for (size_t i = 0; i < n; ++i) {
            a[i] = rng.next_normal();
            b[i] = rng.next_normal();
            na += a[i] * a[i];
            nb += b[i] * b[i];
        }
        na = std::sqrt(na);
        nb = std::sqrt(nb);
        for (size_t i = 0; i < n; ++i) {
            a[i] /= na;
            b[i] /= nb;
        }
        apply(a, ka);
        apply(b, kb);
        double s1 = 0.0, s2 = 0.0;
        for (size_t i = 0; i < n; ++i) {
            s1 += ka[i] * b[i];
            s2 += a[i] * kb[i];
        }
        worst = std::max(worst, std::fabs(s1 - s2) / std::max(1.0, upper_));
    }
    return worst;
}

GridOperator assemble(const Potential& p, const GridSpec& grid) {
    return GridOperator(p, grid);
}

namespace {

struct Filter {
    double lo = 0.0;  // window start: spectrum in [lo, hi] is damped
    double hi = 1.0;
    int degree = 1;   // 1 = plain affine map (probe mode)
};

// out = T_q(u(K)) v with u(K) = ((lo + hi) I - 2 K) / (hi - lo)
void apply_filtered(const GridOperator& op, const Filter& f, const Vec& v, Vec& out,
                    Vec& t0, Vec& t1, Vec& kv, size_t& matvecs) {
    const size_t n = op.size();
    const double c1 = (f.lo + f.hi) / (f.hi - f.lo);
    const double c2 = -2.0 / (f.hi - f.lo);

    auto mapped = [&](const Vec& in, Vec& res) {
        op.apply(in, kv);
        ++matvecs;
        for (size_t i = 0; i < n; ++i) res[i] = c1 * in[i] + c2 * kv[i];
    };

    if (f.degree <= 1) {
        mapped(v, out);
        return;
    }
    t0 = v;
    mapped(v, t1);
    for (int k = 2; k <= f.degree; ++k) {
        mapped(t1, out);
        for (size_t i = 0; i < n; ++i) out[i] = 2.0 * out[i] - t0[i];
        std::swap(t0, t1);
        std::swap(t1, out);
    }
    out = t1;
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const Vec& x, Vec& y) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

struct Candidate {
    double theta = 0.0;    // Rayleigh quotient on the original operator
    double residual = 0.0; // ||K y - theta y||
    Vec y;
};

} // namespace

Lambda1Result lambda1(const GridOperator& op, double res_tol, size_t max_matvecs) {
    const size_t n = op.size();
    if (n < 4) throw ParameterOutOfRange("lambda1: grid too small");
    const Vec& g = op.ground();
    const double b_up = op.spectral_upper_bound() * 1.0000001;

    size_t matvecs = 0;
    double min_ritz = std::numeric_limits<double>::infinity();

    const int basis_max = static_cast<int>(std::min<size_t>(n - 1, 44));
    const int keep = std::min(12, basis_max / 3);
    const int n_check = 3;

    std::vector<Vec> basis;
    SymMat t(basis_max);

    Vec w(n), kv(n), t0(n), t1(n), tmp(n);

    CounterRng rng(0xd15c7e71ULL, 0);
    auto random_start = [&](Vec& v) {
        v.resize(n);
        for (size_t i = 0; i < n; ++i) v[i] = rng.next_normal();
        axpy(-dot(g, v), g, v);
        const double nv = norm2(v);
        for (double& x : v) x /= nv;
    };

    // Rayleigh quotient + residual on the original operator
    auto assess = [&](Candidate& c) {
        op.apply(c.y, tmp);
        ++matvecs;
        c.theta = dot(c.y, tmp);
        double r = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double d = tmp[i] - c.theta * c.y[i];
            r += d * d;
        }
        c.residual = std::sqrt(r);
        min_ritz = std::min(min_ritz, c.theta);
    };

    Filter filter{0.0, b_up, 1};
    Vec seed_vec;
    random_start(seed_vec);
    bool probing = true;
    double prev_best_residual = std::numeric_limits<double>::infinity();
    Candidate best;

    while (matvecs < max_matvecs) {
        int start_col;
        if (basis.empty()) {
            t.fill(0.0);
            basis.push_back(seed_vec);
            start_col = 0;
        } else {
            start_col = static_cast<int>(basis.size()) - 1;
        }

        // grow the basis; every T entry is a measured coefficient, so the
        // projected matrix stays faithful across restarts
        bool breakdown = false;
        Vec residual_dir;
        for (int j = start_col; j < basis_max && matvecs < max_matvecs; ++j) {
            apply_filtered(op, filter, basis[j], w, t0, t1, kv, matvecs);
            axpy(-dot(g, w), g, w);
            for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                const double h = dot(basis[i], w);
                axpy(-h, basis[i], w);
                if (i <= j) {
                    t(i, j) = h;
                    t(j, i) = h;
                }
            }
            axpy(-dot(g, w), g, w);
            for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
                const double h = dot(basis[i], w);
                axpy(-h, basis[i], w);
                if (i <= j) {
                    t(i, j) += h;
                    if (i != j) t(j, i) += h;
                }
            }
            const double beta = norm2(w);
            if (beta < 1e-12) {
                breakdown = true;
                break;
            }
            for (double& x : w) x /= beta;
            if (j + 1 < basis_max)
                basis.push_back(w);
            else
                residual_dir = w;
        }

        // Rayleigh-Ritz on the filtered operator
        const int m = static_cast<int>(basis.size());
        SymMat tm(m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) tm(a, b) = t(a, b);
        Vec evals;
        std::vector<Vec> evecs;
        sym_eigen(tm, evals, evecs);

        // largest filtered Ritz values correspond to the low end of K
        const int n_cand = std::min(m, std::max(keep, n_check));
        std::vector<Candidate> cands(n_cand);
        for (int k = 0; k < n_cand; ++k) {
            const Vec& s = evecs[m - 1 - k];
            cands[k].y.assign(n, 0.0);
            for (int i = 0; i < m; ++i) axpy(s[i], basis[i], cands[k].y);
            const double ny = norm2(cands[k].y);
            for (double& x : cands[k].y) x /= ny;
        }
        const int checked = std::min<int>(n_check, n_cand);
        for (int k = 0; k < checked; ++k) assess(cands[k]);
        std::sort(cands.begin(), cands.begin() + checked,
                  [](const Candidate& a, const Candidate& b) { return a.theta < b.theta; });
        const Candidate& lowest = cands.front();
        if (best.y.empty() || lowest.residual < best.residual) best = lowest;

        if (best.residual < res_tol) {
            Lambda1Result r;
            r.lambda1 = best.theta;
            r.residual = best.residual;
            r.matvecs = matvecs;
            r.min_ritz = min_ritz;
            return r;
        }

        if (probing) {
            // window from the probe Ritz values; the probe map is affine,
            // lambda = (lo + hi - (hi - lo) u) / 2
            Vec orig(m);
            for (int k = 0; k < m; ++k)
                orig[k] = 0.5 * ((filter.lo + filter.hi) -
                                 (filter.hi - filter.lo) * evals[m - 1 - k]);
            const int idx = std::min<int>(5, m - 1);
            double cut = std::max(orig[idx], orig[0] + 1e-3 * (b_up - orig[0]));
            cut = std::min(cut, 0.5 * b_up);
            filter = Filter{cut, b_up, 100};
            probing = false;
            seed_vec = lowest.y;
            basis.clear();
            prev_best_residual = lowest.residual;
            continue;
        }

        const bool stagnant = !(lowest.residual < 0.7 * prev_best_residual);
        prev_best_residual = std::min(prev_best_residual, lowest.residual);
        if (breakdown || residual_dir.empty()) {
            // invariant subspace or budget cut: restart from a perturbed
            // best estimate
            random_start(seed_vec);
            axpy(3.0, best.y, seed_vec);
            axpy(-dot(g, seed_vec), g, seed_vec);
            const double nv = norm2(seed_vec);
            for (double& x : seed_vec) x /= nv;
            basis.clear();
            continue;
        }
        if (stagnant) {
            if (filter.degree < 1024) filter.degree *= 2;
            seed_vec = best.y;
            basis.clear();
            continue;
        }

        // thick restart: kept Ritz block is diagonal in T; couplings to the
        // continuation vector are measured when its column is processed
        const int l = std::min<int>(keep, m - 1);
        std::vector<Vec> new_basis;
        t.fill(0.0);
        for (int k = 0; k < l; ++k) {
            const Vec& s = evecs[m - 1 - k];
            Vec y(n, 0.0);
            for (int i = 0; i < m; ++i) axpy(s[i], basis[i], y);
            t(k, k) = evals[m - 1 - k];
            new_basis.push_back(std::move(y));
        }
        Vec v = residual_dir;
        axpy(-dot(g, v), g, v);
        for (const Vec& u : new_basis) axpy(-dot(u, v), u, v);
        const double nv = norm2(v);
        basis = std::move(new_basis);
        if (nv < 1e-12) {
            seed_vec = best.y;
            basis.clear();
            continue;
        }
        for (double& x : v) x /= nv;
        basis.push_back(v);
    }

    throw NoConvergence("lambda1: no convergence within the matvec budget; residual " +
                            std::to_string(best.residual),
                        best.residual);
}

Box fd_default_box(const Potential& p) { return confining_box(p, 46.0, 1.0); }

} // namespace specgap
