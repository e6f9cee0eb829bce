#include "specgap/measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "specgap/errors.hpp"
#include "specgap/rng.hpp"

namespace specgap {

void gauss_legendre(int n, Vec& nodes, Vec& weights) {
    nodes.resize(n);
    weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

namespace {

void map_to_interval(const Vec& ref_nodes, const Vec& ref_weights, double lo, double hi,
                     Vec& nodes, Vec& weights) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const size_t n = ref_nodes.size();
    nodes.resize(n);
    weights.resize(n);
    for (size_t i = 0; i < n; ++i) {
        nodes[i] = mid + half * ref_nodes[i];
        weights[i] = half * ref_weights[i];
    }
}

double descend(const Potential& p, Vec& x) {
    const int d = p.dim;
    Vec g(d), step(d);
    SymMat h(d);
    double fx = p.value(x);
    for (int it = 0; it < 200; ++it) {
        p.gradient(x, g);
        double gn = 0.0;
        for (double v : g) gn += v * v;
        gn = std::sqrt(gn);
        if (gn < 1e-12) break;

        bool have_newton = false;
        try {
            p.hessian(x, h);
            Vec rhs(g);
            for (double& v : rhs) v = -v;
            have_newton = spd_solve(h, rhs, step, 1e-12);
        } catch (const SingularPoint&) {
            have_newton = false;
        }
        if (!have_newton)
            for (int i = 0; i < d; ++i) step[i] = -g[i] / std::max(1.0, gn);

        // backtracking line search
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            Vec xt(x);
            for (int i = 0; i < d; ++i) xt[i] += t * step[i];
            const double ft = p.value(xt);
            if (ft < fx - 1e-14 * std::fabs(fx)) {
                x = xt;
                fx = ft;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    return fx;
}

} // namespace

Vec minimize_potential(const Potential& p) {
    const int d = p.dim;
    std::vector<Vec> starts;
    starts.emplace_back(d, 0.0);
    for (int i = 0; i < d; ++i) {
        Vec s(d, 0.0);
        s[i] = 0.7;
        starts.push_back(s);
        s[i] = -0.7;
        starts.push_back(s);
    }
    starts.emplace_back(d, 0.7);
    starts.emplace_back(d, -0.7);

    Vec best;
    double best_f = std::numeric_limits<double>::infinity();
    for (Vec s : starts) {
        const double f = descend(p, s);
        if (f < best_f) {
            best_f = f;
            best = s;
        }
    }
    return best;
}

Box confining_box(const Potential& p, double level, double inflate) {
    const Vec xmin = minimize_potential(p);
    const double vmin = p.value(xmin);
    const int d = p.dim;
    Box box(d);
    Vec probe(xmin);
    for (int i = 0; i < d; ++i) {
        for (int sign : {+1, -1}) {
            double t = 1.0;
            double reached = -1.0;
            while (t <= 1.048576e6) {
                probe = xmin;
                probe[i] += sign * t;
                if (p.value(probe) - vmin >= level) {
                    reached = t;
                    break;
                }
                t *= 2.0;
            }
            if (reached < 0.0)
                throw MassNotCaptured("auto_box: potential does not confine along axis " +
                                      std::to_string(i));
            // bisect to the crossing
            double lo = reached * 0.5, hi = reached;
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (lo + hi);
                probe = xmin;
                probe[i] += sign * mid;
                (p.value(probe) - vmin >= level ? hi : lo) = mid;
            }
            if (sign > 0)
                box[i].second = xmin[i] + inflate * hi;
            else
                box[i].first = xmin[i] - inflate * hi;
        }
    }
    return box;
}

Box auto_box(const Potential& p) { return confining_box(p, 46.0, 1.5); }

namespace {

// unnormalized mass of e^{-V} over a tensor cell, fixed 32-node rule
double cell_mass(const Potential& p, const Box& cell) {
    const int d = p.dim;
    static thread_local Vec ref_n, ref_w;
    if (ref_n.size() != 32) gauss_legendre(32, ref_n, ref_w);
    std::vector<Vec> axis_n(d), axis_w(d);
    for (int i = 0; i < d; ++i)
        map_to_interval(ref_n, ref_w, cell[i].first, cell[i].second, axis_n[i], axis_w[i]);

    size_t total = 1;
    for (int i = 0; i < d; ++i) total *= 32;
    Vec x(d);
    double mass = 0.0;
    for (size_t idx = 0; idx < total; ++idx) {
        size_t rem = idx;
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
            const size_t k = rem % 32;
            rem /= 32;
            x[i] = axis_n[i][k];
            w *= axis_w[i][k];
        }
        mass += w * std::exp(-p.value(x));
    }
    return mass;
}

// mass of e^{-V} in (1.25 * box) \ box, via the 3^d - 1 frame cells
double shell_mass(const Potential& p, const Box& box) {
    const int d = p.dim;
    std::vector<std::array<Interval, 3>> segs(d);
    for (int i = 0; i < d; ++i) {
        const double c = 0.5 * (box[i].first + box[i].second);
        const double h = 0.5 * (box[i].second - box[i].first);
        segs[i] = {Interval{c - 1.25 * h, c - h}, Interval{c - h, c + h},
                   Interval{c + h, c + 1.25 * h}};
    }
    size_t total = 1;
    for (int i = 0; i < d; ++i) total *= 3;
    double mass = 0.0;
    for (size_t idx = 0; idx < total; ++idx) {
        size_t rem = idx;
        bool all_mid = true;
        Box cell(d);
        for (int i = 0; i < d; ++i) {
            const size_t k = rem % 3;
            rem /= 3;
            if (k != 1) all_mid = false;
            cell[i] = segs[i][k];
        }
        if (all_mid) continue;
        mass += cell_mass(p, cell);
    }
    return mass;
}

} // namespace

Measure build_measure(const Potential& p, const std::vector<int>& resolution, const Box* box) {
    const int d = p.dim;
    if (d > 3)
        throw DimensionTooLarge("build_measure: tensor quadrature supports d <= 3; "
                                "use build_measure_mc for exploration");
    if (resolution.size() != static_cast<size_t>(d) && resolution.size() != 1)
        throw ParameterOutOfRange("build_measure: resolution must have 1 or d entries");
    std::vector<int> res(d);
    for (int i = 0; i < d; ++i) {
        res[i] = resolution.size() == 1 ? resolution[0] : resolution[i];
        if (res[i] < 16)
            throw ParameterOutOfRange("build_measure: resolution must be >= 16 per axis");
    }

    Measure m;
    m.potential_ = p;
    m.box_ = box ? *box : auto_box(p);
    m.resolution_ = res;
    for (int i = 0; i < d; ++i)
        if (!(m.box_[i].first < m.box_[i].second))
            throw ParameterOutOfRange("build_measure: empty box interval");

    std::vector<Vec> axis_n(d), axis_w(d);
    for (int i = 0; i < d; ++i) {
        Vec rn, rw;
        gauss_legendre(res[i], rn, rw);
        map_to_interval(rn, rw, m.box_[i].first, m.box_[i].second, axis_n[i], axis_w[i]);
    }

    size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<size_t>(res[i]);
    m.coords_.resize(total * d);
    m.weights_.resize(total);

    Vec x(d);
    for (size_t idx = 0; idx < total; ++idx) {
        size_t rem = idx;
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
            const size_t k = rem % static_cast<size_t>(res[i]);
            rem /= static_cast<size_t>(res[i]);
            x[i] = axis_n[i][k];
            w *= axis_w[i][k];
        }
        std::copy(x.begin(), x.end(), m.coords_.begin() + idx * d);
        m.weights_[idx] = w * std::exp(-p.value(x));
    }
    const double z = pairwise_sum(m.weights_);
    if (!(z > 0.0) || !std::isfinite(z))
        throw MassNotCaptured("build_measure: normalization integral is not positive");
    m.log_norm_ = std::log(z);
    for (double& w : m.weights_) w /= z;

    const double shell = shell_mass(p, m.box_) / z;
    if (shell >= 1e-10)
        throw MassNotCaptured("build_measure: box fails the 25% inflation test, relative "
                              "escaped mass " +
                              std::to_string(shell));
    return m;
}

Measure build_measure_mc(const Potential& p, size_t n_samples, uint64_t seed) {
    const int d = p.dim;
    if (n_samples < 100)
        throw ParameterOutOfRange("build_measure_mc: need at least 100 samples");

    // Laplace proposal at the minimizer; inflate the covariance slightly
    const Vec center = minimize_potential(p);
    SymMat h(d);
    bool have_h = true;
    try {
        p.hessian(center, h);
    } catch (const SingularPoint&) {
        have_h = false;
    }
    if (have_h && smallest_eigenvalue(h) <= 1e-10) have_h = false;

    Measure m;
    m.potential_ = p;
    m.monte_carlo_ = true;
    m.coords_.resize(n_samples * d);
    m.weights_.resize(n_samples);

    CounterRng rng(seed, 0);
    Vec z(d), x(d);
    const double scale = 1.3;
    for (size_t s = 0; s < n_samples; ++s) {
        for (int i = 0; i < d; ++i) z[i] = rng.next_normal();
        double log_q = 0.0;
        if (have_h) {
            // x = center + scale * H^{-1/2}-ish step: solve via Cholesky of H
            Vec step(d);
            spd_solve(h, z, step, 0.0);
            // use H^{-1} z scaled; proposal density only needs to be
            // evaluable, not optimal
            double qn = 0.0;
            for (int i = 0; i < d; ++i) {
                x[i] = center[i] + scale * step[i];
                qn += z[i] * z[i];
            }
            log_q = -0.5 * qn;
        } else {
            double qn = 0.0;
            for (int i = 0; i < d; ++i) {
                x[i] = center[i] + scale * z[i];
                qn += z[i] * z[i];
            }
            log_q = -0.5 * qn;
        }
        std::copy(x.begin(), x.end(), m.coords_.begin() + s * d);
        m.weights_[s] = std::exp(-p.value(x) - log_q);
    }
    const double z_sum = pairwise_sum(m.weights_);
    if (!(z_sum > 0.0))
        throw MassNotCaptured("build_measure_mc: zero importance mass");
    for (double& w : m.weights_) w /= z_sum;
    m.log_norm_ = std::log(z_sum) - std::log(static_cast<double>(n_samples));
    return m;
}

double Measure::integrate(const std::function<double(std::span<const double>)>& f) const {
    static thread_local Vec terms;
    terms.resize(weights_.size());
    for (size_t i = 0; i < weights_.size(); ++i) terms[i] = weights_[i] * f(node(i));
    return pairwise_sum(terms);
}

double variance(const Measure& m, const std::function<double(std::span<const double>)>& f) {
    const double mean = m.integrate(f);
    return m.integrate([&](std::span<const double> x) {
        const double v = f(x) - mean;
        return v * v;
    });
}

double covariance(const Measure& m, const std::function<double(std::span<const double>)>& f,
                  const std::function<double(std::span<const double>)>& g) {
    const double mf = m.integrate(f);
    const double mg = m.integrate(g);
    return m.integrate([&](std::span<const double> x) { return (f(x) - mf) * (g(x) - mg); });
}

EnergyResult energy_detail(const Measure& m, const GradFn& grad_f, const KernelFn& kernel,
                           KernelPolicy policy, double rho_floor) {
    const int d = m.dim();
    EnergyResult res;
    static thread_local Vec terms;
    terms.assign(m.node_count(), 0.0);

    Vec g(d), solved(d);
    SymMat ker(d);
    std::string offenders;
    size_t n_bad = 0;
    for (size_t i = 0; i < m.node_count(); ++i) {
        const auto x = m.node(i);
        kernel(x, ker);
        const bool ok = smallest_eigenvalue(ker) > rho_floor;
        if (!ok) {
            ++n_bad;
            res.excluded_mass += m.weight(i);
            if (policy == KernelPolicy::Strict && n_bad <= 8) {
                offenders += " node " + std::to_string(i);
            }
            continue;
        }
        grad_f(x, g);
        spd_solve(ker, g, solved, 0.0);
        double q = 0.0;
        for (int k = 0; k < d; ++k) q += g[k] * solved[k];
        terms[i] = m.weight(i) * q;
    }
    if (n_bad > 0 && policy == KernelPolicy::Strict)
        throw KernelSingular("energy: kernel smallest eigenvalue <= rho_floor at " +
                             std::to_string(n_bad) + " node(s):" + offenders);
    res.excluded_nodes = n_bad;
    res.value = pairwise_sum(terms);
    return res;
}

double energy(const Measure& m, const GradFn& grad_f, const KernelFn& kernel) {
    return energy_detail(m, grad_f, kernel).value;
}

} // namespace specgap
