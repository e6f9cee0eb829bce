#include "specgap/sde.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "specgap/errors.hpp"
#include "specgap/rng.hpp"

namespace specgap {

size_t PathConfig::n_steps() const {
    return static_cast<size_t>(std::llround(t_final / dt));
}

void PathConfig::validate() const {
    if (!(dt > 0.0)) throw ParameterOutOfRange("PathConfig: dt must be positive");
    if (!(t_final >= 0.0)) throw ParameterOutOfRange("PathConfig: t_final must be >= 0");
    if (n_paths < 1) throw ParameterOutOfRange("PathConfig: need at least one path");
    const double k = t_final / dt;
    if (std::fabs(k - std::llround(k)) > 1e-12 * std::max(1.0, k))
        throw ParameterOutOfRange("PathConfig: t_final/dt must be integral");
}

namespace {

void require_simulable(const Potential& p, const Weight& w, const PathConfig& cfg) {
    if (w.kind == Weight::Kind::Diagonal)
        throw ParameterOutOfRange("sde: the stochastic representation is only available "
                                  "for scalar weights");
    const bool bound_ok = w.is_identity ? p.hessian_bound_valid : w.va_bound_valid;
    if (!bound_ok && !cfg.allow_lyapunov_override)
        throw NonExplosionUnverified(
            "sde: Hessian lower bound of the simulated potential is unavailable; pass the "
            "Lyapunov acknowledgment to simulate anyway");
}

constexpr double kDivergenceRadiusSq = 1e12; // |X| > 1e6

struct Stepper {
    const Potential& p;
    const Weight& w;
    int d;
    double dt;
    double sqrt_2dt;
    Vec grad_v;
    Vec grad_w;

    Stepper(const Potential& p_, const Weight& w_, double dt_)
        : p(p_), w(w_), d(p_.dim), dt(dt_), sqrt_2dt(std::sqrt(2.0 * dt_)), grad_v(d),
          grad_w(d) {}

    // x <- x + drift dt + sqrt(2 dt) xi, drift = -grad V + 2 grad W
    void step(std::span<double> x, std::span<const double> xi) {
        p.gradient(x, grad_v);
        if (w.is_identity) {
            for (int i = 0; i < d; ++i) x[i] += -grad_v[i] * dt + sqrt_2dt * xi[i];
        } else {
            w.field(0).gradient(x, grad_w);
            for (int i = 0; i < d; ++i)
                x[i] += (-grad_v[i] + 2.0 * grad_w[i]) * dt + sqrt_2dt * xi[i];
        }
        double r2 = 0.0;
        for (int i = 0; i < d; ++i) r2 += x[i] * x[i];
        if (r2 > kDivergenceRadiusSq)
            throw PathDiverged("sde: |X| exceeded 1e6");
    }
};

// mean and standard error per coordinate over per-path samples
// (n_paths x width), pairwise reduction in path order
FKEstimate reduce(const Vec& samples, size_t n_paths, int width, const PathConfig& cfg) {
    FKEstimate est;
    est.n_paths = n_paths;
    est.config = cfg;
    est.mean.resize(width);
    est.std_error.resize(width);
    Vec buf(n_paths);
    for (int c = 0; c < width; ++c) {
        for (size_t i = 0; i < n_paths; ++i) buf[i] = samples[i * width + c];
        bool constant = true;
        for (size_t i = 1; i < n_paths && constant; ++i) constant = (buf[i] == buf[0]);
        if (constant) {
            est.mean[c] = buf[0];
            est.std_error[c] = 0.0;
            continue;
        }
        const double mean = pairwise_sum(buf) / static_cast<double>(n_paths);
        est.mean[c] = mean;
        if (n_paths < 2) {
            est.std_error[c] = 0.0;
            continue;
        }
        for (size_t i = 0; i < n_paths; ++i) {
            const double dev = samples[i * width + c] - mean;
            buf[i] = dev * dev;
        }
        const double var = pairwise_sum(buf) / static_cast<double>(n_paths - 1);
        est.std_error[c] = std::sqrt(var / static_cast<double>(n_paths));
    }
    return est;
}

} // namespace

PathEnsemble simulate_paths(const Potential& p, const Weight& w, const Vec& x0,
                            const PathConfig& cfg) {
    cfg.validate();
    require_simulable(p, w, cfg);
    const int d = p.dim;
    const size_t n_steps = cfg.n_steps();

    PathEnsemble ens;
    ens.dim = d;
    ens.n_paths = cfg.n_paths;
    ens.terminal.resize(cfg.n_paths * d);

    Stepper stepper(p, w, cfg.dt);
    Vec x(d), xi(d);
    for (size_t path = 0; path < cfg.n_paths; ++path) {
        CounterRng rng(cfg.seed, path);
        x.assign(x0.begin(), x0.end());
        for (size_t k = 0; k < n_steps; ++k) {
            for (int i = 0; i < d; ++i) xi[i] = rng.next_normal();
            stepper.step(x, xi);
        }
        std::copy(x.begin(), x.end(), ens.terminal.begin() + path * d);
    }
    return ens;
}

SinglePath simulate_single_path(const Potential& p, const Weight& w, const Vec& x0,
                                const PathConfig& cfg, uint64_t path_index) {
    cfg.validate();
    require_simulable(p, w, cfg);
    const int d = p.dim;
    const size_t n_steps = cfg.n_steps();

    SinglePath path;
    path.dim = d;
    path.n_states = n_steps + 1;
    path.states.resize(path.n_states * d);

    Stepper stepper(p, w, cfg.dt);
    Vec x(x0), xi(d);
    std::copy(x.begin(), x.end(), path.states.begin());
    CounterRng rng(cfg.seed, path_index);
    for (size_t k = 0; k < n_steps; ++k) {
        for (int i = 0; i < d; ++i) xi[i] = rng.next_normal();
        stepper.step(x, xi);
        std::copy(x.begin(), x.end(), path.states.begin() + (k + 1) * d);
    }
    return path;
}

namespace {

// y <- y * (I - dt m + dt^2 m^2 / 2), all row-major d x d
void y_multiply_step(Vec& y, const SymMat& m, double dt, int d, Vec& factor, Vec& out) {
    // factor = I - dt m + dt^2/2 m^2
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            double m2 = 0.0;
            for (int k = 0; k < d; ++k) m2 += m(i, k) * m(k, j);
            double f = -dt * m(i, j) + 0.5 * dt * dt * m2;
            if (i == j) f += 1.0;
            factor[static_cast<size_t>(i) * d + j] = f;
        }
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k)
                s += y[static_cast<size_t>(i) * d + k] * factor[static_cast<size_t>(k) * d + j];
            out[static_cast<size_t>(i) * d + j] = s;
        }
    std::swap(y, out);
}

} // namespace

YEvolution evolve_Y(const MField& m, const SinglePath& path, const PathConfig& cfg) {
    const int d = path.dim;
    YEvolution ev;
    ev.y_final.assign(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) ev.y_final[static_cast<size_t>(i) * d + i] = 1.0;

    SymMat field(d);
    Vec factor(static_cast<size_t>(d) * d), out(static_cast<size_t>(d) * d);
    const size_t n_steps = path.n_states - 1;
    for (size_t k = 0; k < n_steps; ++k) {
        const auto x = path.state(k);
        m.eval(x, field);
        ev.rho_integral += cfg.dt * smallest_eigenvalue(field);
        ev.max_m_opnorm = std::max(ev.max_m_opnorm, operator_norm(
            std::span<const double>(field.data(), static_cast<size_t>(d) * d), d));
        y_multiply_step(ev.y_final, field, cfg.dt, d, factor, out);
    }
    ev.y_opnorm = operator_norm(ev.y_final, d);
    return ev;
}

FKEstimate fk_vector_estimate(const Potential& p, const Weight& w, const GradFn& grad_f,
                              const Vec& x0, const PathConfig& cfg) {
    cfg.validate();
    require_simulable(p, w, cfg);
    const int d = p.dim;
    const size_t n_steps = cfg.n_steps();
    const MField field(p, w, MFieldMode::Auto);

    Vec samples(cfg.n_paths * d);
    Stepper stepper(p, w, cfg.dt);
    SymMat m(d);
    Vec x(d), xi(d), g(d), y(static_cast<size_t>(d) * d);
    Vec factor(static_cast<size_t>(d) * d), out(static_cast<size_t>(d) * d);

    for (size_t path = 0; path < cfg.n_paths; ++path) {
        CounterRng rng(cfg.seed, path);
        x.assign(x0.begin(), x0.end());
        std::fill(y.begin(), y.end(), 0.0);
        for (int i = 0; i < d; ++i) y[static_cast<size_t>(i) * d + i] = 1.0;

        for (size_t k = 0; k < n_steps; ++k) {
            field.eval(x, m);
            y_multiply_step(y, m, cfg.dt, d, factor, out);
            for (int i = 0; i < d; ++i) xi[i] = rng.next_normal();
            stepper.step(x, xi);
        }
        grad_f(x, g);
        const double ax = w.a(0, x);
        for (int i = 0; i < d; ++i) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += y[static_cast<size_t>(i) * d + k] * g[k];
            samples[path * d + i] = ax * s;
        }
    }
    return reduce(samples, cfg.n_paths, d, cfg);
}

FKEstimate crn_gradient_estimate(const Potential& p, const ScalarFn& f, const Vec& x0,
                                 double h, const PathConfig& cfg) {
    cfg.validate();
    const Weight id = identity_weight(p.dim);
    require_simulable(p, id, cfg);
    if (!(h >= 1e-4 && h <= 1e-2))
        throw ParameterOutOfRange("crn_gradient_estimate: bump h must lie in [1e-4, 1e-2]");
    const int d = p.dim;
    const size_t n_steps = cfg.n_steps();

    // 2d bumped starts share every Brownian increment
    Vec samples(cfg.n_paths * d);
    Stepper stepper(p, id, cfg.dt);
    Vec xi(d);
    Vec states(static_cast<size_t>(2 * d) * d);
    for (size_t path = 0; path < cfg.n_paths; ++path) {
        CounterRng rng(cfg.seed, path);
        for (int c = 0; c < d; ++c) {
            for (int i = 0; i < d; ++i) {
                states[static_cast<size_t>(2 * c) * d + i] = x0[i] + (i == c ? h : 0.0);
                states[static_cast<size_t>(2 * c + 1) * d + i] = x0[i] - (i == c ? h : 0.0);
            }
        }
        for (size_t k = 0; k < n_steps; ++k) {
            for (int i = 0; i < d; ++i) xi[i] = rng.next_normal();
            for (int s = 0; s < 2 * d; ++s)
                stepper.step(std::span<double>(states.data() + static_cast<size_t>(s) * d,
                                               static_cast<size_t>(d)),
                             xi);
        }
        for (int c = 0; c < d; ++c) {
            const double fp = f(std::span<const double>(
                states.data() + static_cast<size_t>(2 * c) * d, static_cast<size_t>(d)));
            const double fm = f(std::span<const double>(
                states.data() + static_cast<size_t>(2 * c + 1) * d, static_cast<size_t>(d)));
            samples[path * d + c] = (fp - fm) / (2.0 * h);
        }
    }
    return reduce(samples, cfg.n_paths, d, cfg);
}

FKEstimate fk_scalar_estimate(const Potential& p, const Weight& w, const ScalarFn& rho,
                              const ScalarFn& g, const Vec& x0, const PathConfig& cfg) {
    cfg.validate();
    require_simulable(p, w, cfg);
    const int d = p.dim;
    const size_t n_steps = cfg.n_steps();

    Vec samples(cfg.n_paths);
    Stepper stepper(p, w, cfg.dt);
    Vec x(d), xi(d);
    for (size_t path = 0; path < cfg.n_paths; ++path) {
        CounterRng rng(cfg.seed, path);
        x.assign(x0.begin(), x0.end());
        double exponent = 0.0;
        double rho_prev = rho(x);
        for (size_t k = 0; k < n_steps; ++k) {
            for (int i = 0; i < d; ++i) xi[i] = rng.next_normal();
            stepper.step(x, xi);
            const double rho_cur = rho(x);
            exponent += 0.5 * cfg.dt * (rho_prev + rho_cur);
            rho_prev = rho_cur;
        }
        samples[path] = g(x) * std::exp(-exponent);
    }
    return reduce(samples, cfg.n_paths, 1, cfg);
}

} // namespace specgap
