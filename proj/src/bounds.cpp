#include "specgap/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "specgap/errors.hpp"
#include "specgap/rng.hpp"

namespace specgap {

void GridSpec::node(size_t flat_index, Vec& out) const {
    const int d = dim();
    out.resize(d);
    size_t rem = flat_index;
    for (int i = 0; i < d; ++i) {
        const size_t k = rem % static_cast<size_t>(counts[i]);
        rem /= static_cast<size_t>(counts[i]);
        out[i] = box[i].first + static_cast<double>(k) * spacing(i);
    }
}

GridSpec make_grid(const Box& box, int per_axis) {
    GridSpec g;
    g.box = box;
    g.counts.assign(box.size(), per_axis);
    return g;
}

namespace {

struct GridMin {
    double value = std::numeric_limits<double>::infinity();
    Vec arg;
    size_t excluded = 0;
};

GridMin grid_minimum(const MField& m, const GridSpec& grid) {
    GridMin r;
    Vec x;
    const size_t n = grid.node_count();
    for (size_t i = 0; i < n; ++i) {
        grid.node(i, x);
        double v;
        try {
            v = m.rho(x);
        } catch (const SingularPoint&) {
            ++r.excluded;
            continue;
        }
        if (v < r.value) {
            r.value = v;
            r.arg = x;
        }
    }
    if (r.arg.empty())
        throw SingularPoint("inf_rho_bound: every grid node was singular");
    if (r.excluded > n / 100)
        throw SingularPoint("inf_rho_bound: more than 1% of grid nodes are singular");
    return r;
}

// Coordinate golden-section descent from a starting point; bracket one
// grid cell on each side, clipped to the box. 3 rounds over all axes.
double refine_minimum(const MField& m, const GridSpec& grid, Vec& x, double value) {
    const int d = grid.dim();
    for (int round = 0; round < 3; ++round) {
        for (int axis = 0; axis < d; ++axis) {
            const double h = grid.spacing(axis);
            const double lo = std::max(grid.box[axis].first, x[axis] - h);
            const double hi = std::min(grid.box[axis].second, x[axis] + h);
            Vec probe(x);
            auto line = [&](double t) {
                probe[axis] = t;
                try {
                    return m.rho(probe);
                } catch (const SingularPoint&) {
                    return std::numeric_limits<double>::infinity();
                }
            };
            const double t = golden_section_min(line, lo, hi, 1e-9 * std::max(1.0, h));
            const double v = line(t);
            if (v < value) {
                value = v;
                x[axis] = t;
            }
        }
    }
    return value;
}

struct AuditResult {
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    Vec worst_point;
};

AuditResult audit_bound(const MField& m, const GridSpec& grid, double value,
                        uint64_t seed) {
    AuditResult res;
    CounterRng rng(seed, 0);
    const int d = grid.dim();
    Vec x(d);
    for (int i = 0; i < 10000; ++i) {
        for (int k = 0; k < d; ++k) {
            const double u = rng.next_uniform();
            x[k] = grid.box[k].first + u * (grid.box[k].second - grid.box[k].first);
        }
        double v;
        try {
            v = m.rho(x);
        } catch (const SingularPoint&) {
            continue;
        }
        if (v < res.worst) {
            res.worst = v;
            res.worst_point = x;
        }
    }
    res.ok = !(res.worst < value - 1e-9);
    return res;
}

// Shared core: grid infimum + refinement + audit. The audit may relocate
// the minimum once (a grid blind spot); a second failure aborts.
BoundReport inf_rho_core(const MField& m, const GridSpec& grid, uint64_t audit_seed) {
    GridMin gm = grid_minimum(m, grid);
    double value = refine_minimum(m, grid, gm.arg, gm.value);

    AuditResult audit = audit_bound(m, grid, value, audit_seed);
    if (!audit.ok) {
        Vec x = audit.worst_point;
        const double v = refine_minimum(m, grid, x, audit.worst);
        if (v < value) {
            value = v;
            gm.arg = x;
        }
        audit = audit_bound(m, grid, value, audit_seed + 1);
        if (!audit.ok)
            throw CertificateUnsound(
                "inf_rho_bound: random audit found rho below the certified value");
    }

    BoundReport rep;
    rep.kind = BoundReport::Kind::InfRho;
    rep.value = value;
    rep.grid = grid;
    rep.min_node = gm.arg;
    rep.min_rho = value;
    rep.excluded_nodes = gm.excluded;
    rep.potential_name = m.potential().name;
    rep.weight_name = m.weight().name;
    for (const auto& [k, v] : m.potential().params) rep.parameters[k] = v;
    for (const auto& [k, v] : m.weight().params) rep.parameters["weight_" + k] = v;
    return rep;
}

} // namespace

BoundReport inf_rho_bound(const MField& m, const GridSpec& grid, uint64_t audit_seed) {
    BoundReport rep = inf_rho_core(m, grid, audit_seed);
    if (!(rep.value > 0.0))
        throw NonPositiveBound("inf_rho_bound: refined infimum " +
                               std::to_string(rep.value) + " is not positive");
    return rep;
}

BoundReport integrated_bound(const MField& m, const Measure& mu, double alpha_S,
                             double beta_S) {
    if (!(alpha_S > 0.0 && alpha_S <= beta_S))
        throw ParameterOutOfRange("integrated_bound: need 0 < alpha_S <= beta_S");

    // spot-check the caller's uniform bounds on S at the quadrature nodes
    const int d = m.dim();
    SymMat s(d);
    const double slack = 1e-10 * beta_S;
    for (size_t i = 0; i < mu.node_count(); ++i) {
        metric_S(m.weight(), mu.node(i), s);
        for (int k = 0; k < d; ++k) {
            const double v = s(k, k);
            if (v < alpha_S - slack || v > beta_S + slack)
                throw BoundsUnverified("integrated_bound: S spot-check failed at node " +
                                       std::to_string(i));
        }
    }

    // infimum evidence: uniform grid over the measure box plus refinement
    const GridSpec grid = make_grid(mu.box(), 65);
    BoundReport ev = inf_rho_core(m, grid, 0x5eedULL);
    double inf_rho = ev.value;

    // quadrature of 1/rho; rho must be positive on the nodes
    static thread_local Vec terms;
    terms.assign(mu.node_count(), 0.0);
    for (size_t i = 0; i < mu.node_count(); ++i) {
        const double r = m.rho(mu.node(i));
        if (!(r > 0.0))
            throw NonPositiveBound("integrated_bound: rho not positive at node " +
                                   std::to_string(i));
        inf_rho = std::min(inf_rho, r);
        terms[i] = mu.weight(i) / r;
    }
    if (!(inf_rho > 0.0))
        throw NonPositiveBound("integrated_bound: infimum of rho is not positive");
    const double integral = pairwise_sum(terms);

    BoundReport rep;
    rep.kind = BoundReport::Kind::Integrated;
    rep.value = 1.0 / (integral + (1.0 - alpha_S / beta_S) / inf_rho);
    rep.grid = grid;
    rep.min_node = ev.min_node;
    rep.min_rho = inf_rho;
    rep.parameters["alpha_S"] = alpha_S;
    rep.parameters["beta_S"] = beta_S;
    rep.parameters["integral_inv_rho"] = integral;
    rep.potential_name = m.potential().name;
    rep.weight_name = m.weight().name;
    return rep;
}

SubbotinConstants subbotin_closed_form(double alpha, int d) {
    if (!(alpha > 1.0)) throw ParameterOutOfRange("subbotin_closed_form: alpha must be > 1");
    const double gamma = (alpha + d - 2.0) / std::min(1.0, alpha - 1.0);
    if (!(gamma >= 2.0))
        throw ParameterOutOfRange("subbotin_closed_form: gamma must be >= 2");
    SubbotinConstants c;
    c.gamma = gamma;
    c.epsilon_star = 0.5 * ((1.0 + gamma) - std::sqrt((1.0 + gamma) * (1.0 + gamma) - 4.0));
    const double sm = std::sqrt(gamma - 1.0);
    const double sp = std::sqrt(gamma + 3.0);
    c.prefactor = 8.0 * sm / ((sm + sp) * (sm + sp) * (sm + sp));
    return c;
}

BoundReport cauchy_closed_form(double beta, int d) {
    if (!(beta > static_cast<double>(d)))
        throw ParameterOutOfRange("cauchy_closed_form: beta must exceed d");
    BoundReport rep;
    rep.kind = BoundReport::Kind::ClosedForm;
    rep.value = 2.0 * (beta - d);
    rep.parameters["beta"] = beta;
    rep.parameters["d"] = d;
    rep.parameters["epsilon_star"] = 1.0 / beta;
    rep.potential_name = "gen_cauchy";
    rep.weight_name = "epsilon";
    return rep;
}

BoundReport optimize_epsilon(const Potential& p, const GridSpec& grid, double eps_lo,
                             double eps_hi) {
    if (!(0.0 < eps_lo && eps_lo < eps_hi && eps_hi < 0.5))
        throw ParameterOutOfRange("optimize_epsilon: range must lie inside (0, 1/2)");

    auto objective = [&](double eps) {
        const Weight w = make_epsilon_weight(p, eps);
        const MField m = m_field(p, w);
        GridMin gm = grid_minimum(m, grid);
        return refine_minimum(m, grid, gm.arg, gm.value);
    };

    // unimodality spot-check on a coarse epsilon grid
    const int n_spot = 17;
    Vec spot(n_spot);
    int best_spot = 0;
    for (int i = 0; i < n_spot; ++i) {
        const double eps = eps_lo + (eps_hi - eps_lo) * i / (n_spot - 1.0);
        spot[i] = objective(eps);
        if (spot[i] > spot[best_spot]) best_spot = i;
    }
    int n_local_max = 0;
    for (int i = 0; i < n_spot; ++i) {
        const bool up = (i == 0) || spot[i] >= spot[i - 1];
        const bool down = (i == n_spot - 1) || spot[i] >= spot[i + 1];
        if (up && down) ++n_local_max;
    }

    double eps_star;
    if (n_local_max <= 1) {
        eps_star = golden_section_max(objective, eps_lo, eps_hi, 1e-6);
    } else {
        // exhaustive fallback, then golden refinement around the best cell
        const int n_fine = 201;
        double best_v = -std::numeric_limits<double>::infinity();
        double best_e = eps_lo;
        for (int i = 0; i < n_fine; ++i) {
            const double eps = eps_lo + (eps_hi - eps_lo) * i / (n_fine - 1.0);
            const double v = objective(eps);
            if (v > best_v) {
                best_v = v;
                best_e = eps;
            }
        }
        const double cell = (eps_hi - eps_lo) / (n_fine - 1.0);
        eps_star = golden_section_max(objective, std::max(eps_lo, best_e - cell),
                                      std::min(eps_hi, best_e + cell), 1e-6);
    }

    const Weight w = make_epsilon_weight(p, eps_star);
    const MField m = m_field(p, w);
    BoundReport rep = inf_rho_core(m, grid, 0x5eedULL);
    if (!(rep.value > 0.0))
        throw NonPositiveBound("optimize_epsilon: no epsilon in range yields a positive "
                               "infimum (best " +
                               std::to_string(rep.value) + ")");
    rep.parameters["epsilon"] = eps_star;
    return rep;
}

BoundReport quartic_bound(double beta, const GridSpec* grid) {
    if (!(beta >= 0.0)) throw ParameterOutOfRange("quartic_bound: beta must be >= 0");
    const double disc = 1.5 - beta * beta;
    const double value = (disc > 0.0 ? std::sqrt(disc) : 0.0) - 1.0 - beta;
    if (!(disc > 0.0) || !(value > 0.0))
        throw ParameterOutOfRange("quartic_bound: sqrt(3/2 - beta^2) - 1 - beta is not "
                                  "positive at beta = " +
                                  std::to_string(beta));
    const double c = std::sqrt(disc);

    const Potential p = make_coupled_quartic(beta);
    const Weight w = make_quartic_z_weight(p, 0.25, c);
    const MField m = m_field(p, w);

    GridSpec g;
    if (grid) {
        g = *grid;
    } else {
        g = make_grid(auto_box(p), 401);
    }

    // pointwise certificate: X - beta >= value on the evidence grid,
    // X = 3x^2 - a_1 L a_1^{-1}
    double min_cert = std::numeric_limits<double>::infinity();
    Vec min_node;
    Vec x;
    SymMat field(2);
    for (size_t i = 0; i < g.node_count(); ++i) {
        g.node(i, x);
        m.eval(x, field);
        const double cert = field(0, 0) - beta;
        if (cert < min_cert) {
            min_cert = cert;
            min_node = x;
        }
    }
    if (min_cert < value - 1e-12)
        throw CertificateUnsound("quartic_bound: certificate X - beta fell below the "
                                 "closed-form value on the evidence grid");

    BoundReport rep;
    rep.kind = BoundReport::Kind::ClosedForm;
    rep.value = value;
    rep.grid = g;
    rep.min_node = min_node;
    rep.min_rho = min_cert;
    rep.parameters["beta"] = beta;
    rep.parameters["lambda"] = 0.5;
    rep.parameters["b"] = 0.25;
    rep.parameters["c"] = c;
    rep.potential_name = "coupled_quartic";
    rep.weight_name = "diagonal_quartic_Z";
    return rep;
}

} // namespace specgap
