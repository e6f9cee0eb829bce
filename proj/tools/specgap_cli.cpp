#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "specgap/bounds.hpp"
#include "specgap/config.hpp"
#include "specgap/discretize.hpp"
#include "specgap/errors.hpp"
#include "specgap/inequalities.hpp"
#include "specgap/sde.hpp"

using nlohmann::json;

namespace specgap {
namespace {

json box_to_json(const Box& box) {
    json arr = json::array();
    for (const auto& [lo, hi] : box) arr.push_back({lo, hi});
    return arr;
}

json grid_to_json(const GridSpec& g) {
    return json{{"box", box_to_json(g.box)}, {"counts", g.counts}};
}

json bound_report_to_json(const BoundReport& r) {
    const char* kind = r.kind == BoundReport::Kind::InfRho     ? "inf_rho"
                       : r.kind == BoundReport::Kind::Integrated ? "integrated"
                                                                 : "closed_form";
    json j{{"kind", kind},
           {"value", r.value},
           {"potential", r.potential_name},
           {"weight", r.weight_name},
           {"parameters", r.parameters}};
    if (!r.grid.counts.empty()) {
        j["grid"] = grid_to_json(r.grid);
        j["min_node"] = r.min_node;
        j["min_rho"] = r.min_rho;
        j["excluded_nodes"] = r.excluded_nodes;
    }
    return j;
}

json margin_to_json(const MarginReport& m) {
    json j{{"inequality", m.inequality}, {"function", m.function_name},
           {"lhs", m.lhs},               {"rhs", m.rhs},
           {"margin", m.margin},         {"tolerance", m.tolerance},
           {"pass", m.pass}};
    if (m.excluded_mass > 0.0) j["excluded_mass"] = m.excluded_mass;
    if (!m.note.empty()) j["note"] = m.note;
    return j;
}

void write_output(const RunConfig& cfg, const json& payload) {
    std::string text;
    if (cfg.format == "csv" && payload.is_array()) {
        // CSV projection: flatten each row's scalar fields
        std::set<std::string> cols;
        for (const auto& row : payload)
            for (auto it = row.begin(); it != row.end(); ++it)
                if (it->is_primitive()) cols.insert(it.key());
        std::string head;
        for (const auto& c : cols) head += (head.empty() ? "" : ",") + c;
        text = head + "\n";
        for (const auto& row : payload) {
            std::string line;
            for (const auto& c : cols) {
                if (!line.empty()) line += ",";
                if (row.contains(c)) line += row.at(c).dump();
            }
            text += line + "\n";
        }
    } else {
        text = payload.dump(2) + "\n";
    }
    if (cfg.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.out_path);
    if (!out) throw Error("cannot open output file " + cfg.out_path);
    out << text;
    // wall-clock metadata lives in a sidecar so reports stay byte-stable
    std::ofstream meta(cfg.out_path + ".meta.json");
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    meta << json{{"unix_time",
                  std::chrono::duration_cast<std::chrono::seconds>(now).count()}}
                .dump()
         << "\n";
}

const TestFunction& find_function(const std::vector<TestFunction>& fam,
                                  const std::string& name) {
    for (const auto& f : fam)
        if (f.name == name) return f;
    throw ConfigInvalid("unknown test function '" + name + "'");
}

int run_bound(const RunConfig& cfg) {
    const Potential p = build_potential(cfg);
    const Box box = cfg.box ? *cfg.box : default_box(p);
    const GridSpec grid = make_grid(box, cfg.grid_per_axis);

    BoundReport rep;
    if (cfg.bound_kind == "closed_form") {
        if (p.name == "coupled_quartic") {
            rep = quartic_bound(p.params.at("beta"), &grid);
        } else if (p.name == "gen_cauchy") {
            rep = cauchy_closed_form(p.params.at("beta"), p.dim);
        } else {
            const double alpha = p.name == "gaussian" ? 2.0 : p.params.at("alpha");
            const SubbotinConstants c = subbotin_closed_form(alpha, p.dim);
            rep.kind = BoundReport::Kind::ClosedForm;
            rep.value = c.prefactor;
            rep.parameters["gamma"] = c.gamma;
            rep.parameters["epsilon_star"] = c.epsilon_star;
            rep.potential_name = p.name;
            rep.weight_name = "epsilon";
        }
    } else if (cfg.optimize) {
        rep = optimize_epsilon(p, grid, cfg.eps_lo, cfg.eps_hi);
    } else if (cfg.bound_kind == "integrated") {
        const Weight w = build_weight(cfg, p);
        const MField m = m_field(p, w);
        const std::vector<int> res = cfg.resolution.empty() ? default_resolution(p)
                                                            : cfg.resolution;
        const Measure mu = build_measure(p, res, &box);
        double a_s, b_s;
        if (cfg.alpha_s && cfg.beta_s) {
            a_s = *cfg.alpha_s;
            b_s = *cfg.beta_s;
        } else {
            // derive candidate bounds from the grid, then let the op
            // spot-check them
            a_s = std::numeric_limits<double>::infinity();
            b_s = 0.0;
            Vec x;
            SymMat s(p.dim);
            for (size_t i = 0; i < grid.node_count(); ++i) {
                grid.node(i, x);
                metric_S(w, x, s);
                for (int k = 0; k < p.dim; ++k) {
                    a_s = std::min(a_s, s(k, k));
                    b_s = std::max(b_s, s(k, k));
                }
            }
        }
        rep = integrated_bound(m, mu, a_s, b_s);
    } else {
        const Weight w = build_weight(cfg, p);
        const MField m = m_field(p, w);
        rep = inf_rho_bound(m, grid, cfg.seed);
    }
    write_output(cfg, bound_report_to_json(rep));
    return 0;
}

int run_verify(const RunConfig& cfg) {
    const Potential p = build_potential(cfg);
    const Weight w = build_weight(cfg, p);
    const MField m = m_field(p, w);
    const Box box = cfg.box ? *cfg.box : default_box(p);
    const std::vector<int> res = cfg.resolution.empty() ? default_resolution(p)
                                                        : cfg.resolution;
    const Measure mu = build_measure(p, res, &box);
    std::vector<TestFunction> fam = default_test_family(p);
    if (cfg.family != "default")
        fam = {find_function(fam, cfg.family)};

    std::vector<MarginReport> reports;
    const bool all = cfg.inequality == "all";
    for (const auto& f : fam) {
        if (all || cfg.inequality == "gbl")
            reports.push_back(check_generalized_bl(mu, m, f));
        if (all || cfg.inequality == "cbl")
            reports.push_back(check_classical_bl(mu, p, f));
        if ((all || cfg.inequality == "gamma2") && f.laplacian)
            reports.push_back(check_gamma2(mu, m, f));
        if (cfg.inequality == "poincare") {
            if (!cfg.lambda_cand)
                throw ConfigInvalid("poincare verification needs bound.lambda");
            reports.push_back(check_poincare(mu, *cfg.lambda_cand, f));
        }
        if (all || cfg.inequality == "abl")
            for (const auto& g : fam)
                reports.push_back(check_asymmetric_bl(mu, m, f, g));
    }

    json arr = json::array();
    bool ok = true;
    for (const auto& r : reports) {
        arr.push_back(margin_to_json(r));
        ok = ok && r.pass;
    }
    write_output(cfg, arr);
    return ok ? 0 : 1;
}

int run_gap(const RunConfig& cfg) {
    const Potential p = build_potential(cfg);
    const Box box = cfg.box ? *cfg.box : fd_default_box(p);
    std::vector<int> res = cfg.resolution.empty() ? std::vector<int>{401} : cfg.resolution;
    GridSpec grid;
    grid.box = box;
    grid.counts.assign(box.size(), res.size() == 1 ? res[0] : 0);
    if (res.size() == box.size()) grid.counts = res;

    const GridOperator op = assemble(p, grid);
    const Lambda1Result r = lambda1(op);
    write_output(cfg, json{{"lambda1", r.lambda1},
                           {"residual", r.residual},
                           {"n", grid.counts},
                           {"box", box_to_json(box)},
                           {"matvecs", r.matvecs}});
    return 0;
}

int run_simulate(const RunConfig& cfg) {
    const Potential p = build_potential(cfg);
    const Weight w = build_weight(cfg, p);
    const MField m = m_field(p, w);

    PathConfig pc;
    pc.t_final = cfg.t;
    pc.dt = cfg.dt;
    pc.n_paths = cfg.paths;
    pc.seed = cfg.seed;
    pc.allow_lyapunov_override = cfg.lyapunov_ok;

    Vec x0 = cfg.x0;
    if (x0.empty()) x0.assign(p.dim, 0.0);
    if (static_cast<int>(x0.size()) != p.dim) throw ConfigInvalid("x0 has wrong dimension");

    const std::vector<TestFunction> fam = default_test_family(p);
    const TestFunction& f = find_function(fam, cfg.f_name);

    const FKEstimate fk = fk_vector_estimate(p, w, f.grad, x0, pc);
    const FKEstimate crn = crn_gradient_estimate(p, f.f, x0, cfg.crn_h, pc);

    // sub-intertwining: |fk| <= FK scalar estimate of |a grad f|
    const FKEstimate scalar = fk_scalar_estimate(
        p, w, [&](std::span<const double> x) { return m.rho(x); },
        [&](std::span<const double> x) {
            static thread_local Vec g;
            g.resize(p.dim);
            f.grad(x, g);
            double n2 = 0.0;
            for (int i = 0; i < p.dim; ++i) n2 += g[i] * g[i];
            return w.a(0, x) * std::sqrt(n2);
        },
        x0, pc);

    double fk_norm = 0.0, fk_se = 0.0;
    for (int i = 0; i < p.dim; ++i) {
        fk_norm += fk.mean[i] * fk.mean[i];
        fk_se += fk.std_error[i] * fk.std_error[i];
    }
    fk_norm = std::sqrt(fk_norm);
    fk_se = std::sqrt(fk_se);

    write_output(cfg, json{{"fk", {{"mean", fk.mean}, {"se", fk.std_error}}},
                           {"crn", {{"mean", crn.mean}, {"se", crn.std_error}}},
                           {"a_x0", w.a(0, x0)},
                           {"sub_intertwining",
                            {{"lhs", fk_norm},
                             {"rhs", scalar.mean[0]},
                             {"se", std::sqrt(fk_se * fk_se +
                                              scalar.std_error[0] * scalar.std_error[0])}}}});
    return 0;
}

int run_report(const RunConfig& cfg) {
    // aggregate bound/gap JSON outputs into one CSV table
    struct Row {
        std::string potential, weight, kind;
        double value = std::nan("");
        double lambda1 = std::nan("");
    };
    std::vector<Row> rows;
    std::map<std::string, double> gaps; // potential -> lambda1
    std::vector<json> docs;
    for (const auto& path : cfg.inputs) {
        std::ifstream in(path);
        if (!in) throw ConfigInvalid("cannot read input " + path);
        json j;
        in >> j;
        docs.push_back(j);
    }
    for (const auto& j : docs)
        if (j.contains("lambda1") && j.contains("box"))
            gaps["?"] = j.at("lambda1").get<double>();
    for (const auto& j : docs) {
        if (j.contains("value") && j.contains("potential")) {
            Row r;
            r.potential = j.at("potential").get<std::string>();
            r.weight = j.value("weight", "");
            r.kind = j.value("kind", "");
            r.value = j.at("value").get<double>();
            if (gaps.count("?")) r.lambda1 = gaps.at("?");
            rows.push_back(r);
        }
    }
    std::string text = "potential,weight,kind,certified_bound,fd_lambda1\n";
    for (const auto& r : rows) {
        text += r.potential + "," + r.weight + "," + r.kind + "," +
                json(r.value).dump() + ",";
        if (!std::isnan(r.lambda1)) text += json(r.lambda1).dump();
        text += "\n";
    }
    if (cfg.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(cfg.out_path);
        out << text;
    }
    return 0;
}

int dispatch(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.command == "bound") return run_bound(cfg);
    if (cfg.command == "verify") return run_verify(cfg);
    if (cfg.command == "gap") return run_gap(cfg);
    if (cfg.command == "simulate") return run_simulate(cfg);
    return run_report(cfg);
}

} // namespace
} // namespace specgap

int main(int argc, char** argv) {
    using namespace specgap;

    CLI::App app{"spectral-gap certification for diffusion operators"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    double alpha_flag = std::nan(""), beta_flag = std::nan("");
    std::vector<double> box_flat;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--potential", cfg.potential_name, "gaussian|subbotin|gen_cauchy|coupled_quartic");
        sub->add_option("--dim", cfg.dim, "state dimension");
        sub->add_option("--alpha", alpha_flag, "subbotin exponent");
        sub->add_option("--beta", beta_flag, "cauchy/quartic parameter");
        sub->add_option("--weight", cfg.weight_kind, "identity|epsilon|scalar_expr|diagonal_quartic_Z");
        sub->add_option("--epsilon", cfg.epsilon, "epsilon weight parameter");
        sub->add_option("--expr", cfg.expr, "W expression for scalar_expr weights");
        sub->add_option("--resolution", cfg.resolution, "quadrature/grid nodes per axis");
        sub->add_option("--box", box_flat, "box as lo hi per axis");
        sub->add_option("--grid", cfg.grid_per_axis, "evidence grid nodes per axis");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--out", cfg.out_path, "output file (stdout when absent)");
        sub->add_option("--format", cfg.format, "json|csv");
        sub->add_option("--config", config_path, "JSON config file (overrides flags)");
    };

    CLI::App* bound = app.add_subcommand("bound", "certified spectral-gap lower bounds");
    add_common(bound);
    bound->add_option("--kind", cfg.bound_kind, "inf_rho|integrated|closed_form");
    bound->add_flag("--optimize", cfg.optimize, "optimize over the epsilon family");
    bound->add_option("--eps-lo", cfg.eps_lo, "epsilon search lower end");
    bound->add_option("--eps-hi", cfg.eps_hi, "epsilon search upper end");
    double as_flag = std::nan(""), bs_flag = std::nan("");
    bound->add_option("--alpha-s", as_flag, "uniform lower bound on S");
    bound->add_option("--beta-s", bs_flag, "uniform upper bound on S");

    CLI::App* verify = app.add_subcommand("verify", "inequality verification suite");
    add_common(verify);
    verify->add_option("--inequality", cfg.inequality, "gbl|cbl|abl|poincare|gamma2|all");
    verify->add_option("--family", cfg.family, "default or a single function name");
    double lambda_flag = std::nan("");
    verify->add_option("--lambda", lambda_flag, "Poincare candidate constant");

    CLI::App* gap = app.add_subcommand("gap", "finite-difference reference spectral gap");
    add_common(gap);

    CLI::App* simulate = app.add_subcommand("simulate", "intertwining Monte Carlo checks");
    add_common(simulate);
    simulate->add_option("--f", cfg.f_name, "test function name");
    simulate->add_option("--x0", cfg.x0, "start point");
    simulate->add_option("--t", cfg.t, "time horizon");
    simulate->add_option("--dt", cfg.dt, "Euler step");
    simulate->add_option("--paths", cfg.paths, "number of paths");
    simulate->add_option("--bump", cfg.crn_h, "CRN bump size");
    simulate->add_flag("--lyapunov-ok", cfg.lyapunov_ok,
                       "acknowledge non-explosion via a Lyapunov condition");

    CLI::App* report = app.add_subcommand("report", "aggregate JSON reports into CSV");
    report->add_option("inputs", cfg.inputs, "report files");
    report->add_option("--out", cfg.out_path, "output file");
    report->add_option("--config", config_path, "JSON config file (overrides flags)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        if (!std::isnan(alpha_flag)) cfg.alpha = alpha_flag;
        if (!std::isnan(beta_flag)) cfg.beta = beta_flag;
        if (!std::isnan(as_flag)) cfg.alpha_s = as_flag;
        if (!std::isnan(bs_flag)) cfg.beta_s = bs_flag;
        if (!std::isnan(lambda_flag)) cfg.lambda_cand = lambda_flag;
        if (!box_flat.empty()) {
            if (box_flat.size() % 2 != 0) throw ConfigInvalid("--box needs lo hi pairs");
            Box b;
            for (size_t i = 0; i + 1 < box_flat.size(); i += 2)
                b.emplace_back(box_flat[i], box_flat[i + 1]);
            cfg.box = b;
        }
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigInvalid("cannot read config file " + config_path);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw ConfigInvalid(std::string("config parse error: ") + e.what());
            }
            apply_json_config(cfg, j);
        }
        return dispatch(cfg);
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
