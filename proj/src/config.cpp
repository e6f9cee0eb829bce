#include "specgap/config.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <set>

#include "specgap/errors.hpp"

namespace specgap {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigInvalid("unknown key '" + it.key() + "' in " + where);
}

double need_number(const nlohmann::json& j, const std::string& key, const std::string& where) {
    if (!j.at(key).is_number())
        throw ConfigInvalid("'" + key + "' in " + where + " must be a number");
    return j.at(key).get<double>();
}

} // namespace

void apply_json_config(RunConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigInvalid("config root must be an object");
    check_keys(j,
               {"command", "potential", "weight", "grid", "sde", "bound", "inequality",
                "family", "output", "seed", "inputs"},
               "config root");

    if (j.contains("command")) cfg.command = j.at("command").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    if (j.contains("inequality")) cfg.inequality = j.at("inequality").get<std::string>();
    if (j.contains("family")) cfg.family = j.at("family").get<std::string>();
    if (j.contains("inputs")) cfg.inputs = j.at("inputs").get<std::vector<std::string>>();

    if (j.contains("potential")) {
        const auto& p = j.at("potential");
        check_keys(p, {"name", "dim", "alpha", "beta"}, "potential block");
        if (p.contains("name")) cfg.potential_name = p.at("name").get<std::string>();
        if (p.contains("dim")) cfg.dim = p.at("dim").get<int>();
        if (p.contains("alpha")) cfg.alpha = need_number(p, "alpha", "potential block");
        if (p.contains("beta")) cfg.beta = need_number(p, "beta", "potential block");
    }
    if (j.contains("weight")) {
        const auto& w = j.at("weight");
        check_keys(w, {"kind", "epsilon", "b", "c", "expr"}, "weight block");
        if (w.contains("kind")) cfg.weight_kind = w.at("kind").get<std::string>();
        if (w.contains("epsilon")) cfg.epsilon = need_number(w, "epsilon", "weight block");
        if (w.contains("b")) cfg.z_b = need_number(w, "b", "weight block");
        if (w.contains("c")) cfg.z_c = need_number(w, "c", "weight block");
        if (w.contains("expr")) cfg.expr = w.at("expr").get<std::string>();
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        check_keys(g, {"resolution", "box", "grid_per_axis"}, "grid block");
        if (g.contains("resolution")) {
            cfg.resolution.clear();
            if (g.at("resolution").is_number())
                cfg.resolution.push_back(g.at("resolution").get<int>());
            else
                cfg.resolution = g.at("resolution").get<std::vector<int>>();
        }
        if (g.contains("box")) {
            Box box;
            for (const auto& iv : g.at("box")) {
                if (!iv.is_array() || iv.size() != 2)
                    throw ConfigInvalid("box entries must be [lo, hi] pairs");
                box.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
            }
            cfg.box = box;
        }
        if (g.contains("grid_per_axis")) cfg.grid_per_axis = g.at("grid_per_axis").get<int>();
    }
    if (j.contains("sde")) {
        const auto& s = j.at("sde");
        check_keys(s, {"t", "dt", "paths", "x0", "f", "h", "lyapunov_ok"}, "sde block");
        if (s.contains("t")) cfg.t = need_number(s, "t", "sde block");
        if (s.contains("dt")) cfg.dt = need_number(s, "dt", "sde block");
        if (s.contains("paths")) cfg.paths = s.at("paths").get<size_t>();
        if (s.contains("x0")) cfg.x0 = s.at("x0").get<Vec>();
        if (s.contains("f")) cfg.f_name = s.at("f").get<std::string>();
        if (s.contains("h")) cfg.crn_h = need_number(s, "h", "sde block");
        if (s.contains("lyapunov_ok")) cfg.lyapunov_ok = s.at("lyapunov_ok").get<bool>();
    }
    if (j.contains("bound")) {
        const auto& b = j.at("bound");
        check_keys(b, {"kind", "optimize", "eps_lo", "eps_hi", "alpha_s", "beta_s", "lambda"},
                   "bound block");
        if (b.contains("kind")) cfg.bound_kind = b.at("kind").get<std::string>();
        if (b.contains("optimize")) cfg.optimize = b.at("optimize").get<bool>();
        if (b.contains("eps_lo")) cfg.eps_lo = need_number(b, "eps_lo", "bound block");
        if (b.contains("eps_hi")) cfg.eps_hi = need_number(b, "eps_hi", "bound block");
        if (b.contains("alpha_s")) cfg.alpha_s = need_number(b, "alpha_s", "bound block");
        if (b.contains("beta_s")) cfg.beta_s = need_number(b, "beta_s", "bound block");
        if (b.contains("lambda")) cfg.lambda_cand = need_number(b, "lambda", "bound block");
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        check_keys(o, {"path", "format"}, "output block");
        if (o.contains("path")) cfg.out_path = o.at("path").get<std::string>();
        if (o.contains("format")) cfg.format = o.at("format").get<std::string>();
    }
}

void validate_config(const RunConfig& cfg) {
    const std::set<std::string> commands = {"bound", "verify", "gap", "simulate", "report"};
    if (!commands.count(cfg.command))
        throw ConfigInvalid("command must be one of bound|verify|gap|simulate|report");
    const std::set<std::string> potentials = {"gaussian", "subbotin", "gen_cauchy",
                                              "coupled_quartic"};
    if (cfg.command != "report" && !potentials.count(cfg.potential_name))
        throw ConfigInvalid("unknown potential '" + cfg.potential_name + "'");
    const std::set<std::string> weights = {"identity", "epsilon", "scalar_expr",
                                           "diagonal_quartic_Z"};
    if (!weights.count(cfg.weight_kind))
        throw ConfigInvalid("unknown weight kind '" + cfg.weight_kind + "'");
    if (cfg.format != "json" && cfg.format != "csv")
        throw ConfigInvalid("format must be json or csv");
    const std::set<std::string> inequalities = {"gbl", "cbl", "abl", "poincare", "gamma2",
                                                "all"};
    if (!inequalities.count(cfg.inequality))
        throw ConfigInvalid("unknown inequality '" + cfg.inequality + "'");
    const std::set<std::string> bound_kinds = {"inf_rho", "integrated", "closed_form"};
    if (!bound_kinds.count(cfg.bound_kind))
        throw ConfigInvalid("unknown bound kind '" + cfg.bound_kind + "'");
    if (cfg.dim < 1) throw ConfigInvalid("dim must be positive");
    if (cfg.command == "report" && cfg.inputs.empty())
        throw ConfigInvalid("report needs input files");
}

Potential build_potential(const RunConfig& cfg) {
    if (cfg.potential_name == "gaussian") return make_gaussian(cfg.dim);
    if (cfg.potential_name == "subbotin") {
        if (!cfg.alpha) throw ConfigInvalid("subbotin needs alpha");
        return make_subbotin(cfg.dim, *cfg.alpha);
    }
    if (cfg.potential_name == "gen_cauchy") {
        if (!cfg.beta) throw ConfigInvalid("gen_cauchy needs beta");
        return make_gen_cauchy(cfg.dim, *cfg.beta);
    }
    if (cfg.potential_name == "coupled_quartic") {
        if (!cfg.beta) throw ConfigInvalid("coupled_quartic needs beta");
        return make_coupled_quartic(*cfg.beta);
    }
    throw ConfigInvalid("unknown potential '" + cfg.potential_name + "'");
}

Weight build_weight(const RunConfig& cfg, const Potential& p) {
    if (cfg.weight_kind == "identity") return identity_weight(p.dim);
    if (cfg.weight_kind == "epsilon") return make_epsilon_weight(p, cfg.epsilon);
    if (cfg.weight_kind == "scalar_expr") {
        if (cfg.expr.empty()) throw ConfigInvalid("scalar_expr weight needs expr");
        return make_scalar_weight(p.dim, make_expr_field(cfg.expr, p.dim), "scalar_expr");
    }
    if (cfg.weight_kind == "diagonal_quartic_Z") {
        if (p.name != "coupled_quartic")
            throw ConfigInvalid("diagonal_quartic_Z weight requires the coupled_quartic "
                                "potential");
        double c;
        if (cfg.z_c) {
            c = *cfg.z_c;
        } else {
            const double beta = p.params.at("beta");
            const double disc = 1.5 - beta * beta;
            if (!(disc > 0.0)) throw ConfigInvalid("beta too large for the default c");
            c = std::sqrt(disc);
        }
        return make_quartic_z_weight(p, cfg.z_b, c);
    }
    throw ConfigInvalid("unknown weight kind '" + cfg.weight_kind + "'");
}

std::vector<int> default_resolution(const Potential& p) {
    // the heavy-tailed family needs a denser rule on its wide box
    if (p.name == "gen_cauchy") return {p.dim == 1 ? 800 : 800};
    if (p.dim == 1) return {400};
    return {200};
}

Box default_box(const Potential& p) {
    if (p.name == "gen_cauchy") {
        Box b(p.dim, {-50.0, 50.0});
        return b;
    }
    return auto_box(p);
}

// ---------------------------------------------------------------------------
// tiny expression parser

namespace {

struct Node {
    virtual ~Node() = default;
    virtual double eval(std::span<const double> x) const = 0;
};
using NodePtr = std::unique_ptr<Node>;

struct Const : Node {
    double v;
    explicit Const(double v_) : v(v_) {}
    double eval(std::span<const double>) const override { return v; }
};

struct Var : Node {
    int idx;
    explicit Var(int i) : idx(i) {}
    double eval(std::span<const double> x) const override {
        if (idx >= static_cast<int>(x.size()))
            throw ParameterOutOfRange("expression references coordinate beyond dim");
        return x[idx];
    }
};

struct Unary : Node {
    double (*fn)(double);
    NodePtr arg;
    Unary(double (*f)(double), NodePtr a) : fn(f), arg(std::move(a)) {}
    double eval(std::span<const double> x) const override { return fn(arg->eval(x)); }
};

struct Binary : Node {
    char op;
    NodePtr lhs, rhs;
    Binary(char o, NodePtr l, NodePtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
    double eval(std::span<const double> x) const override {
        const double a = lhs->eval(x);
        const double b = rhs->eval(x);
        switch (op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        default: return std::pow(a, b);
        }
    }
};

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ConfigInvalid("trailing characters in expression");
        return e;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+'))
                lhs = std::make_unique<Binary>('+', std::move(lhs), term());
            else if (eat('-'))
                lhs = std::make_unique<Binary>('-', std::move(lhs), term());
            else
                return lhs;
        }
    }
    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (eat('*'))
                lhs = std::make_unique<Binary>('*', std::move(lhs), factor());
            else if (eat('/'))
                lhs = std::make_unique<Binary>('/', std::move(lhs), factor());
            else
                return lhs;
        }
    }
    NodePtr factor() {
        NodePtr base = unary();
        if (eat('^')) return std::make_unique<Binary>('^', std::move(base), factor());
        return base;
    }
    NodePtr unary() {
        if (eat('-'))
            return std::make_unique<Binary>('-', std::make_unique<Const>(0.0), unary());
        return primary();
    }
    NodePtr primary() {
        skip_ws();
        if (pos_ >= s_.size()) throw ConfigInvalid("unexpected end of expression");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            const double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            return std::make_unique<Const>(v);
        }
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')')) throw ConfigInvalid("missing ')' in expression");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t end = pos_;
            while (end < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
                ++end;
            const std::string ident = s_.substr(pos_, end - pos_);
            pos_ = end;
            if (ident.size() >= 2 && ident[0] == 'x' &&
                std::isdigit(static_cast<unsigned char>(ident[1]))) {
                const int idx = std::stoi(ident.substr(1)) - 1;
                if (idx < 0) throw ConfigInvalid("bad coordinate '" + ident + "'");
                return std::make_unique<Var>(idx);
            }
            if (ident == "pi") return std::make_unique<Const>(3.14159265358979323846);
            static const std::map<std::string, double (*)(double)> fns = {
                {"sin", std::sin}, {"cos", std::cos},   {"tan", std::tan},
                {"exp", std::exp}, {"log", std::log},   {"sqrt", std::sqrt},
                {"tanh", std::tanh}, {"abs", std::fabs},
            };
            auto it = fns.find(ident);
            if (it == fns.end()) throw ConfigInvalid("unknown identifier '" + ident + "'");
            if (!eat('(')) throw ConfigInvalid("expected '(' after " + ident);
            NodePtr arg = expr();
            if (!eat(')')) throw ConfigInvalid("missing ')' after " + ident + " argument");
            return std::make_unique<Unary>(it->second, std::move(arg));
        }
        throw ConfigInvalid(std::string("unexpected character '") + c + "' in expression");
    }
};

} // namespace

ScalarField make_expr_field(const std::string& expr, int dim) {
    std::shared_ptr<Node> root(Parser(expr).parse().release());
    ScalarField f;
    f.value = [root](std::span<const double> x) { return root->eval(x); };
    auto step = [](std::span<const double> x) {
        double m = 1.0;
        for (double v : x) m = std::max(m, std::fabs(v));
        return 1e-5 * m;
    };
    f.gradient = [root, dim, step](std::span<const double> x, std::span<double> g) {
        Vec xp(x.begin(), x.end()), xm(x.begin(), x.end());
        const double h = step(x);
        for (int i = 0; i < dim; ++i) {
            xp[i] = x[i] + h;
            xm[i] = x[i] - h;
            g[i] = (root->eval(xp) - root->eval(xm)) / (2.0 * h);
            xp[i] = x[i];
            xm[i] = x[i];
        }
    };
    f.laplacian = [root, dim, step](std::span<const double> x) {
        Vec xt(x.begin(), x.end());
        const double h = step(x);
        const double f0 = root->eval(xt);
        double lap = 0.0;
        for (int i = 0; i < dim; ++i) {
            xt[i] = x[i] + h;
            const double fp = root->eval(xt);
            xt[i] = x[i] - h;
            const double fm = root->eval(xt);
            xt[i] = x[i];
            lap += (fp - 2.0 * f0 + fm) / (h * h);
        }
        return lap;
    };
    return f;
}

} // namespace specgap
