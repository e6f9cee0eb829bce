#ifndef SPECGAP_CONFIG_HPP
#define SPECGAP_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "specgap/measure.hpp"
#include "specgap/weights.hpp"

namespace specgap {

// Fully resolved run description. Schema-validated before any
// computation; unknown keys are rejected.
struct RunConfig {
    std::string command; // bound | verify | gap | simulate | report

    // potential block
    std::string potential_name = "gaussian";
    int dim = 2;
    std::optional<double> alpha;
    std::optional<double> beta;

    // weight block
    std::string weight_kind = "identity"; // identity | epsilon | scalar_expr |
                                          // diagonal_quartic_Z
    double epsilon = 0.1;
    double z_b = 0.25;
    std::optional<double> z_c;
    std::string expr;

    // grid / quadrature block
    std::vector<int> resolution; // empty: per-potential default
    std::optional<Box> box;
    int grid_per_axis = 101;

    // sde block
    double t = 0.5;
    double dt = 1e-3;
    size_t paths = 10000;
    Vec x0;
    std::string f_name = "x1";
    double crn_h = 1e-3;
    bool lyapunov_ok = false;

    // bound block
    std::string bound_kind = "inf_rho"; // inf_rho | integrated | closed_form
    bool optimize = false;
    double eps_lo = 1e-3;
    double eps_hi = 0.499;
    std::optional<double> alpha_s;
    std::optional<double> beta_s;
    std::optional<double> lambda_cand;

    // verify block
    std::string inequality = "all"; // gbl | cbl | abl | poincare | gamma2 | all
    std::string family = "default";

    // output
    std::string out_path;
    std::string format = "json"; // json | csv
    uint64_t seed = 12345;

    std::vector<std::string> inputs; // report command
};

// Applies a JSON config on top of an existing (flag-derived) config.
// Throws ConfigInvalid on schema violations or unknown keys.
void apply_json_config(RunConfig& cfg, const nlohmann::json& j);

// Semantic validation after all sources are merged.
void validate_config(const RunConfig& cfg);

Potential build_potential(const RunConfig& cfg);
Weight build_weight(const RunConfig& cfg, const Potential& p);
std::vector<int> default_resolution(const Potential& p);
Box default_box(const Potential& p);

// Scalar field from an arithmetic expression over x1..x9 (functions sin,
// cos, tan, exp, log, sqrt, tanh, abs; operators + - * / ^). Derivatives
// fall back to central differences.
ScalarField make_expr_field(const std::string& expr, int dim);

} // namespace specgap

#endif
