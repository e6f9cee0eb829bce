#ifndef SPECGAP_WEIGHTS_HPP
#define SPECGAP_WEIGHTS_HPP

#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "specgap/linalg.hpp"
#include "specgap/potential.hpp"

namespace specgap {

// A smooth scalar field with the derivative handles needed by the
// weighted-field algebra.
struct ScalarField {
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    std::function<double(std::span<const double>)> laplacian;
};

// Diagonal weight matrix A = diag(a_i) with a_i = e^{-W_i} > 0. A scalar
// weight uses a single W for all coordinates; the identity weight is
// W == 0 represented exactly.
struct Weight {
    enum class Kind { Scalar, Diagonal };

    Kind kind = Kind::Scalar;
    int dim = 0;
    bool is_identity = false;
    std::vector<ScalarField> w; // size 1 (scalar) or dim (diagonal)

    // set when the weight is a = e^{-eps V}; enables the closed-form field
    bool has_epsilon = false;
    double epsilon = 0.0;

    // uniform lower bound on the Hessian of V_a = V + log(a^2), when known
    // (non-explosion gate for the simulation layer)
    bool va_bound_valid = false;
    double va_hessian_lower_bound = 0.0;

    std::string name;
    std::map<std::string, double> params;

    const ScalarField& field(int i) const {
        return kind == Kind::Scalar ? w.front() : w[static_cast<size_t>(i)];
    }

    // a_i(x) = e^{-W_i(x)}
    double a(int i, std::span<const double> x) const {
        if (is_identity) return 1.0;
        return std::exp(-field(i).value(x));
    }
};

Weight identity_weight(int d);

// a = e^{-eps V} with eps in (0, 1/2)
Weight make_epsilon_weight(const Potential& p, double epsilon);

// General scalar weight a = e^{-W} from user-supplied W handles.
Weight make_scalar_weight(int d, ScalarField w_field, const std::string& name);

// Two-coordinate diagonal weight for the coupled quartic potential:
// a_1 = e^{Z - V/2} with Z(x,y) = b y^4/4 + c x^2/2 and a_2(x,y) = a_1(y,x).
Weight make_quartic_z_weight(const Potential& quartic, double b, double c);

enum class MFieldMode {
    Auto,       // closed form when available, generic otherwise
    Generic,    // W-derivative route: hess V - diag(a_i L a_i^{-1})
    ClosedForm, // epsilon-weight display; requires an epsilon weight
};

// The symmetric matrix field x -> hess V(x) - diag(a_i L a_i^{-1})(x)
// together with its smallest-eigenvalue field rho.
class MField {
public:
    MField(Potential p, Weight w, MFieldMode mode);

    int dim() const { return potential_.dim; }
    const Potential& potential() const { return potential_; }
    const Weight& weight() const { return weight_; }
    MFieldMode mode() const { return mode_; }

    void eval(std::span<const double> x, SymMat& out) const;

    SymMat eval_at(std::span<const double> x) const {
        SymMat m(dim());
        eval(x, m);
        return m;
    }

    // smallest eigenvalue of eval(x)
    double rho(std::span<const double> x) const;

    // a_i L a_i^{-1} = Lap W_i + |grad W_i|^2 - (grad V)^T grad W_i
    double a_l_a_inv(int i, std::span<const double> x) const;

private:
    Potential potential_;
    Weight weight_;
    MFieldMode mode_;
};

MField m_field(const Potential& p, const Weight& w, MFieldMode mode = MFieldMode::Auto);

double rho_min(const MField& m, std::span<const double> x);

// S = (A A^T)^{-1} = diag(a_i^{-2})
void metric_S(const Weight& w, std::span<const double> x, SymMat& out);

} // namespace specgap

#endif
