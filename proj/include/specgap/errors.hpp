#ifndef SPECGAP_ERRORS_HPP
#define SPECGAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace specgap {

// Base of all library errors. The CLI maps these to exit code 1,
// config problems to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A derivative evaluator was asked for a point where it diverges
// (e.g. radial Hessian at the origin for exponent < 2).
class SingularPoint : public Error {
public:
    explicit SingularPoint(const std::string& msg) : Error(msg) {}
};

class ParameterOutOfRange : public Error {
public:
    explicit ParameterOutOfRange(const std::string& msg) : Error(msg) {}
};

class MassNotCaptured : public Error {
public:
    explicit MassNotCaptured(const std::string& msg) : Error(msg) {}
};

class DimensionTooLarge : public Error {
public:
    explicit DimensionTooLarge(const std::string& msg) : Error(msg) {}
};

// Kernel matrix not safely invertible at one or more quadrature nodes.
class KernelSingular : public Error {
public:
    explicit KernelSingular(const std::string& msg) : Error(msg) {}
};

class NonPositiveBound : public Error {
public:
    explicit NonPositiveBound(const std::string& msg) : Error(msg) {}
};

class NonPositiveRho : public Error {
public:
    explicit NonPositiveRho(const std::string& msg) : Error(msg) {}
};

// Caller-supplied uniform bounds on the metric failed a spot-check.
class BoundsUnverified : public Error {
public:
    explicit BoundsUnverified(const std::string& msg) : Error(msg) {}
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& msg, double res)
        : Error(msg), residual(res) {}
    double residual;
};

class NonExplosionUnverified : public Error {
public:
    explicit NonExplosionUnverified(const std::string& msg) : Error(msg) {}
};

class PathDiverged : public Error {
public:
    explicit PathDiverged(const std::string& msg) : Error(msg) {}
};

// An emitted certificate failed its own random audit.
class CertificateUnsound : public Error {
public:
    explicit CertificateUnsound(const std::string& msg) : Error(msg) {}
};

class ConfigInvalid : public Error {
public:
    explicit ConfigInvalid(const std::string& msg) : Error(msg) {}
};

} // namespace specgap

#endif
