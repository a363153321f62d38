#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace conjlab {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, negative time where a nonnegative one
/// is required, unparseable configuration and so on.
class InputError : public Error {
public:
    using Error::Error;
};

/// A mathematical precondition of the requested construction does not hold
/// (gap condition, contraction regime).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The dichotomy-inequality calculators were asked for a bound outside the
/// regime a3 + a4 < alpha.
class RegimeError : public Error {
public:
    using Error::Error;
};

class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Degenerate regression data (all distances below the noise floor).
class EstimationError : public Error {
public:
    EstimationError(const std::string& what, double noise_floor);
    double noise_floor() const noexcept { return noise_floor_; }

private:
    double noise_floor_;
};

/// A Picard iteration did not reach its tolerance. Carries the residual
/// history so callers can tell slow convergence from divergence.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> residuals);
    double last_residual() const noexcept;
    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

}  // namespace conjlab
