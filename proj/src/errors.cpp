#include "conjlab/errors.hpp"

#include <limits>
#include <utility>

namespace conjlab {

EstimationError::EstimationError(const std::string& what, double noise_floor)
    : Error(what), noise_floor_(noise_floor) {}

ConvergenceError::ConvergenceError(const std::string& what, std::vector<double> residuals)
    : Error(what), residuals_(std::move(residuals)) {}

double ConvergenceError::last_residual() const noexcept {
    return residuals_.empty() ? std::numeric_limits<double>::quiet_NaN() : residuals_.back();
}

}  // namespace conjlab
