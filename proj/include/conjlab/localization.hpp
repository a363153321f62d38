#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "conjlab/flows.hpp"
#include "conjlab/nonlinearity.hpp"

namespace conjlab {

/// Smooth cutoff psi: 1 on [0, 1], 0 on [2, inf), strictly decreasing in
/// between. The transition is the normalized integral of the kernel
/// exp(-c / (s (1 - s))) on (0, 1), tabulated once and read back through
/// cubic Hermite interpolation with the exact derivative.
class BumpProfile {
public:
    /// Throws ConfigurationError if the profile's max slope exceeds 2.
    explicit BumpProfile(double sharpness = 0.3, std::size_t cells = 4096);

    double operator()(double t) const;
    double derivative(double t) const;
    /// max |psi'| (attained at t = 1.5)
    double max_slope() const noexcept { return max_slope_; }
    double sharpness() const noexcept { return c_; }

    static const BumpProfile& standard();

private:
    double kernel(double s) const;

    double c_;
    double norm_;
    double max_slope_;
    std::vector<double> table_;  // Phi at s = i / cells
};

/// psi(t), t >= 0, using the standard profile.
double bump(double t);

/// Local Lipschitz modulus L(r1, r2): Lipschitz constant of f on
/// {|u1| <= r1, |u2| <= r2}. Nondecreasing, L(0, 0) = 0.
struct LocalModulus {
    std::function<double(double, double)> L;
    nlohmann::json descriptor;

    double operator()(double r1, double r2) const { return L(r1, r2); }
    static LocalModulus quadratic(double c);  // 2c max(r1, r2)
    static LocalModulus from_json(const nlohmann::json& j);
};

/// The rescaling u -> psi(|u|^2 / delta^2) u along a ray, d/dr of r psi(r^2/delta^2).
double rescale_radial_derivative(double r, double delta);

/// f_delta(u1, u2) = f(psi(|u1|^2/delta^2) u1, psi(|u2|^2/delta^2) u2) with
/// |f_delta|_Lip = 9 L(sqrt2 delta, sqrt2 delta) and
/// |f_delta|_inf = 2 sqrt2 delta L(sqrt2 delta, sqrt2 delta). Requires f(0, 0) = 0.
Nonlinearity modify(const Nonlinearity& f, double delta, const LocalModulus& L);

/// 36 k L / alpha < 1 (strict), L the modulus value at (sqrt2 delta, sqrt2 delta).
bool local_gate(double k, double alpha, double L_value);
bool local_gate(double k, double alpha, const LocalModulus& L, double delta);

/// Bisection for the delta where 36 k L(sqrt2 delta, sqrt2 delta) / alpha crosses 1.
/// Needs the gate to hold at lo and fail at hi.
double gate_flip_delta(double k, double alpha, const LocalModulus& L, double lo, double hi,
                       double tol = 1e-6);

/// The base system with f replaced by f_delta, tagged localized. An empty
/// name means base name + "-localized".
SemilinearSystem localize(const SemilinearSystem& base, double delta, const LocalModulus& L,
                          const std::string& name = "");

}  // namespace conjlab
