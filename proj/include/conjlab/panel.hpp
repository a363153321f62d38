#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "conjlab/operators.hpp"

namespace conjlab {

// Duhamel integrals over one Simpson panel [t0, t0 + h] (h may be negative)
// with stage values at t0, t0 + h/2, t0 + h. The integrand is
// e^{lambda (t - s)} F(s), handled by applying the exponential to the node
// values and integrating the product with the Simpson / Lobatto weights.
struct PanelExp {
    double full;       // e^{lambda h}
    double half;       // e^{lambda h / 2}
    double neg_half;   // e^{-lambda h / 2}

    PanelExp(double lambda, double h)
        : full(std::exp(lambda * h)), half(std::exp(0.5 * lambda * h)), neg_half(std::exp(-0.5 * lambda * h)) {}
};

// x(t0 + h) = e^{lambda h} x0 + int_{t0}^{t0+h} e^{lambda(t0 + h - s)} F(s) ds
inline double duhamel_end(const PanelExp& e, double h, double x0, double f0, double fm, double fe) {
    return e.full * x0 + h / 6.0 * (e.full * f0 + 4.0 * e.half * fm + fe);
}

// x(t0 + h/2), quadratic interpolation of the integrand over the first half
inline double duhamel_mid(const PanelExp& e, double h, double x0, double f0, double fm, double fe) {
    return e.half * x0 + h / 24.0 * (5.0 * e.half * f0 + 8.0 * fm - e.neg_half * fe);
}

/// Uniform window [t_left, t_left + panels * h] with Simpson panels of width
/// h. Values live on half-nodes t_left + i h/2, i = 0 .. 2 * panels.
struct PanelGrid {
    double t_left = 0.0;
    double h = 0.0;
    std::size_t panels = 0;

    std::size_t nodes() const noexcept { return 2 * panels + 1; }
    double time(std::size_t i) const noexcept { return t_left + 0.5 * h * static_cast<double>(i); }
    double t_right() const noexcept { return t_left + h * static_cast<double>(panels); }

    /// Window covering [-t_back, t_fwd] with panel width exactly `step`; the
    /// ends are rounded outward so that t = 0 is a half-node.
    static PanelGrid around_origin(double t_back, double t_fwd, double step);
    /// Half-node index of t = 0 for grids built with around_origin().
    std::size_t origin() const noexcept {
        return static_cast<std::size_t>(std::llround(-2.0 * t_left / h));
    }
};

/// out = Green-kernel sweep of the node-major forcing F (F[node * n + i]):
///   stable i:   out_i(t) = e^{lambda (t - a)} left_init_i + int_a^t e^{lambda(t-s)} F_i(s) ds
///   unstable i: out_i(t) = e^{lambda (t - b)} right_init_i - int_t^b e^{lambda(t-s)} F_i(s) ds
/// on the window [a, b]. With zero inits this is the truncated convolution
/// int G_A(t - s) F(s) ds. Empty init spans mean zero.
void green_sweep(const SpectralGenerator& gen, const DichotomySpec& spec, const PanelGrid& grid,
                 std::span<const double> forcing, std::span<double> out,
                 std::span<const double> left_init_stable = {},
                 std::span<const double> right_init_unstable = {});

}  // namespace conjlab
