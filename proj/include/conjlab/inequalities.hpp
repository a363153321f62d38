#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "conjlab/operators.hpp"

namespace conjlab {

/// Constants of the two-sided dichotomy integral inequality
///   T(t) <= a1 + a2 e^{-alpha t} + a3 int_0^t e^{-alpha(t-tau)} T + a4 int_t^s e^{alpha(t-tau)} T.
struct DichotomyIneqParams {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 0.0;
    double alpha = 1.0;
    double s = 1.0;  // may be +inf for the calculators

    /// (a3 + a4) / alpha
    double varpi() const noexcept { return (a3 + a4) / alpha; }
    /// alpha - a3 / (1 - varpi)
    double alpha1() const noexcept { return alpha - a3 / (1.0 - varpi()); }
    bool in_regime() const noexcept { return a3 + a4 < alpha; }
    /// alpha1 <= 0 is accepted but flagged.
    bool alpha1_flagged() const noexcept { return !(alpha1() > 0.0); }
    void validate() const;
};

/// (1 - varpi)^{-1} (a1 + a2 e^{-alpha1 t}), t in [0, s]. RegimeError if a3 + a4 >= alpha.
double dichotomy_bound_forward(const DichotomyIneqParams& p, double t);
/// (1 - varpi)^{-1} (a1 + a2 e^{alpha1 t}), t in [s, 0].
double dichotomy_bound_backward(const DichotomyIneqParams& p, double t);

/// M_c (du + dv) e^{(M_c f_lip + omega_c) t}, t >= 0.
double bellman_growth_bound(const GrowthBounds& g, double f_lip, double du, double dv, double t);

struct ImplicationReport {
    double max_hypothesis_violation = 0.0;  // max (T - rhs)+ over the grid
    double min_conclusion_slack = 0.0;      // min (bound - T) over the grid
    double tolerance = 0.0;
    bool hypothesis_holds = false;
    bool conclusion_holds = false;
    /// hypothesis => conclusion (vacuous when the hypothesis fails)
    bool implication_unrefuted() const noexcept { return !hypothesis_holds || conclusion_holds; }
};

enum class Direction { forward, backward };

/// Right-hand side of the hypothesis on the grid (trapezoid quadrature, O(n)).
/// Forward grids run 0 = t_0 < ... < t_n = s; backward grids s = t_0 < ... < t_n = 0.
std::vector<double> hypothesis_rhs(std::span<const double> grid, std::span<const double> T,
                                   const DichotomyIneqParams& p, Direction dir);

/// Checks hypothesis and conclusion of the forward (or backward) lemma on samples of T.
/// The hypothesis tolerance is rel_tol * (a1 + a2), the conclusion tolerance conclusion_tol.
ImplicationReport check_implication(std::span<const double> grid, std::span<const double> T,
                                    const DichotomyIneqParams& p, Direction dir = Direction::forward,
                                    double rel_tol = 1e-6, double conclusion_tol = 0.0);

/// Fixed point of the hypothesis right-hand side, iterated from T = 0. It
/// satisfies the discrete hypothesis with equality.
std::vector<double> synthesize_extremal(std::span<const double> grid, const DichotomyIneqParams& p,
                                        Direction dir = Direction::forward, double tol = 1e-14,
                                        std::size_t max_iter = 5000);

/// Uniform grid with n intervals on [0, s] (forward) or [-s, 0] (backward).
std::vector<double> uniform_grid(double s, std::size_t n, Direction dir = Direction::forward);

}  // namespace conjlab
