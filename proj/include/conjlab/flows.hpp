#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "conjlab/nonlinearity.hpp"
#include "conjlab/operators.hpp"
#include "conjlab/panel.hpp"
#include "conjlab/vec.hpp"

namespace conjlab {

/// Which inequality decides whether the conjugacy may be requested.
enum class GateRule {
    spectral_gap,     // 4 k |f|_Lip / alpha < 1
    unit_normalized,  // |f|_Lip < 1, the parabolic reading with 4k/alpha normalised to 1
};

/// u1' = A u1 + f(u1, u2), u2' = B u2 with A, B diagonal and a coordinate
/// dichotomy for A. Y carries its own coordinate split (y_stable) which plays
/// the role of P+ on Y in the half-axis constructions.
class SemilinearSystem {
public:
    struct Parts {
        std::string name;
        SpectralGenerator gen_A;
        DichotomySpec dichotomy_A;
        SpectralGenerator gen_B;
        std::vector<std::size_t> y_stable;
        Nonlinearity f;
        GateRule gate = GateRule::spectral_gap;
        bool backward_well_posed = true;
        bool localized = false;
        nlohmann::json config;  // whatever produced the system, embedded in reports
    };

    SemilinearSystem() = default;
    explicit SemilinearSystem(Parts parts);

    const std::string& name() const noexcept { return p_.name; }
    const SpectralGenerator& gen_A() const noexcept { return p_.gen_A; }
    const DichotomySpec& dichotomy() const noexcept { return p_.dichotomy_A; }
    const SpectralGenerator& gen_B() const noexcept { return p_.gen_B; }
    const Nonlinearity& f() const noexcept { return p_.f; }
    const GrowthBounds& growth() const noexcept { return growth_; }
    const std::vector<std::size_t>& y_stable() const noexcept { return p_.y_stable; }
    std::vector<std::size_t> y_unstable() const;
    GateRule gate_rule() const noexcept { return p_.gate; }
    bool backward_well_posed() const noexcept { return p_.backward_well_posed; }
    bool localized() const noexcept { return p_.localized; }
    const nlohmann::json& config() const noexcept { return p_.config; }

    std::size_t x_dim() const noexcept { return p_.gen_A.dimension(); }
    std::size_t y_dim() const noexcept { return p_.gen_B.dimension(); }
    double k() const noexcept { return p_.dichotomy_A.k(); }
    double alpha() const noexcept { return p_.dichotomy_A.alpha(); }
    double f_sup() const noexcept { return p_.f.sup(); }
    double f_lip() const noexcept { return p_.f.lip(); }

    /// Left side of the gate inequality (must be < 1), per gate_rule().
    double gap_value() const noexcept;
    bool gap_holds() const noexcept { return gap_value() < 1.0; }
    std::string gap_inequality() const;
    /// Lipschitz constant of the Green-convolution fixed-point maps on BC:
    /// kernel_mass * |f|_Lip.
    double contraction_factor() const noexcept;
    /// sup over the relevant half-axis of |e^{Bt}| on the Y split: t >= 0 on
    /// y_stable, t <= 0 on y_unstable. +inf if B grows there.
    double m_b_halfaxis(Side side) const noexcept;
    double m_b() const noexcept;

    /// Projections of a Y vector on the Y split.
    Vec project_y(std::span<const double> y, Side side) const;

    /// Stable FNV-1a hash of the canonical JSON description.
    std::string hash() const;
    nlohmann::json describe() const;

private:
    Parts p_;
    GrowthBounds growth_;
};

struct SolverOptions {
    double max_step = 0.01;      // panel width cap
    double picard_tol = 1e-10;   // sup-norm stopping rule for global Picard sweeps
    std::size_t max_iter = 200;
    double local_tol = 1e-14;    // relative tolerance of the per-panel Picard solve
    std::size_t local_max_iter = 60;

    /// step <= 0.01 / max(alpha, omega_c)
    static SolverOptions for_system(const SemilinearSystem& sys);
};

/// Times plus states. Times strictly increasing; all vectors the same length.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::vector<double> times, std::vector<Vec> x_states, std::vector<Vec> y_states);

    std::size_t size() const noexcept { return times_.size(); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<Vec>& x_states() const noexcept { return x_; }
    const std::vector<Vec>& y_states() const noexcept { return y_; }
    std::size_t index_of(double t, double tol = 1e-12) const;

    // Solver bookkeeping, exported with the JSON bundle.
    std::size_t picard_iterations = 0;
    double last_residual = 0.0;

private:
    std::vector<double> times_;
    std::vector<Vec> x_;
    std::vector<Vec> y_;
};

/// Stage values of one panel as produced by march().
struct PanelStages {
    double t0 = 0.0;
    double h = 0.0;
    Vec x[3];
    Vec y[3];
    Vec F[3];  // f(x, y) at the three stages
};

/// Marches the mild solution from (t0, x0) over `panels` panels of signed
/// width h. Each panel solves its local integral equation by Picard
/// iteration to SolverOptions::local_tol. visit() sees every panel; returns
/// the total number of local Picard iterations.
std::size_t march(const SemilinearSystem& sys, double t0, std::span<const double> x0,
                  std::span<const double> y0_at_zero, double h, std::size_t panels,
                  const SolverOptions& opt, const std::function<void(const PanelStages&)>& visit);

/// Variation-of-constants solution of the semilinear system on the given
/// times (must contain 0, strictly increasing). U2 is exactly e^{Bt} u20.
Trajectory mild_solution(const SemilinearSystem& sys, std::span<const double> u10,
                         std::span<const double> u20, std::span<const double> times,
                         const SolverOptions& opt);

/// (e^{At} v10, e^{Bt} v20) on the given times.
Trajectory linear_flow(const SemilinearSystem& sys, std::span<const double> v10,
                       std::span<const double> v20, std::span<const double> times);

enum class HalfAxis { forward, backward };  // t >= 0 / t <= 0

struct HalfAxisOptions {
    SolverOptions solver;
    double horizon = 0.0;        // 0 => truncation horizon from the tail bound
    double tail_tol = 1e-10;
    std::span<const double> initial_guess{};  // node-major over the internal grid; empty => zero
};

/// Bounded solution on a half-axis with prescribed P+ (forward) or P- (backward)
/// data, as the Picard fixed point of the map
///   Phi(t) = e^{At} xi + int_0^t e^{A(t-s)} P+ f ds - int_t^inf e^{A(t-s)} P- f ds
/// (mirrored for t <= 0), Psi(t) = e^{Bt} eta. Returned on the internal
/// half-node grid restricted to |t| <= t_out.
Trajectory bounded_solution_halfaxis(const SemilinearSystem& sys, std::span<const double> xi,
                                     std::span<const double> eta, HalfAxis side, double t_out,
                                     const HalfAxisOptions& opt);

/// Horizon T with 2k|f|_inf e^{-alpha T} / alpha <= tail_tol (at least `floor`).
double tail_horizon(double k, double alpha, double f_sup, double tail_tol, double floor = 1.0);

}  // namespace conjlab
