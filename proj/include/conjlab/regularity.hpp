#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "conjlab/flows.hpp"
#include "conjlab/parallel.hpp"
#include "conjlab/vec.hpp"

namespace conjlab {

enum class Fiber { stable, unstable, full };

std::string to_string(Fiber f);
Fiber fiber_from_string(const std::string& s);

/// Constants from the Lipschitz / Hölder proofs for one system.
struct TheoryConstants {
    double varpi = 0.0;     // 2k|f|_Lip / alpha
    double alpha1 = 0.0;    // alpha - k|f|_Lip / (1 - varpi)
    double m_b = 1.0;
    double p1 = 1.0;
    double q_tilde = 1.0;   // alpha / (omega_c + M_c |f|_Lip)
    double p_lower = 0.0;   // lower bound for p, p2 = 1 + p; +inf when omega_c <= alpha
    nlohmann::json to_json() const;
};

/// p1 = 1 + max{2k^2|f|_Lip / ((alpha1 + alpha)(1 - varpi)), 2k|f|_Lip M_B / (alpha (1 - varpi))}.
/// PreconditionError unless varpi < 1 and alpha1 > 0.
double theory_lipschitz_p1(const SemilinearSystem& sys);
/// alpha / (omega_c + M_c |f|_Lip)
double theory_holder_exponent(const SemilinearSystem& sys);
TheoryConstants theory_constants(const SemilinearSystem& sys);

/// tau1 = ln(1/d) / (omega_c + M_c|f|_Lip), tau2 = ln(1/d) / omega_c; logged only.
double tau1(const SemilinearSystem& sys, double d);
double tau2(const SemilinearSystem& sys, double d);

using PointMap = std::function<ProductState(const ProductState&)>;

struct RegularityConfig {
    std::size_t n_base = 20;
    std::size_t n_scales = 12;
    double scale_hi = 1e-1;
    double scale_lo = 1e-4;
    std::size_t n_directions = 5;
    double base_radius = 1.0;   // base points uniform in a box of this half-width
    double noise_floor = 0.0;   // d_out below this is excluded from the fit
    std::uint64_t seed = 1;
    Exec exec = Exec::serial;

    std::vector<double> scales() const;
    nlohmann::json to_json() const;
};

struct RegularityRow {
    std::size_t base = 0;
    std::size_t direction = 0;
    double scale = 0.0;
    double d_in = 0.0;
    double d_out = 0.0;
    bool used = false;
};

struct RegularityEstimate {
    double fitted_exponent = 0.0;
    double fitted_constant = 0.0;
    double residual_rms = 0.0;
    double max_ratio = 0.0;        // max d_out / d_in over used rows
    double max_ray_slope = 0.0;    // largest slope fitted on a single (base, direction) ray
    double theory_p1 = 0.0;
    double theory_q_tilde = 0.0;
    Fiber fiber = Fiber::full;
    std::size_t used = 0;
    std::size_t excluded = 0;
    double noise_floor = 0.0;
    std::vector<RegularityRow> rows;

    nlohmann::json to_json() const;
};

/// Random unit (product norm) direction whose X part lies in the chosen
/// dichotomy subspace and whose Y part lies in the matching Y split.
ProductState sample_direction(const SemilinearSystem& sys, Fiber fiber, std::uint64_t seed);

/// Least-squares slope of log d_out against log d_in over rays from the base
/// points. EstimationError if fewer than two distinct scales survive the floor.
RegularityEstimate estimate_exponent(const PointMap& map, const std::vector<ProductState>& base_points,
                                     const std::vector<ProductState>& directions,
                                     const RegularityConfig& cfg);

/// Base points and fiber directions drawn from cfg.seed, then estimate_exponent.
RegularityEstimate estimate_exponent(const PointMap& map, const SemilinearSystem& sys, Fiber fiber,
                                     const RegularityConfig& cfg);

/// Least-squares line y = a + b x; returns {b, a, rms residual}.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace conjlab
