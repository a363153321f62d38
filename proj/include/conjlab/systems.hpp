#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "conjlab/flows.hpp"
#include "conjlab/localization.hpp"

namespace conjlab {

struct ToyConfig {
    std::size_t n_stable = 1;
    std::size_t n_unstable = 1;
    double alpha = 1.0;
    double gap_margin = 0.0;        // eigenvalue i of a side is +-(alpha + margin * i)
    Vec b_eigenvalues = {-0.5};
    std::vector<std::size_t> b_stable = {0};
    nlohmann::json f = {{"kind", "ridge_tanh"}, {"scale", 0.1}};  // wx, direction default to e_0, (1..1)
    bool require_gate = false;      // ConfigurationError if the gate fails
};

struct HeatConfig {
    std::size_t n_modes = 8;
    Vec b_eigenvalues = {-0.5};
    std::vector<std::size_t> b_stable = {0};
    nlohmann::json f = {{"kind", "coordinate_tanh"}, {"scale", 0.5}};
};

/// Hodgkin-Huxley cable with constant gating rates. X holds the sine-mode
/// coefficients of V; Y holds the gating deviations z = (n, m, h) - (alpha/gamma).
struct HodgkinHuxleyConfig {
    double C = 1.0;
    double r_e = 0.5;
    double r_i = 0.5;
    double g_k = 36.0;
    double E_k = -12.0;
    double g_Na = 120.0;
    double E_Na = 115.0;
    double gamma_n = 0.5, gamma_m = 0.8, gamma_h = 0.3;
    double alpha_n = 0.2, alpha_m = 0.4, alpha_h = 0.18;
    std::size_t n_modes = 4;
    double v_clamp = 120.0;          // radius of the smooth clamp on the V coefficients
    double gate_lo = 0.0, gate_hi = 1.0;
    bool require_gate = false;

    nlohmann::json to_json() const;
    static HodgkinHuxleyConfig from_json(const nlohmann::json& j);
};

SemilinearSystem make_toy(const ToyConfig& cfg, const std::string& name = "toy");
SemilinearSystem make_heat(const HeatConfig& cfg, const std::string& name = "heat");
SemilinearSystem make_hodgkin_huxley(const HodgkinHuxleyConfig& cfg, const std::string& name = "hh");

/// -g_k n^4 (V - E_k) - g_Na m^3 h (V - E_Na), pointwise and unclamped.
double hh_pointwise_f(const HodgkinHuxleyConfig& cfg, double V, double n, double m, double h);

/// Builds f from a descriptor, including the "localized" and "hodgkin_huxley" kinds.
Nonlinearity any_nonlinearity_from_json(const nlohmann::json& j, std::size_t x_dim, std::size_t y_dim);

/// System from a JSON config: {"kind": "toy" | "heat" | "hodgkin_huxley" | "custom", ...},
/// optionally {"localize": {"delta": d, "modulus": {...}}}.
SemilinearSystem system_from_json(const nlohmann::json& j);

struct BuiltinInfo {
    std::string name;
    std::string summary;
    nlohmann::json config;
};

const std::vector<BuiltinInfo>& builtin_systems();
bool is_builtin(const std::string& name);
SemilinearSystem make_builtin(const std::string& name);

/// Built-in name, or a path to a JSON config file.
SemilinearSystem resolve_system(const std::string& ref);

}  // namespace conjlab
