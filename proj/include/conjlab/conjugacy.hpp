#pragma once

#include <cstddef>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "conjlab/flows.hpp"
#include "conjlab/parallel.hpp"
#include "conjlab/vec.hpp"

namespace conjlab {

struct EngineOptions {
    double step = 0.0;              // 0 => 0.01 / max(alpha, omega_c)
    double tail_tol = 1e-8;         // truncation of the improper integrals
    double picard_tol = 1e-10;
    std::size_t max_iter = 200;
    double horizon_override = 0.0;  // > 0 replaces the tail-bound horizon
    bool memoize = true;
    double memo_quantum = 1e-13;    // key resolution of the memo cache

    nlohmann::json to_json() const;
};

struct GSolve {
    Vec g;
    std::size_t iterations = 0;
    std::vector<double> residuals;
};

/// Builds h, g and the maps H(u) = (u1 + h(u), u2), G(v) = (v1 + g(v), v2).
/// Construction refuses systems that fail their gate inequality.
class ConjugacyEngine {
public:
    ConjugacyEngine(SemilinearSystem sys, EngineOptions opt = {});

    const SemilinearSystem& system() const noexcept { return sys_; }
    const EngineOptions& options() const noexcept { return opt_; }
    double horizon() const noexcept { return horizon_; }
    double step() const noexcept { return solver_.max_step; }
    const SolverOptions& solver() const noexcept { return solver_; }
    /// 2k|f|_inf / alpha
    double norm_bound() const noexcept;
    /// Quadrature + Picard + tail tolerance budget used by the acceptance bands.
    double combined_tolerance() const noexcept;

    /// h(xi, eta) = -int_{-T}^0 e^{-As} P+ f(U(s)) ds + int_0^T e^{-As} P- f(U(s)) ds
    Vec compute_h(std::span<const double> xi, std::span<const double> eta) const;
    /// g(xi, eta) = w*(0), w* the fixed point of Tw = int G_A(t - s) f(V1 + w, V2) ds.
    Vec compute_g(std::span<const double> xi, std::span<const double> eta) const;
    /// compute_g without the cache, Picard started from the constant function w = guess.
    GSolve solve_g(std::span<const double> xi, std::span<const double> eta,
                   std::span<const double> guess = {}) const;

    ProductState H_map(const ProductState& u) const;
    ProductState G_map(const ProductState& v) const;

    struct NormStats {
        double max_h = 0.0;
        double max_g = 0.0;
        std::size_t h_evals = 0;
        std::size_t g_evals = 0;
        std::size_t cache_hits = 0;
    };
    NormStats norm_stats() const;
    void clear_cache() const;

private:
    Vec compute_h_uncached(std::span<const double> xi, std::span<const double> eta) const;
    std::string key(std::span<const double> xi, std::span<const double> eta) const;

    SemilinearSystem sys_;
    EngineOptions opt_;
    SolverOptions solver_;
    double horizon_ = 0.0;

    mutable std::mutex mu_;
    mutable std::unordered_map<std::string, Vec> h_cache_;
    mutable std::unordered_map<std::string, Vec> g_cache_;
    mutable NormStats stats_;
};

struct SampleDefects {
    std::size_t id = 0;
    double hg = 0.0;     // |H(G(v)) - v|
    double gh = 0.0;     // |G(H(u)) - u|
    double equiv = 0.0;  // max_t |H(U(t)) - V(t; H(u0))|
    double h_norm = 0.0;
    double g_norm = 0.0;
};

struct ConjugacyReport {
    double max_HG_identity_error = 0.0;
    double max_GH_identity_error = 0.0;
    double max_equivariance_error = 0.0;
    double max_h_norm = 0.0;
    double max_g_norm = 0.0;
    std::size_t sample_count = 0;
    std::vector<double> grid;
    std::vector<SampleDefects> samples;

    nlohmann::json to_json() const;
};

struct VerifyOptions {
    bool identities = true;
    bool equivariance = true;
    Exec exec = Exec::serial;
};

/// Identity defects on every sample (read as u for G∘H, as v for H∘G) and
/// equivariance defects of the flows along `grid` (must contain 0).
ConjugacyReport verify_conjugacy(const ConjugacyEngine& engine, const std::vector<ProductState>& samples,
                                 std::span<const double> grid, const VerifyOptions& opt = {});

}  // namespace conjlab
