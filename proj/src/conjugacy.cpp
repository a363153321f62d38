#include "conjlab/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <utility>

#include "conjlab/errors.hpp"
#include "conjlab/panel.hpp"

namespace conjlab {

namespace {

inline double diff(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b);
}

void check_state(const SemilinearSystem& sys, std::span<const double> x, std::span<const double> y,
                 const char* who) {
    if (x.size() != sys.x_dim() || y.size() != sys.y_dim()) {
        throw InputError(std::string(who) + ": dimension mismatch");
    }
}

}  // namespace

nlohmann::json EngineOptions::to_json() const {
    return {{"step", step},
            {"tail_tol", tail_tol},
            {"picard_tol", picard_tol},
            {"max_iter", max_iter},
            {"horizon_override", horizon_override},
            {"memoize", memoize},
            {"memo_quantum", memo_quantum}};
}

ConjugacyEngine::ConjugacyEngine(SemilinearSystem sys, EngineOptions opt)
    : sys_(std::move(sys)), opt_(opt) {
    if (!sys_.gap_holds()) {
        throw PreconditionError("gate violated for system '" + sys_.name() + "': " + sys_.gap_inequality());
    }
    if (!std::isfinite(sys_.f_sup())) {
        throw PreconditionError("system '" + sys_.name() + "' has unbounded f; localize it first");
    }
    if (!(opt_.tail_tol > 0.0) || !(opt_.picard_tol > 0.0)) {
        throw InputError("ConjugacyEngine: tolerances must be > 0");
    }
    solver_ = SolverOptions::for_system(sys_);
    if (opt_.step > 0.0) solver_.max_step = opt_.step;
    solver_.picard_tol = opt_.picard_tol;
    solver_.max_iter = opt_.max_iter;
    horizon_ = opt_.horizon_override > 0.0
                   ? opt_.horizon_override
                   : tail_horizon(sys_.k(), sys_.alpha(), sys_.f_sup(), opt_.tail_tol);
}

double ConjugacyEngine::norm_bound() const noexcept {
    return 2.0 * sys_.k() * sys_.f_sup() / sys_.alpha();
}

double ConjugacyEngine::combined_tolerance() const noexcept {
    return opt_.tail_tol + 10.0 * opt_.picard_tol;
}

std::string ConjugacyEngine::key(std::span<const double> xi, std::span<const double> eta) const {
    std::string k;
    k.reserve(8 * (xi.size() + eta.size()));
    auto put = [&](double v) {
        const double q = std::round(v / opt_.memo_quantum);
        std::int64_t bits;
        if (std::abs(q) < 9e18) {
            bits = static_cast<std::int64_t>(q);
        } else {
            std::memcpy(&bits, &v, sizeof bits);
        }
        k.append(reinterpret_cast<const char*>(&bits), sizeof bits);
    };
    for (double v : xi) put(v);
    k.push_back('|');
    for (double v : eta) put(v);
    return k;
}

Vec ConjugacyEngine::compute_h(std::span<const double> xi, std::span<const double> eta) const {
    check_state(sys_, xi, eta, "compute_h");
    if (sys_.f().is_zero()) return Vec(sys_.x_dim(), 0.0);
    std::string k;
    if (opt_.memoize) {
        k = key(xi, eta);
        std::lock_guard<std::mutex> lock(mu_);
        if (auto it = h_cache_.find(k); it != h_cache_.end()) {
            ++stats_.cache_hits;
            return it->second;
        }
    }
    Vec h = compute_h_uncached(xi, eta);
    std::lock_guard<std::mutex> lock(mu_);
    ++stats_.h_evals;
    stats_.max_h = std::max(stats_.max_h, norm2(h));
    if (opt_.memoize) h_cache_.emplace(std::move(k), h);
    return h;
}

Vec ConjugacyEngine::compute_h_uncached(std::span<const double> xi, std::span<const double> eta) const {
    const std::size_t n = sys_.x_dim();
    const auto& spec = sys_.dichotomy();
    const double step = solver_.max_step;
    const auto panels = static_cast<std::size_t>(std::ceil(horizon_ / step - 1e-9));
    Vec h(n, 0.0);

    // w(s) = e^{-lambda s}; Simpson on each panel with the weight at the stages
    auto accumulate = [&](const std::vector<std::size_t>& idx, double sign) {
        return [&, sign](const PanelStages& st) {
            const double ts[3] = {st.t0, st.t0 + 0.5 * st.h, st.t0 + st.h};
            const double w = std::abs(st.h) / 6.0;
            for (std::size_t i : idx) {
                const double l = sys_.gen_A().eigenvalue(i);
                double acc = 0.0;
                for (int s = 0; s < 3; ++s) {
                    const double F = st.F[s][i];
                    if (F == 0.0) continue;
                    acc += (s == 1 ? 4.0 : 1.0) * std::exp(-l * ts[s]) * F;
                }
                h[i] += sign * w * acc;
            }
        };
    };
    if (spec.has_stable()) {
        march(sys_, 0.0, xi, eta, -step, panels, solver_, accumulate(spec.stable_indices(), -1.0));
    }
    if (spec.has_unstable()) {
        march(sys_, 0.0, xi, eta, step, panels, solver_, accumulate(spec.unstable_indices(), 1.0));
    }
    return h;
}

GSolve ConjugacyEngine::solve_g(std::span<const double> xi, std::span<const double> eta,
                                std::span<const double> guess) const {
    check_state(sys_, xi, eta, "compute_g");
    const std::size_t n = sys_.x_dim();
    if (!guess.empty() && guess.size() != n) throw InputError("solve_g: guess must have the X dimension");
    GSolve out;
    if (sys_.f().is_zero()) {
        out.g.assign(n, 0.0);
        return out;
    }
    const auto& spec = sys_.dichotomy();
    const PanelGrid grid = PanelGrid::around_origin(spec.has_stable() ? horizon_ : 0.0,
                                                    spec.has_unstable() ? horizon_ : 0.0, solver_.max_step);
    const std::size_t m = grid.nodes();
    std::vector<Vec> v1(m), v2(m);
    for (std::size_t a = 0; a < m; ++a) {
        v1[a] = sys_.gen_A().apply(grid.time(a), xi);
        v2[a] = sys_.gen_B().apply(grid.time(a), eta);
    }
    Vec w(n * m, 0.0), next(n * m), F(n * m), arg(n);
    if (!guess.empty()) {
        for (std::size_t a = 0; a < m; ++a) std::copy(guess.begin(), guess.end(), w.begin() + a * n);
    }
    bool converged = false;
    for (std::size_t it = 0; it < opt_.max_iter; ++it) {
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t i = 0; i < n; ++i) arg[i] = v1[a][i] + w[a * n + i];
            sys_.f().evaluate(arg, v2[a], std::span<double>(F).subspan(a * n, n));
        }
        green_sweep(sys_.gen_A(), spec, grid, F, next);
        double change = 0.0;
        for (std::size_t q = 0; q < n * m; ++q) change = std::max(change, diff(next[q], w[q]));
        w.swap(next);
        out.residuals.push_back(change);
        out.iterations = it + 1;
        if (std::isnan(change)) break;
        if (change < opt_.picard_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceError("compute_g: Picard iteration did not converge", out.residuals);
    }
    const std::size_t o = grid.origin();
    out.g.assign(w.begin() + static_cast<std::ptrdiff_t>(o * n),
                 w.begin() + static_cast<std::ptrdiff_t>((o + 1) * n));
    return out;
}

Vec ConjugacyEngine::compute_g(std::span<const double> xi, std::span<const double> eta) const {
    check_state(sys_, xi, eta, "compute_g");
    if (sys_.f().is_zero()) return Vec(sys_.x_dim(), 0.0);
    std::string k;
    if (opt_.memoize) {
        k = key(xi, eta);
        std::lock_guard<std::mutex> lock(mu_);
        if (auto it = g_cache_.find(k); it != g_cache_.end()) {
            ++stats_.cache_hits;
            return it->second;
        }
    }
    Vec g = solve_g(xi, eta).g;
    std::lock_guard<std::mutex> lock(mu_);
    ++stats_.g_evals;
    stats_.max_g = std::max(stats_.max_g, norm2(g));
    if (opt_.memoize) g_cache_.emplace(std::move(k), g);
    return g;
}

ProductState ConjugacyEngine::H_map(const ProductState& u) const {
    const Vec h = compute_h(u.x, u.y);
    ProductState out{u.x, u.y};
    for (std::size_t i = 0; i < h.size(); ++i) out.x[i] += h[i];
    return out;
}

ProductState ConjugacyEngine::G_map(const ProductState& v) const {
    const Vec g = compute_g(v.x, v.y);
    ProductState out{v.x, v.y};
    for (std::size_t i = 0; i < g.size(); ++i) out.x[i] += g[i];
    return out;
}

ConjugacyEngine::NormStats ConjugacyEngine::norm_stats() const {
    std::lock_guard<std::mutex> lock(mu_);
    return stats_;
}

void ConjugacyEngine::clear_cache() const {
    std::lock_guard<std::mutex> lock(mu_);
    h_cache_.clear();
    g_cache_.clear();
}

nlohmann::json ConjugacyReport::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : samples) {
        rows.push_back({{"id", s.id}, {"hg", s.hg}, {"gh", s.gh}, {"equiv", s.equiv},
                        {"h_norm", s.h_norm}, {"g_norm", s.g_norm}});
    }
    return {{"max_HG_identity_error", max_HG_identity_error},
            {"max_GH_identity_error", max_GH_identity_error},
            {"max_equivariance_error", max_equivariance_error},
            {"max_h_norm", max_h_norm},
            {"max_g_norm", max_g_norm},
            {"sample_count", sample_count},
            {"grid", grid},
            {"samples", rows}};
}

ConjugacyReport verify_conjugacy(const ConjugacyEngine& engine, const std::vector<ProductState>& samples,
                                 std::span<const double> grid, const VerifyOptions& opt) {
    if (samples.empty()) throw InputError("verify_conjugacy: no samples");
    const auto& sys = engine.system();
    for (const auto& s : samples) check_state(sys, s.x, s.y, "verify_conjugacy");
    if (opt.equivariance && std::find(grid.begin(), grid.end(), 0.0) == grid.end()) {
        throw InputError("verify_conjugacy: grid must contain t = 0");
    }

    ConjugacyReport rep;
    rep.sample_count = samples.size();
    rep.grid.assign(grid.begin(), grid.end());
    rep.samples.resize(samples.size());

    for_each_index(samples.size(), opt.exec, [&](std::size_t i) {
        const ProductState& u = samples[i];
        SampleDefects d;
        d.id = i;
        const Vec h0 = engine.compute_h(u.x, u.y);
        const Vec g0 = engine.compute_g(u.x, u.y);
        d.h_norm = norm2(h0);
        d.g_norm = norm2(g0);
        if (opt.identities) {
            const ProductState Gv = engine.G_map(u);
            d.hg = product_dist(engine.H_map(Gv), u);
            const ProductState Hu = engine.H_map(u);
            d.gh = product_dist(engine.G_map(Hu), u);
        }
        if (opt.equivariance) {
            const ProductState Hu = engine.H_map(u);
            const Trajectory U = mild_solution(sys, u.x, u.y, grid, engine.solver());
            const Trajectory V = linear_flow(sys, Hu.x, Hu.y, grid);
            for (std::size_t j = 0; j < U.size(); ++j) {
                const ProductState Ut{U.x_states()[j], U.y_states()[j]};
                const ProductState Vt{V.x_states()[j], V.y_states()[j]};
                d.equiv = std::max(d.equiv, product_dist(engine.H_map(Ut), Vt));
            }
        }
        rep.samples[i] = d;
    });

    for (const auto& d : rep.samples) {
        rep.max_HG_identity_error = std::max(rep.max_HG_identity_error, d.hg);
        rep.max_GH_identity_error = std::max(rep.max_GH_identity_error, d.gh);
        rep.max_equivariance_error = std::max(rep.max_equivariance_error, d.equiv);
        rep.max_h_norm = std::max(rep.max_h_norm, d.h_norm);
        rep.max_g_norm = std::max(rep.max_g_norm, d.g_norm);
    }
    const auto st = engine.norm_stats();
    rep.max_h_norm = std::max(rep.max_h_norm, st.max_h);
    rep.max_g_norm = std::max(rep.max_g_norm, st.max_g);
    return rep;
}

}  // namespace conjlab
