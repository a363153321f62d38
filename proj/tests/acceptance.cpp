// Acceptance driver: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "conjlab/conjugacy.hpp"
#include "conjlab/errors.hpp"
#include "conjlab/runner.hpp"
#include "conjlab/systems.hpp"

using namespace conjlab;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kIdentityTol = 1e-6;
constexpr double kRuntimeLimit = 60.0;  // seconds
constexpr double kEquivarianceTol = 1e-5;
constexpr double kNormSlack = 1e-8;
constexpr double kToyNormBound = 0.2;
constexpr double kLemmaSlack = -1e-9;
constexpr double kDecaySlack = -1e-6;
constexpr double kCalibrationBand = 0.03;
constexpr double kHSlopeLo = 0.95, kHSlopeHi = 1.05;
constexpr double kToyP1 = 1.25;
constexpr double kRatioSlack = 1e-3;
constexpr double kGSlopeHi = 1.0;
constexpr double kGSlopeResolution = 0.03;
constexpr double kQBand = 0.1;
constexpr double kLipSlack = 1e-6;
constexpr double kBracketTol = 1e-6;
constexpr double kHeatLip = 0.5;
constexpr double kResidualTol = 1e-8;
constexpr double kRounding = 1e-12;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

std::vector<ProductState> random_points(const SemilinearSystem& sys, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<ProductState> out(n);
    for (auto& s : out) {
        s.x.resize(sys.x_dim());
        s.y.resize(sys.y_dim());
        for (double& v : s.x) v = U(rng);
        for (double& v : s.y) v = U(rng);
    }
    return out;
}

RunConfig base_config(const std::string& system, const fs::path& root) {
    RunConfig c;
    c.system_ref = system;
    c.out_dir = root / system;
    return c;
}

double metric(const SuiteResult& r, const std::string& key) {
    if (!r.metrics.contains(key) || !r.metrics.at(key).is_number()) return std::nan("");
    return r.metrics.at(key).get<double>();
}

// Composite Simpson substitution of a computed heat trajectory into the variation-of-constants formula.
double heat_residual(const SemilinearSystem& sys) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Vec x0(sys.x_dim()), y0(sys.y_dim());
    for (double& v : x0) v = U(rng);
    for (double& v : y0) v = U(rng);
    const double T = 0.6;
    const std::size_t n = 30000;
    std::vector<double> ts(n + 1);
    for (std::size_t i = 0; i <= n; ++i) ts[i] = T * static_cast<double>(i) / static_cast<double>(n);
    const auto tr = mild_solution(sys, x0, y0, ts, SolverOptions::for_system(sys));
    const auto lam = sys.gen_A().eigenvalues();
    const double dt = T / static_cast<double>(n);
    std::vector<Vec> F(n + 1);
    for (std::size_t q = 0; q <= n; ++q) F[q] = sys.f()(tr.x_states()[q], tr.y_states()[q]);
    double worst = 0.0;
    for (std::size_t check : {n / 4, n / 2, n}) {
        const double t = ts[check];
        Vec rhs = sys.gen_A().apply(t, x0);
        for (std::size_t i = 0; i < sys.x_dim(); ++i) {
            double acc = 0.0;
            for (std::size_t q = 0; q <= check; ++q) {
                const double w = (q == 0 || q == check) ? 1.0 : (q % 2 ? 4.0 : 2.0);
                acc += w * std::exp(lam[i] * (t - ts[q])) * F[q][i];
            }
            rhs[i] += acc * dt / 3.0;
        }
        worst = std::max(worst, dist2(rhs, tr.x_states()[check]));
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "conjlab-acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    const auto toy = make_builtin("toy-1-1");

    // 1-3: identities, equivariance, norm bounds on the toy system
    {
        const auto t0 = std::chrono::steady_clock::now();
        ConjugacyEngine engine(toy);
        const auto pts = random_points(toy, 100, 2024);
        std::vector<double> grid;
        for (int j = -6; j <= 6; ++j) grid.push_back(0.5 * j);
        VerifyOptions vo;
        vo.equivariance = false;
        vo.exec = Exec::openmp;
        const auto ident = verify_conjugacy(engine, pts, grid, vo);
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report(1, "conjugacy identities (toy, 100 points)",
               ident.max_HG_identity_error <= kIdentityTol && ident.max_GH_identity_error <= kIdentityTol &&
                   elapsed < kRuntimeLimit,
               "max|H(G(v))-v| = " + num(ident.max_HG_identity_error) + ", max|G(H(u))-u| = " +
                   num(ident.max_GH_identity_error) + ", " + num(elapsed) + " s");

        const std::vector<ProductState> eq_pts(pts.begin(), pts.begin() + 20);
        vo.identities = false;
        vo.equivariance = true;
        const auto eq = verify_conjugacy(engine, eq_pts, grid, vo);
        report(2, "equivariance (toy, 20 points, t in [-3, 3])", eq.max_equivariance_error <= kEquivarianceTol,
               "max|H(U(t)) - V(t; H(u0))| = " + num(eq.max_equivariance_error));

        const auto stats = engine.norm_stats();
        const double mh = std::max({ident.max_h_norm, eq.max_h_norm, stats.max_h});
        const double mg = std::max({ident.max_g_norm, eq.max_g_norm, stats.max_g});
        const double bound = 2.0 * toy.k() * toy.f_sup() / toy.alpha();
        report(3, "norm bounds of h and g",
               std::abs(bound - kToyNormBound) <= 1e-15 && mh <= bound + kNormSlack && mg <= bound + kNormSlack,
               "bound " + num(bound) + ", max|h| = " + num(mh) + ", max|g| = " + num(mg) + " over " +
                   std::to_string(stats.h_evals) + " h and " + std::to_string(stats.g_evals) + " g evaluations");
    }

    // 4-5: dichotomy inequalities and the half-axis decay estimate
    {
        auto cfg = base_config("toy-1-1", root);
        cfg.inequality_draws = 200;
        const auto r = run_suite(Suite::inequalities, toy, cfg);
        const double slack = metric(r, "min_conclusion_slack");
        report(4, "dichotomy integral inequality (200 draws, forward and mirrored)",
               r.error.empty() && slack >= kLemmaSlack && metric(r, "max_hypothesis_violation") <= 0.0,
               "min conclusion slack = " + num(slack) + (r.error.empty() ? "" : ", error: " + r.error));
        double fwd = std::nan(""), bwd = std::nan("");
        if (r.metrics.contains("decay")) {
            const auto& d = r.metrics.at("decay");
            if (d.contains("forward_min_slack")) fwd = d.at("forward_min_slack").get<double>();
            if (d.contains("backward_min_slack")) bwd = d.at("backward_min_slack").get<double>();
        }
        report(5, "half-axis decay envelope on t in [0, 5]", fwd >= kDecaySlack && (std::isnan(bwd) || bwd >= kDecaySlack),
               "min slack forward = " + num(fwd) + ", backward = " + num(bwd));
    }

    // 6: regularity
    {
        auto cfg = base_config("toy-1-1", root);
        const auto r = run_suite(Suite::regularity, toy, cfg);
        bool ok = r.error.empty();
        std::string detail;
        if (ok) {
            const auto& m = r.metrics;
            for (double beta : {0.3, 0.5, 1.0}) {
                char key[16];
                std::snprintf(key, sizeof key, "beta_%.1f", beta);
                const double got = m.at("calibration").at(key).get<double>();
                ok = ok && std::abs(got - beta) <= kCalibrationBand;
                detail += std::string(key) + " -> " + num(got) + ", ";
            }
            const auto& H = m.at("H_stable");
            const auto& G = m.at("G_full");
            const double hs = H.at("fitted_exponent").get<double>(), hr = H.at("max_ratio").get<double>();
            const double p1 = H.at("theory_p1").get<double>();
            const double gs = G.at("fitted_exponent").get<double>(), q = G.at("theory_q_tilde").get<double>();
            ok = ok && std::abs(p1 - kToyP1) <= 1e-12 && hs >= kHSlopeLo && hs <= kHSlopeHi &&
                 hr <= p1 * (1.0 + kRatioSlack) && gs >= q - kQBand && gs <= kGSlopeHi + kGSlopeResolution;
            detail += "H slope " + num(hs) + " ratio " + num(hr) + " <= p1 " + num(p1) + ", G slope " +
                      num(gs) + " (q~ " + num(q) + ", ceiling 1 + " + num(kGSlopeResolution) + ")";
        } else {
            detail = r.error;
        }
        report(6, "regularity of H and G", ok, detail);
    }

    // 7: localization
    {
        const auto sys = make_builtin("toy-quadratic-local");
        const auto r = run_suite(Suite::localization, sys, base_config("toy-quadratic-local", root));
        bool ok = r.error.empty();
        std::string detail = r.error;
        if (ok) {
            const auto& m = r.metrics;
            const double quot = m.at("max_lipschitz_quotient").get<double>();
            const double lip = m.at("lipschitz_bound").get<double>();
            const double err = m.at("gate_flip").at("error").get<double>();
            ok = m.at("equal_in_ball").get<bool>() && m.at("vanishes_outside").get<bool>() &&
                 quot <= lip * (1.0 + kLipSlack) && err <= kBracketTol && m.at("bump_ok").get<bool>();
            detail = "equal in ball " + std::string(m.at("equal_in_ball").get<bool>() ? "yes" : "no") +
                     ", zero beyond sqrt2*delta " + (m.at("vanishes_outside").get<bool>() ? "yes" : "no") +
                     ", Lipschitz quotient " + num(quot) + " <= " + num(lip) + ", gate flip error " + num(err);
        }
        report(7, "localized nonlinearity and gate", ok, detail);
    }

    // 8: heat application
    {
        const auto heat = make_builtin("heat-8");
        auto cfg = base_config("heat-8", root);
        cfg.identity_samples = 20;
        cfg.equivariance_samples = 5;
        const auto d = run_suite(Suite::dichotomy, heat, cfg);
        const auto c = run_suite(Suite::conjugacy, heat, cfg);
        const double res = heat_residual(heat);
        const bool ok = std::abs(heat.f_lip() - kHeatLip) <= 1e-15 && heat.gap_holds() && d.passed && c.passed &&
                        metric(c, "max_equivariance_error") <= kEquivarianceTol && res <= kResidualTol;
        report(8, "heat-8 application",
               ok, "f_lip = " + num(heat.f_lip()) + ", dichotomy " + (d.passed ? "pass" : "fail") +
                       ", identities " + num(std::max(metric(c, "max_HG_identity_error"), metric(c, "max_GH_identity_error"))) +
                       ", equivariance " + num(metric(c, "max_equivariance_error")) +
                       ", variation-of-constants residual " + num(res) + (c.error.empty() ? "" : ", error: " + c.error));
    }

    // 9: f = 0 gives identity conjugacies across every suite
    {
        bool ok = true;
        std::string detail;
        for (const std::string name : {"toy-zero", "heat-8-zero"}) {
            auto cfg = base_config(name, root);
            cfg.suites = all_suites();
            cfg.identity_samples = 20;
            cfg.equivariance_samples = 5;
            const auto r = run(cfg);
            double worst = 0.0;
            for (const auto& s : r.suites) {
                if (s.name != "conjugacy") continue;
                for (const char* k : {"max_HG_identity_error", "max_GH_identity_error", "max_equivariance_error",
                                      "max_h_norm", "max_g_norm"}) {
                    worst = std::max(worst, metric(s, k));
                }
            }
            ok = ok && r.passed && worst <= kRounding;
            detail += name + (r.passed ? " all suites pass" : " suite failure") + ", max defect " + num(worst) + "; ";
        }
        report(9, "triviality chain", ok, detail);
    }

    return failures == 0 ? 0 : 1;
}
