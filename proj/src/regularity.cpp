#include "conjlab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "conjlab/errors.hpp"

namespace conjlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json finite_or_string(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(v > 0 ? "inf" : "-inf");
}

}  // namespace

std::string to_string(Fiber f) {
    switch (f) {
        case Fiber::stable: return "stable";
        case Fiber::unstable: return "unstable";
        case Fiber::full: return "full";
    }
    return "full";
}

Fiber fiber_from_string(const std::string& s) {
    if (s == "stable") return Fiber::stable;
    if (s == "unstable") return Fiber::unstable;
    if (s == "full") return Fiber::full;
    throw InputError("unknown fiber '" + s + "'");
}

double theory_lipschitz_p1(const SemilinearSystem& sys) {
    const double k = sys.k(), a = sys.alpha(), L = sys.f_lip();
    const double varpi = 2.0 * k * L / a;
    if (!(varpi < 1.0)) throw PreconditionError("p1 needs 2k|f|_Lip/alpha < 1");
    const double alpha1 = a - k * L / (1.0 - varpi);
    if (!(alpha1 > 0.0)) throw PreconditionError("p1 needs alpha1 = alpha - k|f|_Lip/(1 - varpi) > 0");
    if (L == 0.0) return 1.0;
    const double first = 2.0 * k * k * L / ((alpha1 + a) * (1.0 - varpi));
    const double second = 2.0 * k * L * sys.m_b() / (a * (1.0 - varpi));
    return 1.0 + std::max(first, second);
}

double theory_holder_exponent(const SemilinearSystem& sys) {
    const auto& g = sys.growth();
    return sys.alpha() / (g.omega_c + g.M_c * sys.f_lip());
}

TheoryConstants theory_constants(const SemilinearSystem& sys) {
    TheoryConstants c;
    const double k = sys.k(), a = sys.alpha(), L = sys.f_lip();
    const auto& g = sys.growth();
    c.varpi = 2.0 * k * L / a;
    c.alpha1 = c.varpi < 1.0 ? a - k * L / (1.0 - c.varpi) : -kInf;
    c.m_b = sys.m_b();
    try {
        c.p1 = theory_lipschitz_p1(sys);
    } catch (const PreconditionError&) {
        c.p1 = kInf;
    }
    c.q_tilde = theory_holder_exponent(sys);
    c.p_lower = g.omega_c > a ? 8.0 * k / a * sys.f_sup() + 4.0 * k * L * g.M_c / (g.omega_c - a) : kInf;
    return c;
}

nlohmann::json TheoryConstants::to_json() const {
    return {{"varpi", finite_or_string(varpi)}, {"alpha1", finite_or_string(alpha1)},
            {"M_B", finite_or_string(m_b)},     {"p1", finite_or_string(p1)},
            {"q_tilde", q_tilde},               {"p_lower_bound", finite_or_string(p_lower)}};
}

double tau2(const SemilinearSystem& sys, double d) {
    return std::log(1.0 / d) / sys.growth().omega_c;
}

double tau1(const SemilinearSystem& sys, double d) {
    const auto& g = sys.growth();
    return std::log(1.0 / d) / (g.omega_c + g.M_c * sys.f_lip());
}

std::vector<double> RegularityConfig::scales() const {
    if (n_scales < 2 || !(scale_hi > scale_lo) || !(scale_lo > 0.0)) {
        throw InputError("RegularityConfig: need n_scales >= 2 and scale_hi > scale_lo > 0");
    }
    std::vector<double> s(n_scales);
    const double lhi = std::log10(scale_hi), llo = std::log10(scale_lo);
    for (std::size_t i = 0; i < n_scales; ++i) {
        s[i] = std::pow(10.0, lhi + (llo - lhi) * static_cast<double>(i) / static_cast<double>(n_scales - 1));
    }
    return s;
}

nlohmann::json RegularityConfig::to_json() const {
    return {{"n_base", n_base},         {"n_scales", n_scales},         {"scale_hi", scale_hi},
            {"scale_lo", scale_lo},     {"n_directions", n_directions}, {"base_radius", base_radius},
            {"noise_floor", noise_floor}, {"seed", seed}};
}

nlohmann::json RegularityEstimate::to_json() const {
    return {{"fitted_exponent", fitted_exponent},
            {"fitted_constant", fitted_constant},
            {"residual_rms", residual_rms},
            {"max_ratio", max_ratio},
            {"max_ray_slope", max_ray_slope},
            {"theory_p1", finite_or_string(theory_p1)},
            {"theory_q_tilde", theory_q_tilde},
            {"fiber", to_string(fiber)},
            {"used", used},
            {"excluded", excluded},
            {"noise_floor", noise_floor}};
}

ProductState sample_direction(const SemilinearSystem& sys, Fiber fiber, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    ProductState d{Vec(sys.x_dim(), 0.0), Vec(sys.y_dim(), 0.0)};
    const auto& spec = sys.dichotomy();
    std::vector<std::size_t> xs, ys;
    if (fiber == Fiber::full) {
        for (std::size_t i = 0; i < sys.x_dim(); ++i) xs.push_back(i);
        for (std::size_t j = 0; j < sys.y_dim(); ++j) ys.push_back(j);
    } else if (fiber == Fiber::stable) {
        xs = spec.stable_indices();
        ys = sys.y_stable();
    } else {
        xs = spec.unstable_indices();
        ys = sys.y_unstable();
    }
    if (xs.empty() && ys.empty()) throw InputError("sample_direction: the " + to_string(fiber) + " fiber is empty");
    double n = 0.0;
    while (n == 0.0) {
        for (std::size_t i : xs) d.x[i] = N(rng);
        for (std::size_t j : ys) d.y[j] = N(rng);
        n = product_norm(d);
    }
    for (double& v : d.x) v /= n;
    for (double& v : d.y) v /= n;
    return d;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw InputError("fit_line: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InputError("fit_line: x values are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        ss += r * r;
    }
    f.rms = std::sqrt(ss / static_cast<double>(n));
    return f;
}

RegularityEstimate estimate_exponent(const PointMap& map, const std::vector<ProductState>& base_points,
                                     const std::vector<ProductState>& directions,
                                     const RegularityConfig& cfg) {
    if (base_points.empty() || directions.empty()) {
        throw InputError("estimate_exponent: need base points and directions");
    }
    const auto scales = cfg.scales();
    if (std::log10(scales.front() / scales.back()) < 3.0 - 1e-9) {
        throw InputError("estimate_exponent: scales must span at least 3 decades");
    }
    const std::size_t nb = base_points.size(), nd = directions.size(), ns = scales.size();
    RegularityEstimate est;
    est.noise_floor = cfg.noise_floor;
    est.rows.resize(nb * nd * ns);

    std::vector<ProductState> images(nb);
    for_each_index(nb, cfg.exec, [&](std::size_t b) { images[b] = map(base_points[b]); });

    for_each_index(nb * nd, cfg.exec, [&](std::size_t r) {
        const std::size_t b = r / nd, d = r % nd;
        const ProductState& u = base_points[b];
        const ProductState& dir = directions[d];
        for (std::size_t s = 0; s < ns; ++s) {
            ProductState v = u;
            for (std::size_t i = 0; i < v.x.size(); ++i) v.x[i] += scales[s] * dir.x[i];
            for (std::size_t j = 0; j < v.y.size(); ++j) v.y[j] += scales[s] * dir.y[j];
            RegularityRow row;
            row.base = b;
            row.direction = d;
            row.scale = scales[s];
            row.d_in = product_dist(v, u);
            row.d_out = product_dist(map(v), images[b]);
            row.used = row.d_out >= cfg.noise_floor && row.d_out > 0.0 && row.d_in > 0.0;
            est.rows[r * ns + s] = row;
        }
    });

    std::vector<double> lx, ly;
    std::vector<double> used_scales;
    for (const auto& row : est.rows) {
        if (!row.used) {
            ++est.excluded;
            continue;
        }
        lx.push_back(std::log(row.d_in));
        ly.push_back(std::log(row.d_out));
        used_scales.push_back(row.scale);
        est.max_ratio = std::max(est.max_ratio, row.d_out / row.d_in);
    }
    est.used = lx.size();
    std::sort(used_scales.begin(), used_scales.end());
    used_scales.erase(std::unique(used_scales.begin(), used_scales.end()), used_scales.end());
    if (used_scales.size() < 2) {
        throw EstimationError("estimate_exponent: fewer than two scales above the noise floor " +
                                  std::to_string(cfg.noise_floor),
                              cfg.noise_floor);
    }
    const LineFit fit = fit_line(lx, ly);
    est.fitted_exponent = fit.slope;
    est.fitted_constant = std::exp(fit.intercept);
    est.residual_rms = fit.rms;

    est.max_ray_slope = -kInf;
    for (std::size_t r = 0; r < nb * nd; ++r) {
        std::vector<double> rx, ry;
        for (std::size_t s = 0; s < ns; ++s) {
            const auto& row = est.rows[r * ns + s];
            if (!row.used) continue;
            rx.push_back(std::log(row.d_in));
            ry.push_back(std::log(row.d_out));
        }
        if (rx.size() >= 2) est.max_ray_slope = std::max(est.max_ray_slope, fit_line(rx, ry).slope);
    }
    return est;
}

RegularityEstimate estimate_exponent(const PointMap& map, const SemilinearSystem& sys, Fiber fiber,
                                     const RegularityConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(-cfg.base_radius, cfg.base_radius);
    std::vector<ProductState> bases(cfg.n_base);
    for (auto& b : bases) {
        b.x.resize(sys.x_dim());
        b.y.resize(sys.y_dim());
        for (double& v : b.x) v = U(rng);
        for (double& v : b.y) v = U(rng);
    }
    std::vector<ProductState> dirs;
    for (std::size_t d = 0; d < cfg.n_directions; ++d) dirs.push_back(sample_direction(sys, fiber, rng()));
    auto est = estimate_exponent(map, bases, dirs, cfg);
    est.fiber = fiber;
    const auto c = theory_constants(sys);
    est.theory_p1 = c.p1;
    est.theory_q_tilde = c.q_tilde;
    return est;
}

}  // namespace conjlab
