#include "conjlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "conjlab/errors.hpp"

namespace conjlab {

namespace {

constexpr double kMinGrowthRate = 1e-12;

void check_dim(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        throw InputError(std::string(what) + ": dimension mismatch (expected " +
                         std::to_string(expected) + ", got " + std::to_string(got) + ")");
    }
}

// e^{lambda t} x without producing NaN from inf * 0 when the exponential
// overflows on a zero coordinate.
inline double scaled_exp(double lambda, double t, double x) {
    if (x == 0.0) return 0.0;
    return std::exp(lambda * t) * x;
}

}  // namespace

SpectralGenerator::SpectralGenerator(Vec eigenvalues) : eigenvalues_(std::move(eigenvalues)) {
    for (double l : eigenvalues_) {
        if (!std::isfinite(l)) throw InputError("SpectralGenerator: eigenvalues must be finite");
    }
}

Vec SpectralGenerator::apply(double t, std::span<const double> x) const {
    Vec out(x.begin(), x.end());
    apply_inplace(t, out);
    return out;
}

void SpectralGenerator::apply_inplace(double t, std::span<double> x) const {
    check_dim(dimension(), x.size(), "semigroup_apply");
    if (!std::isfinite(t)) throw InputError("semigroup_apply: time must be finite");
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = scaled_exp(eigenvalues_[i], t, x[i]);
}

double SpectralGenerator::growth_rate() const noexcept {
    double w = 0.0;
    for (double l : eigenvalues_) w = std::max(w, std::abs(l));
    return std::max(w, kMinGrowthRate);
}

Vec semigroup_apply(const SpectralGenerator& gen, double t, std::span<const double> x) {
    return gen.apply(t, x);
}

DichotomySpec::DichotomySpec(std::size_t dimension, std::vector<std::size_t> stable_indices,
                             double k, double alpha)
    : is_stable_(dimension, 0), k_(k), alpha_(alpha) {
    if (!(k >= 1.0)) throw InputError("DichotomySpec: k must be >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("DichotomySpec: alpha must be > 0");
    for (std::size_t i : stable_indices) {
        if (i >= dimension) throw InputError("DichotomySpec: stable index out of range");
        if (is_stable_[i]) throw InputError("DichotomySpec: duplicate stable index");
        is_stable_[i] = 1;
    }
    for (std::size_t i = 0; i < dimension; ++i) (is_stable_[i] ? stable_ : unstable_).push_back(i);
}

DichotomySpec DichotomySpec::from_spectrum(const SpectralGenerator& gen) {
    std::vector<std::size_t> stable;
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < gen.dimension(); ++i) {
        const double l = gen.eigenvalue(i);
        if (l == 0.0) throw InputError("DichotomySpec::from_spectrum: zero eigenvalue, no dichotomy");
        if (l < 0.0) stable.push_back(i);
        alpha = std::min(alpha, std::abs(l));
    }
    if (gen.dimension() == 0) alpha = 1.0;
    return DichotomySpec(gen.dimension(), std::move(stable), 1.0, alpha);
}

double DichotomySpec::kernel_mass() const noexcept {
    const double sides = (has_stable() ? 1.0 : 0.0) + (has_unstable() ? 1.0 : 0.0);
    return k_ / alpha_ * sides;
}

Vec project(const DichotomySpec& spec, std::span<const double> x, Side side) {
    check_dim(spec.dimension(), x.size(), "project");
    Vec out(x.size(), 0.0);
    const bool want_stable = side == Side::stable;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (spec.is_stable(i) == want_stable) out[i] = x[i];
    }
    return out;
}

Vec green_kernel_apply(const SpectralGenerator& gen, const DichotomySpec& spec, double t,
                       std::span<const double> x) {
    check_dim(gen.dimension(), spec.dimension(), "green_kernel_apply");
    check_dim(gen.dimension(), x.size(), "green_kernel_apply");
    Vec out(x.size(), 0.0);
    const bool forward = t >= 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (spec.is_stable(i) == forward) {
            const double v = scaled_exp(gen.eigenvalue(i), t, x[i]);
            out[i] = forward ? v : -v;
        }
    }
    return out;
}

GrowthBounds GrowthBounds::from_generators(const SpectralGenerator& a, const SpectralGenerator& b) {
    GrowthBounds g;
    g.M_A = 1.0;
    g.M_B = 1.0;
    g.M_c = std::max(g.M_A, g.M_B);
    g.omega_A = a.growth_rate();
    g.omega_B = b.growth_rate();
    g.omega_c = std::max(g.omega_A, g.omega_B);
    return g;
}

DichotomyReport verify_dichotomy(const SpectralGenerator& gen, const DichotomySpec& spec,
                                 std::span<const double> times, const std::vector<Vec>& states,
                                 double tolerance) {
    check_dim(gen.dimension(), spec.dimension(), "verify_dichotomy");
    if (times.empty() || states.empty()) throw InputError("verify_dichotomy: empty sample set");

    DichotomyReport rep;
    rep.tolerance = tolerance;
    const double k = spec.k();
    const double alpha = spec.alpha();
    for (const Vec& x : states) {
        const Vec xp = project(spec, x, Side::stable);
        const Vec xm = project(spec, x, Side::unstable);
        const double np = norm2(xp);
        const double nm = norm2(xm);
        for (double t : times) {
            if (t >= 0.0) {
                const Vec ex = gen.apply(t, x);
                const Vec lhs = project(spec, ex, Side::stable);
                const Vec rhs = gen.apply(t, xp);
                rep.s1_violation = std::max(rep.s1_violation, dist2(lhs, rhs));

                const double bound = k * std::exp(-alpha * t) * np;
                const double excess = norm2(rhs) - bound;
                rep.s2_violation = std::max(rep.s2_violation, excess / std::max(1.0, bound));
            }
            if (t <= 0.0) {
                const double bound = k * std::exp(alpha * t) * nm;
                const double excess = norm2(gen.apply(t, xm)) - bound;
                rep.s4_violation = std::max(rep.s4_violation, excess / std::max(1.0, bound));
            }
            ++rep.samples;
        }
    }
    rep.passed = rep.s1_violation <= tolerance && rep.s2_violation <= tolerance &&
                 rep.s4_violation <= tolerance;
    return rep;
}

nlohmann::json operator_to_json(const SpectralGenerator& gen, const DichotomySpec& spec) {
    return {{"eigenvalues", Vec(gen.eigenvalues().begin(), gen.eigenvalues().end())},
            {"stable_indices", spec.stable_indices()},
            {"k", spec.k()},
            {"alpha", spec.alpha()}};
}

std::pair<SpectralGenerator, DichotomySpec> operator_from_json(const nlohmann::json& j) {
    try {
        SpectralGenerator gen(j.at("eigenvalues").get<Vec>());
        DichotomySpec spec(gen.dimension(), j.at("stable_indices").get<std::vector<std::size_t>>(),
                           j.value("k", 1.0), j.at("alpha").get<double>());
        return {std::move(gen), std::move(spec)};
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed operator JSON: ") + e.what());
    }
}

}  // namespace conjlab
