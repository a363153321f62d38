#include "conjlab/localization.hpp"

#include <algorithm>
#include <cmath>

#include "conjlab/errors.hpp"

namespace conjlab {

namespace {

// 5-point Gauss-Legendre on [-1, 1]
constexpr double kGx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                           0.9061798459386640};
constexpr double kGw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                           0.4786286704993665, 0.2369268850561891};

class LocalizedModel final : public Nonlinearity::Model {
public:
    LocalizedModel(Nonlinearity base, double delta, nlohmann::json modulus)
        : base_(std::move(base)), delta_(delta), modulus_(std::move(modulus)) {}

    void eval(std::span<const double> x, std::span<const double> y,
              std::span<double> out) const override {
        Vec a(x.begin(), x.end()), b(y.begin(), y.end());
        scale(a);
        scale(b);
        base_.evaluate(a, b, out);
    }
    nlohmann::json describe() const override {
        return {{"kind", "localized"}, {"base", base_.describe()}, {"delta", delta_}, {"modulus", modulus_}};
    }

private:
    void scale(Vec& v) const {
        const double n = norm2(v);
        if (!std::isfinite(n)) {
            for (double& e : v) e = 0.0;
            return;
        }
        const double s = bump(n * n / (delta_ * delta_));
        for (double& e : v) e *= s;
    }

    Nonlinearity base_;
    double delta_;
    nlohmann::json modulus_;
};

}  // namespace

BumpProfile::BumpProfile(double sharpness, std::size_t cells) : c_(sharpness) {
    if (!(sharpness > 0.0) || cells < 16) throw InputError("BumpProfile: need sharpness > 0 and >= 16 cells");
    table_.assign(cells + 1, 0.0);
    const double h = 1.0 / static_cast<double>(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const double a = h * static_cast<double>(i);
        double acc = 0.0;
        for (int q = 0; q < 5; ++q) acc += kGw[q] * kernel(a + 0.5 * h * (kGx[q] + 1.0));
        table_[i + 1] = table_[i] + 0.5 * h * acc;
    }
    norm_ = table_.back();
    for (double& v : table_) v /= norm_;
    table_.back() = 1.0;
    max_slope_ = kernel(0.5) / norm_;
    if (max_slope_ > 2.0) {
        throw ConfigurationError("BumpProfile: max |psi'| = " + std::to_string(max_slope_) +
                                 " exceeds 2; the constant 9 in |f_delta|_Lip would not hold");
    }
}

double BumpProfile::kernel(double s) const {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return std::exp(-c_ / (s * (1.0 - s)));
}

double BumpProfile::operator()(double t) const {
    if (!(t >= 0.0)) throw InputError("bump: t must be >= 0");
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    const double s = t - 1.0;
    const std::size_t cells = table_.size() - 1;
    const double h = 1.0 / static_cast<double>(cells);
    const std::size_t i = std::min(cells - 1, static_cast<std::size_t>(s / h));
    const double a = h * static_cast<double>(i);
    const double u = (s - a) / h;
    const double p0 = table_[i], p1 = table_[i + 1];
    const double m0 = kernel(a) / norm_ * h, m1 = kernel(a + h) / norm_ * h;
    const double u2 = u * u, u3 = u2 * u;
    const double Phi = (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * p1 +
                       (u3 - u2) * m1;
    return std::clamp(1.0 - Phi, 0.0, 1.0);
}

double BumpProfile::derivative(double t) const {
    if (!(t >= 0.0)) throw InputError("bump: t must be >= 0");
    return -kernel(t - 1.0) / norm_;
}

const BumpProfile& BumpProfile::standard() {
    static const BumpProfile p;
    return p;
}

double bump(double t) { return BumpProfile::standard()(t); }

LocalModulus LocalModulus::quadratic(double c) {
    if (!(c >= 0.0)) throw InputError("LocalModulus::quadratic: c must be >= 0");
    return {[c](double r1, double r2) { return 2.0 * c * std::max(r1, r2); },
            {{"kind", "quadratic"}, {"c", c}}};
}

LocalModulus LocalModulus::from_json(const nlohmann::json& j) {
    const std::string kind = j.value("kind", "");
    if (kind == "quadratic") return quadratic(j.at("c").get<double>());
    throw ConfigurationError("unknown modulus kind '" + kind + "'");
}

double rescale_radial_derivative(double r, double delta) {
    const double t = r * r / (delta * delta);
    const auto& p = BumpProfile::standard();
    return p(t) + 2.0 * t * p.derivative(t);
}

Nonlinearity modify(const Nonlinearity& f, double delta, const LocalModulus& L) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InputError("modify: delta must be finite and > 0");
    const Vec zx(f.x_dim(), 0.0), zy(f.y_dim(), 0.0);
    if (norm2(f(zx, zy)) != 0.0) throw InputError("modify: f(0, 0) must vanish");
    const double Ld = L(std::sqrt(2.0) * delta, std::sqrt(2.0) * delta);
    return Nonlinearity(std::make_shared<LocalizedModel>(f, delta, L.descriptor), f.x_dim(), f.y_dim(),
                        2.0 * std::sqrt(2.0) * delta * Ld, 9.0 * Ld, f.is_zero());
}

bool local_gate(double k, double alpha, double L_value) {
    if (!(k >= 1.0) || !(alpha > 0.0)) throw InputError("local_gate: need k >= 1 and alpha > 0");
    return 36.0 * k * L_value / alpha < 1.0;
}

bool local_gate(double k, double alpha, const LocalModulus& L, double delta) {
    if (!(delta > 0.0)) throw InputError("local_gate: delta must be > 0");
    return local_gate(k, alpha, L(std::sqrt(2.0) * delta, std::sqrt(2.0) * delta));
}

double gate_flip_delta(double k, double alpha, const LocalModulus& L, double lo, double hi, double tol) {
    if (!local_gate(k, alpha, L, lo) || local_gate(k, alpha, L, hi)) {
        throw InputError("gate_flip_delta: gate must hold at lo and fail at hi");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (local_gate(k, alpha, L, mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

SemilinearSystem localize(const SemilinearSystem& base, double delta, const LocalModulus& L,
                          const std::string& name) {
    SemilinearSystem::Parts p;
    p.name = name.empty() ? base.name() + "-localized" : name;
    p.gen_A = base.gen_A();
    p.dichotomy_A = base.dichotomy();
    p.gen_B = base.gen_B();
    p.y_stable = base.y_stable();
    p.f = modify(base.f(), delta, L);
    p.gate = GateRule::spectral_gap;
    p.backward_well_posed = base.backward_well_posed();
    p.localized = true;
    p.config = base.config();
    p.config["localize"] = {{"delta", delta}, {"modulus", L.descriptor}};
    return SemilinearSystem(std::move(p));
}

}  // namespace conjlab
