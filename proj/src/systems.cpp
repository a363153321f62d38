#include "conjlab/systems.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "conjlab/errors.hpp"

namespace conjlab {

namespace {

// <1, psi_n> on (0, pi) with psi_n = sqrt(2/pi) sin(n x)
Vec constant_mode_weights(std::size_t n_modes) {
    Vec c(n_modes, 0.0);
    for (std::size_t n = 1; n <= n_modes; ++n) {
        if (n % 2 == 1) c[n - 1] = std::sqrt(2.0 / std::numbers::pi) * 2.0 / static_cast<double>(n);
    }
    return c;
}

class HodgkinHuxleyModel final : public Nonlinearity::Model {
public:
    explicit HodgkinHuxleyModel(HodgkinHuxleyConfig cfg)
        : cfg_(std::move(cfg)), c_(constant_mode_weights(cfg_.n_modes)) {
        eq_[0] = cfg_.alpha_n / cfg_.gamma_n;
        eq_[1] = cfg_.alpha_m / cfg_.gamma_m;
        eq_[2] = cfg_.alpha_h / cfg_.gamma_h;
    }

    void eval(std::span<const double> x, std::span<const double> y,
              std::span<double> out) const override {
        const double n = gate(eq_[0] + y[0]);
        const double m = gate(eq_[1] + y[1]);
        const double h = gate(eq_[2] + y[2]);
        const double gk = cfg_.g_k * n * n * n * n;
        const double gna = cfg_.g_Na * m * m * m * h;
        const double src = gk * cfg_.E_k + gna * cfg_.E_Na;
        double r = norm2(x);
        double s = 0.0;  // clamped V = s * x
        Vec dir;
        if (!std::isfinite(r)) {
            // direction of a vector with overflowing entries
            dir.assign(x.size(), 0.0);
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (std::isinf(x[i])) dir[i] = x[i] > 0 ? 1.0 : -1.0;
            }
            const double dn = norm2(dir);
            for (double& d : dir) d *= cfg_.v_clamp / dn;
        } else if (r > 0.0) {
            s = cfg_.v_clamp * std::tanh(r / cfg_.v_clamp) / r;
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double v = dir.empty() ? s * x[i] : dir[i];
            out[i] = -(gk + gna) * v + src * c_[i];
        }
    }

    nlohmann::json describe() const override {
        auto j = cfg_.to_json();
        j["kind"] = "hodgkin_huxley";
        return j;
    }

private:
    double gate(double z) const {
        const double mid = 0.5 * (cfg_.gate_lo + cfg_.gate_hi);
        const double half = 0.5 * (cfg_.gate_hi - cfg_.gate_lo);
        return mid + half * std::tanh((z - mid) / half);
    }

    HodgkinHuxleyConfig cfg_;
    Vec c_;
    double eq_[3];
};

Nonlinearity make_hh_nonlinearity(const HodgkinHuxleyConfig& cfg) {
    const double c = norm2(constant_mode_weights(cfg.n_modes));
    const double hi = cfg.gate_hi;
    const double wk = cfg.v_clamp + std::abs(cfg.E_k) * c;
    const double wna = cfg.v_clamp + std::abs(cfg.E_Na) * c;
    const double g_max = (cfg.g_k + cfg.g_Na) * std::pow(hi, 4);
    const double a[3] = {4.0 * cfg.g_k * std::pow(hi, 3) * wk, 3.0 * cfg.g_Na * std::pow(hi, 3) * wna,
                         cfg.g_Na * std::pow(hi, 3) * wna};
    const double a_norm = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    const double lip = std::max(g_max, a_norm);
    const double sup = std::pow(hi, 4) * (cfg.g_k * wk + cfg.g_Na * wna);
    return Nonlinearity(std::make_shared<HodgkinHuxleyModel>(cfg), cfg.n_modes, 3, sup, lip,
                        cfg.g_k == 0.0 && cfg.g_Na == 0.0);
}

Nonlinearity toy_nonlinearity(const nlohmann::json& f, std::size_t nx, std::size_t ny) {
    if (f.value("kind", "") == "ridge_tanh" && !f.contains("wx")) {
        Vec wx(nx, 0.0), d(nx, 1.0);
        wx[0] = 1.0;
        Vec wy = f.contains("wy") ? f.at("wy").get<Vec>() : Vec(ny, 0.0);
        return make_ridge_tanh(f.at("scale").get<double>(), wx, wy, d);
    }
    return any_nonlinearity_from_json(f, nx, ny);
}

void check_gate(const SemilinearSystem& sys, bool required) {
    if (required && !sys.gap_holds()) {
        throw ConfigurationError("system '" + sys.name() + "' violates the gate " + sys.gap_inequality());
    }
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& v) {
    if (j.contains(key)) v = j.at(key).get<T>();
}

}  // namespace

nlohmann::json HodgkinHuxleyConfig::to_json() const {
    return {{"C", C},           {"r_e", r_e},         {"r_i", r_i},         {"g_k", g_k},
            {"E_k", E_k},       {"g_Na", g_Na},       {"E_Na", E_Na},       {"gamma_n", gamma_n},
            {"gamma_m", gamma_m}, {"gamma_h", gamma_h}, {"alpha_n", alpha_n}, {"alpha_m", alpha_m},
            {"alpha_h", alpha_h}, {"n_modes", n_modes}, {"v_clamp", v_clamp}, {"gate_lo", gate_lo},
            {"gate_hi", gate_hi}};
}

HodgkinHuxleyConfig HodgkinHuxleyConfig::from_json(const nlohmann::json& j) {
    HodgkinHuxleyConfig c;
    read(j, "C", c.C);
    read(j, "r_e", c.r_e);
    read(j, "r_i", c.r_i);
    read(j, "g_k", c.g_k);
    read(j, "E_k", c.E_k);
    read(j, "g_Na", c.g_Na);
    read(j, "E_Na", c.E_Na);
    read(j, "gamma_n", c.gamma_n);
    read(j, "gamma_m", c.gamma_m);
    read(j, "gamma_h", c.gamma_h);
    read(j, "alpha_n", c.alpha_n);
    read(j, "alpha_m", c.alpha_m);
    read(j, "alpha_h", c.alpha_h);
    read(j, "n_modes", c.n_modes);
    read(j, "v_clamp", c.v_clamp);
    read(j, "gate_lo", c.gate_lo);
    read(j, "gate_hi", c.gate_hi);
    read(j, "require_gate", c.require_gate);
    return c;
}

SemilinearSystem make_toy(const ToyConfig& cfg, const std::string& name) {
    const std::size_t nx = cfg.n_stable + cfg.n_unstable;
    if (nx == 0) throw InputError("make_toy: need at least one mode");
    if (!(cfg.alpha > 0.0) || !(cfg.gap_margin >= 0.0)) throw InputError("make_toy: need alpha > 0, margin >= 0");
    Vec ev;
    std::vector<std::size_t> stable;
    for (std::size_t i = 0; i < cfg.n_stable; ++i) {
        stable.push_back(ev.size());
        ev.push_back(-(cfg.alpha + cfg.gap_margin * static_cast<double>(i)));
    }
    for (std::size_t i = 0; i < cfg.n_unstable; ++i) ev.push_back(cfg.alpha + cfg.gap_margin * static_cast<double>(i));

    SemilinearSystem::Parts p;
    p.name = name;
    p.gen_A = SpectralGenerator(ev);
    p.dichotomy_A = DichotomySpec(nx, stable, 1.0, cfg.alpha);
    p.gen_B = SpectralGenerator(cfg.b_eigenvalues);
    p.y_stable = cfg.b_stable;
    p.f = toy_nonlinearity(cfg.f, nx, cfg.b_eigenvalues.size());
    p.config = {{"kind", "toy"},          {"n_stable", cfg.n_stable},         {"n_unstable", cfg.n_unstable},
                {"alpha", cfg.alpha},     {"gap_margin", cfg.gap_margin},     {"b_eigenvalues", cfg.b_eigenvalues},
                {"b_stable", cfg.b_stable}, {"f", cfg.f}};
    SemilinearSystem sys(std::move(p));
    check_gate(sys, cfg.require_gate);
    return sys;
}

SemilinearSystem make_heat(const HeatConfig& cfg, const std::string& name) {
    if (cfg.n_modes == 0) throw InputError("make_heat: n_modes must be >= 1");
    Vec ev(cfg.n_modes);
    std::vector<std::size_t> stable(cfg.n_modes);
    for (std::size_t n = 1; n <= cfg.n_modes; ++n) {
        ev[n - 1] = -static_cast<double>(n * n);
        stable[n - 1] = n - 1;
    }
    SemilinearSystem::Parts p;
    p.name = name;
    p.gen_A = SpectralGenerator(ev);
    p.dichotomy_A = DichotomySpec(cfg.n_modes, stable, 1.0, 1.0);
    p.gen_B = SpectralGenerator(cfg.b_eigenvalues);
    p.y_stable = cfg.b_stable;
    p.f = any_nonlinearity_from_json(cfg.f, cfg.n_modes, cfg.b_eigenvalues.size());
    p.gate = GateRule::unit_normalized;
    p.backward_well_posed = false;
    p.config = {{"kind", "heat"}, {"n_modes", cfg.n_modes}, {"b_eigenvalues", cfg.b_eigenvalues},
                {"b_stable", cfg.b_stable}, {"f", cfg.f}};
    return SemilinearSystem(std::move(p));
}

SemilinearSystem make_hodgkin_huxley(const HodgkinHuxleyConfig& cfg, const std::string& name) {
    if (cfg.n_modes == 0) throw InputError("make_hodgkin_huxley: n_modes must be >= 1");
    if (!(cfg.gate_lo >= 0.0) || !(cfg.gate_hi <= 1.0) || !(cfg.gate_lo < cfg.gate_hi)) {
        throw InputError("make_hodgkin_huxley: gating clamp range must be a subinterval of [0, 1]");
    }
    if (!(cfg.v_clamp > 0.0) || !std::isfinite(cfg.v_clamp)) throw InputError("make_hodgkin_huxley: V clamp must be finite");
    if (!(cfg.C > 0.0) || !(cfg.r_e + cfg.r_i > 0.0)) throw InputError("make_hodgkin_huxley: need C > 0, r_e + r_i > 0");
    for (double g : {cfg.gamma_n, cfg.gamma_m, cfg.gamma_h}) {
        if (g == 0.0) throw InputError("make_hodgkin_huxley: gamma must be nonzero");
    }
    const double D = 1.0 / (cfg.C * (cfg.r_e + cfg.r_i));
    Vec ev(cfg.n_modes);
    std::vector<std::size_t> stable(cfg.n_modes);
    for (std::size_t n = 1; n <= cfg.n_modes; ++n) {
        ev[n - 1] = -D * static_cast<double>(n * n);
        stable[n - 1] = n - 1;
    }
    SemilinearSystem::Parts p;
    p.name = name;
    p.gen_A = SpectralGenerator(ev);
    p.dichotomy_A = DichotomySpec(cfg.n_modes, stable, 1.0, D);
    p.gen_B = SpectralGenerator({cfg.gamma_n, cfg.gamma_m, cfg.gamma_h});
    for (std::size_t j = 0; j < 3; ++j) {
        if (p.gen_B.eigenvalue(j) < 0.0) p.y_stable.push_back(j);
    }
    p.f = make_hh_nonlinearity(cfg);
    p.backward_well_posed = false;
    p.config = cfg.to_json();
    p.config["kind"] = "hodgkin_huxley";
    SemilinearSystem sys(std::move(p));
    check_gate(sys, cfg.require_gate);
    return sys;
}

double hh_pointwise_f(const HodgkinHuxleyConfig& cfg, double V, double n, double m, double h) {
    return -cfg.g_k * std::pow(n, 4) * (V - cfg.E_k) - cfg.g_Na * std::pow(m, 3) * h * (V - cfg.E_Na);
}

Nonlinearity any_nonlinearity_from_json(const nlohmann::json& j, std::size_t x_dim, std::size_t y_dim) {
    const std::string kind = j.value("kind", "");
    if (kind == "localized") {
        const auto base = any_nonlinearity_from_json(j.at("base"), x_dim, y_dim);
        return modify(base, j.at("delta").get<double>(), LocalModulus::from_json(j.at("modulus")));
    }
    if (kind == "hodgkin_huxley") {
        const auto cfg = HodgkinHuxleyConfig::from_json(j);
        if (cfg.n_modes != x_dim || y_dim != 3) {
            throw ConfigurationError("hodgkin_huxley nonlinearity: dimensions do not match the system");
        }
        return make_hh_nonlinearity(cfg);
    }
    return nonlinearity_from_json(j, x_dim, y_dim);
}

SemilinearSystem system_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigurationError("system config must be a JSON object");
    const std::string kind = j.value("kind", "");
    const std::string name = j.value("name", kind);
    SemilinearSystem sys;
    try {
        if (kind == "toy") {
            ToyConfig c;
            read(j, "n_stable", c.n_stable);
            read(j, "n_unstable", c.n_unstable);
            read(j, "alpha", c.alpha);
            read(j, "gap_margin", c.gap_margin);
            read(j, "b_eigenvalues", c.b_eigenvalues);
            read(j, "b_stable", c.b_stable);
            read(j, "require_gate", c.require_gate);
            if (j.contains("f")) c.f = j.at("f");
            sys = make_toy(c, name);
        } else if (kind == "heat") {
            HeatConfig c;
            read(j, "n_modes", c.n_modes);
            read(j, "b_eigenvalues", c.b_eigenvalues);
            read(j, "b_stable", c.b_stable);
            if (j.contains("f")) c.f = j.at("f");
            sys = make_heat(c, name);
        } else if (kind == "hodgkin_huxley") {
            sys = make_hodgkin_huxley(HodgkinHuxleyConfig::from_json(j), name);
        } else if (kind == "custom") {
            const auto& A = j.at("A");
            const auto& B = j.at("B");
            SemilinearSystem::Parts p;
            p.name = name;
            p.gen_A = SpectralGenerator(A.at("eigenvalues").get<Vec>());
            p.dichotomy_A = DichotomySpec(p.gen_A.dimension(), A.at("stable_indices").get<std::vector<std::size_t>>(),
                                          A.value("k", 1.0), A.at("alpha").get<double>());
            p.gen_B = SpectralGenerator(B.at("eigenvalues").get<Vec>());
            p.y_stable = B.value("stable_indices", std::vector<std::size_t>{});
            p.f = any_nonlinearity_from_json(j.at("f"), p.gen_A.dimension(), p.gen_B.dimension());
            const std::string gate = j.value("gate", "spectral_gap");
            if (gate == "unit_normalized") p.gate = GateRule::unit_normalized;
            else if (gate != "spectral_gap") throw ConfigurationError("unknown gate '" + gate + "'");
            p.backward_well_posed = j.value("backward_well_posed", true);
            p.config = j;
            sys = SemilinearSystem(std::move(p));
        } else {
            throw ConfigurationError("unknown system kind '" + kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed system config: ") + e.what());
    }
    if (j.contains("localize")) {
        const auto& l = j.at("localize");
        sys = localize(sys, l.at("delta").get<double>(), LocalModulus::from_json(l.at("modulus")), name);
    }
    return sys;
}

const std::vector<BuiltinInfo>& builtin_systems() {
    static const std::vector<BuiltinInfo> list = [] {
        HodgkinHuxleyConfig scaled;
        scaled.g_k = 0.0036;
        scaled.g_Na = 0.012;
        scaled.E_k = -0.12;
        scaled.E_Na = 1.15;
        scaled.v_clamp = 1.2;
        auto scaled_j = scaled.to_json();
        scaled_j["kind"] = "hodgkin_huxley";
        auto classic_j = HodgkinHuxleyConfig{}.to_json();
        classic_j["kind"] = "hodgkin_huxley";
        return std::vector<BuiltinInfo>{
            {"toy-1-1", "one stable and one unstable mode, 0.1 tanh ridge forcing",
             {{"kind", "toy"}}},
            {"toy-2-2", "two stable and two unstable modes with spread rates",
             {{"kind", "toy"}, {"n_stable", 2}, {"n_unstable", 2}, {"gap_margin", 0.5}}},
            {"toy-zero", "toy-1-1 with f = 0",
             {{"kind", "toy"}, {"f", {{"kind", "zero"}}}}},
            {"toy-gate-violation", "toy-1-1 with forcing 0.3, gate value 1.2",
             {{"kind", "toy"}, {"f", {{"kind", "ridge_tanh"}, {"scale", 0.3}}}}},
            {"toy-quadratic-local", "quadratic forcing localized to delta = 0.005",
             {{"kind", "toy"},
              {"f", {{"kind", "quadratic"}, {"c", 1.0}}},
              {"localize", {{"delta", 0.005}, {"modulus", {{"kind", "quadratic"}, {"c", 1.0}}}}}}},
            {"heat-8", "8-mode Dirichlet heat equation, coordinate tanh forcing 0.5",
             {{"kind", "heat"}, {"n_modes", 8}}},
            {"heat-8-zero", "heat-8 with f = 0",
             {{"kind", "heat"}, {"n_modes", 8}, {"f", {{"kind", "zero"}}}}},
            {"hh-scaled", "Hodgkin-Huxley cable, 4 modes, conductances scaled into the gate", scaled_j},
            {"hh-classic", "Hodgkin-Huxley cable with textbook conductances (fails the gate)", classic_j},
        };
    }();
    return list;
}

bool is_builtin(const std::string& name) {
    for (const auto& b : builtin_systems()) {
        if (b.name == name) return true;
    }
    return false;
}

SemilinearSystem make_builtin(const std::string& name) {
    for (const auto& b : builtin_systems()) {
        if (b.name != name) continue;
        auto cfg = b.config;
        cfg["name"] = name;
        return system_from_json(cfg);
    }
    throw InputError("unknown system '" + name + "'");
}

SemilinearSystem resolve_system(const std::string& ref) {
    if (is_builtin(ref)) return make_builtin(ref);
    std::ifstream in(ref);
    if (!in) throw InputError("unknown system '" + ref + "' (not a built-in and not a readable file)");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError("cannot parse system config '" + ref + "': " + e.what());
    }
    if (j.contains("system") && j.at("system").is_object()) return system_from_json(j.at("system"));
    return system_from_json(j);
}

}  // namespace conjlab
