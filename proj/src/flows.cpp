#include "conjlab/flows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <utility>

#include "conjlab/errors.hpp"

namespace conjlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |a - b| with inf - inf treated as agreement.
inline double diff(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b);
}

bool sorted_unique(std::span<const double> t) {
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) return false;
    }
    return true;
}

}  // namespace

SemilinearSystem::SemilinearSystem(Parts parts) : p_(std::move(parts)) {
    const std::size_t nx = p_.gen_A.dimension();
    const std::size_t ny = p_.gen_B.dimension();
    if (nx == 0) throw InputError("SemilinearSystem: empty X block");
    if (p_.dichotomy_A.dimension() != nx) {
        throw InputError("SemilinearSystem: dichotomy dimension does not match A");
    }
    if (p_.f.x_dim() != nx || p_.f.y_dim() != ny) {
        throw InputError("SemilinearSystem: nonlinearity dimensions do not match the generators");
    }
    std::sort(p_.y_stable.begin(), p_.y_stable.end());
    for (std::size_t j : p_.y_stable) {
        if (j >= ny) throw InputError("SemilinearSystem: y_stable index out of range");
    }
    if (std::adjacent_find(p_.y_stable.begin(), p_.y_stable.end()) != p_.y_stable.end()) {
        throw InputError("SemilinearSystem: repeated y_stable index");
    }
    growth_ = GrowthBounds::from_generators(p_.gen_A, p_.gen_B);
}

std::vector<std::size_t> SemilinearSystem::y_unstable() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < y_dim(); ++j) {
        if (!std::binary_search(p_.y_stable.begin(), p_.y_stable.end(), j)) out.push_back(j);
    }
    return out;
}

double SemilinearSystem::gap_value() const noexcept {
    if (p_.gate == GateRule::unit_normalized) return f_lip();
    return 4.0 * k() * f_lip() / alpha();
}

std::string SemilinearSystem::gap_inequality() const {
    char buf[160];
    if (p_.gate == GateRule::unit_normalized) {
        std::snprintf(buf, sizeof buf, "|f|_Lip < 1 (normalized 4k/alpha = 1): |f|_Lip = %.6g", f_lip());
    } else {
        std::snprintf(buf, sizeof buf, "4k|f|_Lip/alpha < 1: 4*%.6g*%.6g/%.6g = %.6g", k(), f_lip(),
                      alpha(), gap_value());
    }
    return buf;
}

double SemilinearSystem::contraction_factor() const noexcept {
    return p_.dichotomy_A.kernel_mass() * f_lip();
}

double SemilinearSystem::m_b_halfaxis(Side side) const noexcept {
    const auto ev = p_.gen_B.eigenvalues();
    if (side == Side::stable) {
        for (std::size_t j : p_.y_stable) {
            if (ev[j] > 0.0) return kInf;
        }
        return 1.0;
    }
    for (std::size_t j : y_unstable()) {
        if (ev[j] < 0.0) return kInf;
    }
    return 1.0;
}

double SemilinearSystem::m_b() const noexcept {
    return std::max(m_b_halfaxis(Side::stable), m_b_halfaxis(Side::unstable));
}

Vec SemilinearSystem::project_y(std::span<const double> y, Side side) const {
    if (y.size() != y_dim()) throw InputError("project_y: dimension mismatch");
    Vec out(y.size(), 0.0);
    const auto idx = side == Side::stable ? p_.y_stable : y_unstable();
    for (std::size_t j : idx) out[j] = y[j];
    return out;
}

nlohmann::json SemilinearSystem::describe() const {
    nlohmann::json j;
    j["name"] = p_.name;
    j["A"] = {{"eigenvalues", Vec(p_.gen_A.eigenvalues().begin(), p_.gen_A.eigenvalues().end())},
              {"stable_indices", p_.dichotomy_A.stable_indices()},
              {"k", k()},
              {"alpha", alpha()}};
    j["B"] = {{"eigenvalues", Vec(p_.gen_B.eigenvalues().begin(), p_.gen_B.eigenvalues().end())},
              {"stable_indices", p_.y_stable}};
    j["f"] = p_.f.describe();
    j["f_sup"] = std::isfinite(f_sup()) ? nlohmann::json(f_sup()) : nlohmann::json("inf");
    j["f_lip"] = std::isfinite(f_lip()) ? nlohmann::json(f_lip()) : nlohmann::json("inf");
    j["gate"] = p_.gate == GateRule::unit_normalized ? "unit_normalized" : "spectral_gap";
    j["localized"] = p_.localized;
    j["backward_well_posed"] = p_.backward_well_posed;
    return j;
}

std::string SemilinearSystem::hash() const {
    const std::string s = describe().dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SolverOptions SolverOptions::for_system(const SemilinearSystem& sys) {
    SolverOptions o;
    o.max_step = 0.01 / std::max(sys.alpha(), sys.growth().omega_c);
    return o;
}

Trajectory::Trajectory(std::vector<double> times, std::vector<Vec> x_states, std::vector<Vec> y_states)
    : times_(std::move(times)), x_(std::move(x_states)), y_(std::move(y_states)) {
    if (x_.size() != times_.size() || y_.size() != times_.size()) {
        throw InputError("Trajectory: times and states differ in length");
    }
    if (!sorted_unique(times_)) throw InputError("Trajectory: times must be strictly increasing");
}

std::size_t Trajectory::index_of(double t, double tol) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - tol);
    if (it == times_.end() || std::abs(*it - t) > tol) {
        throw InputError("Trajectory: time not on the grid");
    }
    return static_cast<std::size_t>(it - times_.begin());
}

std::size_t march(const SemilinearSystem& sys, double t0, std::span<const double> x0,
                  std::span<const double> y0_at_zero, double h, std::size_t panels,
                  const SolverOptions& opt, const std::function<void(const PanelStages&)>& visit) {
    const std::size_t n = sys.x_dim();
    if (x0.size() != n || y0_at_zero.size() != sys.y_dim()) throw InputError("march: dimension mismatch");
    if (!std::isfinite(h) || h == 0.0) throw InputError("march: panel width must be finite and nonzero");

    std::vector<PanelExp> ex;
    ex.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ex.emplace_back(sys.gen_A().eigenvalue(i), h);

    PanelStages st;
    st.h = h;
    for (auto& v : st.x) v.assign(n, 0.0);
    for (auto& v : st.F) v.assign(n, 0.0);
    for (auto& v : st.y) v.assign(sys.y_dim(), 0.0);
    st.x[0].assign(x0.begin(), x0.end());

    Vec prev_m(n), prev_e(n);
    std::size_t total = 0;
    std::vector<double> history;
    for (std::size_t p = 0; p < panels; ++p) {
        st.t0 = t0 + h * static_cast<double>(p);
        for (int s = 0; s < 3; ++s) {
            std::copy(y0_at_zero.begin(), y0_at_zero.end(), st.y[s].begin());
            sys.gen_B().apply_inplace(st.t0 + 0.5 * h * s, st.y[s]);
        }
        sys.f().evaluate(st.x[0], st.y[0], st.F[0]);
        // start from the linear flow with frozen forcing
        for (std::size_t i = 0; i < n; ++i) {
            st.x[1][i] = duhamel_mid(ex[i], h, st.x[0][i], st.F[0][i], st.F[0][i], st.F[0][i]);
            st.x[2][i] = duhamel_end(ex[i], h, st.x[0][i], st.F[0][i], st.F[0][i], st.F[0][i]);
        }
        bool converged = sys.f().is_zero();
        history.clear();
        for (std::size_t it = 0; it < opt.local_max_iter && !converged; ++it) {
            ++total;
            sys.f().evaluate(st.x[1], st.y[1], st.F[1]);
            sys.f().evaluate(st.x[2], st.y[2], st.F[2]);
            prev_m = st.x[1];
            prev_e = st.x[2];
            double change = 0.0, scale = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double f0 = st.F[0][i], fm = st.F[1][i], fe = st.F[2][i];
                st.x[1][i] = duhamel_mid(ex[i], h, st.x[0][i], f0, fm, fe);
                st.x[2][i] = duhamel_end(ex[i], h, st.x[0][i], f0, fm, fe);
                change = std::max({change, diff(st.x[1][i], prev_m[i]), diff(st.x[2][i], prev_e[i])});
                if (std::isfinite(st.x[2][i])) scale = std::max(scale, std::abs(st.x[2][i]));
            }
            if (std::isnan(change)) {
                history.push_back(change);
                throw ConvergenceError("march: NaN in panel solve", history);
            }
            history.push_back(change);
            converged = change <= opt.local_tol * scale;
        }
        if (!converged) {
            throw ConvergenceError("march: panel Picard iteration did not converge at t = " +
                                       std::to_string(st.t0),
                                   history);
        }
        sys.f().evaluate(st.x[1], st.y[1], st.F[1]);
        sys.f().evaluate(st.x[2], st.y[2], st.F[2]);
        if (visit) visit(st);
        st.x[0] = st.x[2];
    }
    return total;
}

namespace {

// Marches from t = 0 through the requested times on one side (sign = +1 or -1),
// writing x at each requested time into out (same order as `targets`).
std::size_t march_through(const SemilinearSystem& sys, std::span<const double> u10,
                          std::span<const double> u20, const std::vector<double>& targets,
                          const SolverOptions& opt, std::vector<Vec>& out) {
    std::size_t iters = 0;
    Vec x(u10.begin(), u10.end());
    double t = 0.0;
    for (double target : targets) {
        const double span = target - t;
        if (span != 0.0) {
            const auto panels =
                static_cast<std::size_t>(std::ceil(std::abs(span) / opt.max_step - 1e-9));
            const double h = span / static_cast<double>(std::max<std::size_t>(panels, 1));
            iters += march(sys, t, x, u20, h, std::max<std::size_t>(panels, 1), opt,
                           [&](const PanelStages& st) { x = st.x[2]; });
        }
        out.push_back(x);
        t = target;
    }
    return iters;
}

}  // namespace

Trajectory mild_solution(const SemilinearSystem& sys, std::span<const double> u10,
                         std::span<const double> u20, std::span<const double> times,
                         const SolverOptions& opt) {
    if (u10.size() != sys.x_dim() || u20.size() != sys.y_dim()) {
        throw InputError("mild_solution: initial data dimension mismatch");
    }
    if (times.empty() || !sorted_unique(times)) {
        throw InputError("mild_solution: times must be nonempty and strictly increasing");
    }
    for (double t : times) {
        if (!std::isfinite(t)) throw InputError("mild_solution: non-finite time");
    }
    const auto zero = std::find(times.begin(), times.end(), 0.0);
    if (zero == times.end()) throw InputError("mild_solution: time grid must contain 0");
    if (!(opt.max_step > 0.0)) throw InputError("mild_solution: max_step must be > 0");

    const std::vector<double> fwd(zero, times.end());
    std::vector<double> bwd(times.begin(), zero + 1);
    std::reverse(bwd.begin(), bwd.end());

    std::vector<Vec> xs_f, xs_b;
    std::size_t iters = march_through(sys, u10, u20, fwd, opt, xs_f);
    iters += march_through(sys, u10, u20, bwd, opt, xs_b);

    std::vector<Vec> xs;
    xs.reserve(times.size());
    for (std::size_t i = xs_b.size(); i-- > 1;) xs.push_back(std::move(xs_b[i]));
    for (auto& v : xs_f) xs.push_back(std::move(v));

    std::vector<Vec> ys;
    ys.reserve(times.size());
    for (double t : times) ys.push_back(sys.gen_B().apply(t, u20));

    Trajectory tr(std::vector<double>(times.begin(), times.end()), std::move(xs), std::move(ys));
    tr.picard_iterations = iters;
    return tr;
}

Trajectory linear_flow(const SemilinearSystem& sys, std::span<const double> v10,
                       std::span<const double> v20, std::span<const double> times) {
    if (v10.size() != sys.x_dim() || v20.size() != sys.y_dim()) {
        throw InputError("linear_flow: initial data dimension mismatch");
    }
    std::vector<Vec> xs, ys;
    xs.reserve(times.size());
    ys.reserve(times.size());
    for (double t : times) {
        xs.push_back(sys.gen_A().apply(t, v10));
        ys.push_back(sys.gen_B().apply(t, v20));
    }
    return Trajectory(std::vector<double>(times.begin(), times.end()), std::move(xs), std::move(ys));
}

double tail_horizon(double k, double alpha, double f_sup, double tail_tol, double floor) {
    if (!(alpha > 0.0) || !(tail_tol > 0.0)) throw InputError("tail_horizon: alpha and tol must be > 0");
    if (!(f_sup > 0.0)) return floor;
    if (!std::isfinite(f_sup)) throw PreconditionError("tail_horizon: |f|_inf is infinite");
    const double T = std::log(2.0 * k * f_sup / (alpha * tail_tol)) / alpha;
    return std::max(T, floor);
}

Trajectory bounded_solution_halfaxis(const SemilinearSystem& sys, std::span<const double> xi,
                                     std::span<const double> eta, HalfAxis side, double t_out,
                                     const HalfAxisOptions& opt) {
    const std::size_t n = sys.x_dim();
    const std::size_t ny = sys.y_dim();
    if (xi.size() != n || eta.size() != ny) throw InputError("bounded_solution_halfaxis: dimension mismatch");
    if (!(t_out >= 0.0)) throw InputError("bounded_solution_halfaxis: t_out must be >= 0");
    const double varpi = 2.0 * sys.k() * sys.f_lip() / sys.alpha();
    if (!(varpi < 1.0)) {
        throw PreconditionError("bounded_solution_halfaxis requires 2k|f|_Lip/alpha < 1, got " +
                                std::to_string(varpi));
    }
    const Side keep = side == HalfAxis::forward ? Side::stable : Side::unstable;
    for (std::size_t i = 0; i < n; ++i) {
        if ((sys.dichotomy().is_stable(i) != (keep == Side::stable)) && xi[i] != 0.0) {
            throw InputError("bounded_solution_halfaxis: xi must lie in the prescribed subspace");
        }
    }

    double T = opt.horizon > 0.0 ? opt.horizon
                                 : tail_horizon(sys.k(), sys.alpha(), sys.f_sup(), opt.tail_tol);
    T = std::max(T, t_out);
    const double step = opt.solver.max_step;
    PanelGrid grid = side == HalfAxis::forward ? PanelGrid::around_origin(0.0, T, step)
                                               : PanelGrid::around_origin(T, 0.0, step);
    const std::size_t m = grid.nodes();

    std::vector<Vec> ys(m);
    for (std::size_t a = 0; a < m; ++a) ys[a] = sys.gen_B().apply(grid.time(a), eta);

    Vec phi(n * m, 0.0), next(n * m), F(n * m);
    if (!opt.initial_guess.empty()) {
        if (opt.initial_guess.size() != n * m) {
            throw InputError("bounded_solution_halfaxis: initial guess does not match the grid");
        }
        std::copy(opt.initial_guess.begin(), opt.initial_guess.end(), phi.begin());
    }
    // xi enters as the left init of the stable sweep (forward) or the right init
    // of the unstable sweep (backward).
    Vec left_init, right_init;
    if (side == HalfAxis::forward) left_init.assign(xi.begin(), xi.end());
    else right_init.assign(xi.begin(), xi.end());

    std::vector<double> history;
    bool converged = false;
    std::size_t it = 0;
    for (; it < opt.solver.max_iter; ++it) {
        for (std::size_t a = 0; a < m; ++a) {
            sys.f().evaluate(std::span<const double>(phi).subspan(a * n, n), ys[a],
                             std::span<double>(F).subspan(a * n, n));
        }
        green_sweep(sys.gen_A(), sys.dichotomy(), grid, F, next, left_init, right_init);
        double change = 0.0;
        for (std::size_t q = 0; q < n * m; ++q) change = std::max(change, diff(next[q], phi[q]));
        phi.swap(next);
        history.push_back(change);
        if (std::isnan(change)) break;
        if (change < opt.solver.picard_tol) {
            converged = true;
            ++it;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceError("bounded_solution_halfaxis: Picard iteration did not converge", history);
    }

    std::vector<double> times;
    std::vector<Vec> xs, yv;
    for (std::size_t a = 0; a < m; ++a) {
        const double t = grid.time(a);
        if (std::abs(t) > t_out + 1e-12) continue;
        times.push_back(t);
        xs.emplace_back(phi.begin() + static_cast<std::ptrdiff_t>(a * n),
                        phi.begin() + static_cast<std::ptrdiff_t>((a + 1) * n));
        yv.push_back(ys[a]);
    }
    Trajectory tr(std::move(times), std::move(xs), std::move(yv));
    tr.picard_iterations = it;
    tr.last_residual = history.empty() ? 0.0 : history.back();
    return tr;
}

}  // namespace conjlab
