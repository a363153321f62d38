#include "conjlab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conjlab/errors.hpp"

namespace conjlab {

namespace {

void require_regime(const DichotomyIneqParams& p) {
    p.validate();
    if (!p.in_regime()) {
        throw RegimeError("dichotomy inequality needs a3 + a4 < alpha, got a3 + a4 = " +
                          std::to_string(p.a3 + p.a4) + ", alpha = " + std::to_string(p.alpha));
    }
}

// Backward problems are the forward problem on the reflected grid.
std::vector<double> forward_grid(std::span<const double> grid, Direction dir) {
    std::vector<double> g(grid.begin(), grid.end());
    if (dir == Direction::backward) {
        std::reverse(g.begin(), g.end());
        for (double& t : g) t = -t;
    }
    return g;
}

std::vector<double> oriented(std::span<const double> v, Direction dir) {
    std::vector<double> out(v.begin(), v.end());
    if (dir == Direction::backward) std::reverse(out.begin(), out.end());
    return out;
}

void check_grid(std::span<const double> g) {
    if (g.size() < 2) throw InputError("inequality grid needs at least two points");
    if (g.front() != 0.0) throw InputError("inequality grid must start (forward) or end (backward) at 0");
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (!(g[i] > g[i - 1])) throw InputError("inequality grid must be strictly monotone");
    }
}

// 1 - e^{-x}(1 + x), series for small x to avoid cancellation
double one_minus_exp_poly(double x) {
    if (x > 0.1) return 1.0 - std::exp(-x) * (1.0 + x);
    double term = 1.0, sum = 0.0;
    for (int n = 1; n <= 12; ++n) {
        term *= -x / n;
        if (n >= 2) sum += term * (n - 1);
    }
    return sum;
}

// Trapezoid rule with exact exponential weights: T is interpolated linearly
// and the kernel integrated in closed form, so constants are integrated exactly.
std::vector<double> rhs_forward(const std::vector<double>& g, std::span<const double> T,
                                const DichotomyIneqParams& p) {
    const std::size_t n = g.size();
    std::vector<double> I3(n, 0.0), I4(n, 0.0), out(n);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double d = g[j + 1] - g[j];
        const double x = p.alpha * d;
        const double e = std::exp(-x);
        const double total = -std::expm1(-x) / p.alpha;
        const double w_far = one_minus_exp_poly(x) / (p.alpha * x);
        const double w_near = total - w_far;
        I3[j + 1] = e * I3[j] + w_far * T[j] + w_near * T[j + 1];
    }
    for (std::size_t j = n - 1; j-- > 0;) {
        const double d = g[j + 1] - g[j];
        const double x = p.alpha * d;
        const double e = std::exp(-x);
        const double total = -std::expm1(-x) / p.alpha;
        const double w_far = one_minus_exp_poly(x) / (p.alpha * x);
        const double w_near = total - w_far;
        I4[j] = e * I4[j + 1] + w_near * T[j] + w_far * T[j + 1];
    }
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = p.a1 + p.a2 * std::exp(-p.alpha * g[j]) + p.a3 * I3[j] + p.a4 * I4[j];
    }
    return out;
}

}  // namespace

void DichotomyIneqParams::validate() const {
    if (!(a1 >= 0.0) || !(a2 >= 0.0) || !(a3 >= 0.0) || !(a4 >= 0.0)) {
        throw InputError("dichotomy inequality constants must be >= 0");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("alpha must be finite and > 0");
    if (!(s > 0.0)) throw InputError("horizon s must be > 0");
}

double dichotomy_bound_forward(const DichotomyIneqParams& p, double t) {
    require_regime(p);
    if (!(t >= 0.0) || t > p.s * (1.0 + 1e-12)) throw InputError("dichotomy_bound_forward: t outside [0, s]");
    return (p.a1 + p.a2 * std::exp(-p.alpha1() * t)) / (1.0 - p.varpi());
}

double dichotomy_bound_backward(const DichotomyIneqParams& p, double t) {
    require_regime(p);
    if (!(t <= 0.0) || t < -p.s * (1.0 + 1e-12)) throw InputError("dichotomy_bound_backward: t outside [s, 0]");
    return (p.a1 + p.a2 * std::exp(p.alpha1() * t)) / (1.0 - p.varpi());
}

double bellman_growth_bound(const GrowthBounds& g, double f_lip, double du, double dv, double t) {
    if (!(t >= 0.0)) throw InputError("bellman_growth_bound: t must be >= 0");
    return g.M_c * (du + dv) * std::exp((g.M_c * f_lip + g.omega_c) * t);
}

std::vector<double> hypothesis_rhs(std::span<const double> grid, std::span<const double> T,
                                   const DichotomyIneqParams& p, Direction dir) {
    p.validate();
    if (T.size() != grid.size()) throw InputError("hypothesis_rhs: T and grid differ in length");
    const auto g = forward_grid(grid, dir);
    check_grid(g);
    const auto Tf = oriented(T, dir);
    return oriented(rhs_forward(g, Tf, p), dir);
}

ImplicationReport check_implication(std::span<const double> grid, std::span<const double> T,
                                    const DichotomyIneqParams& p, Direction dir, double rel_tol,
                                    double conclusion_tol) {
    require_regime(p);
    const auto rhs = hypothesis_rhs(grid, T, p, dir);
    ImplicationReport r;
    r.tolerance = rel_tol * (p.a1 + p.a2);
    r.min_conclusion_slack = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        r.max_hypothesis_violation = std::max(r.max_hypothesis_violation, T[j] - rhs[j]);
        const double bound = dir == Direction::forward ? dichotomy_bound_forward(p, grid[j])
                                                       : dichotomy_bound_backward(p, grid[j]);
        r.min_conclusion_slack = std::min(r.min_conclusion_slack, bound - T[j]);
    }
    r.hypothesis_holds = r.max_hypothesis_violation <= r.tolerance;
    r.conclusion_holds = r.min_conclusion_slack >= -conclusion_tol;
    return r;
}

std::vector<double> synthesize_extremal(std::span<const double> grid, const DichotomyIneqParams& p,
                                        Direction dir, double tol, std::size_t max_iter) {
    require_regime(p);
    const auto g = forward_grid(grid, dir);
    check_grid(g);
    std::vector<double> T(g.size(), 0.0);
    std::vector<double> history;
    for (std::size_t it = 0; it < max_iter; ++it) {
        auto next = rhs_forward(g, T, p);
        double change = 0.0, scale = 1.0;
        for (std::size_t j = 0; j < T.size(); ++j) {
            change = std::max(change, std::abs(next[j] - T[j]));
            scale = std::max(scale, std::abs(next[j]));
        }
        T.swap(next);
        history.push_back(change);
        if (change <= tol * scale) return oriented(T, dir);
    }
    throw ConvergenceError("synthesize_extremal: fixed-point iteration did not converge", history);
}

std::vector<double> uniform_grid(double s, std::size_t n, Direction dir) {
    if (!(s > 0.0) || !std::isfinite(s) || n == 0) throw InputError("uniform_grid: need finite s > 0, n >= 1");
    std::vector<double> g(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const double t = s * static_cast<double>(j) / static_cast<double>(n);
        g[j] = dir == Direction::forward ? t : -s + t;
    }
    if (dir == Direction::backward) g.back() = 0.0;
    else g.back() = s;
    return g;
}

}  // namespace conjlab
