#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "conjlab/errors.hpp"
#include "conjlab/flows.hpp"
#include "conjlab/io.hpp"
#include "conjlab/systems.hpp"

using namespace conjlab;
using Catch::Approx;

namespace {

SemilinearSystem scalar_constant(double c) {
    SemilinearSystem::Parts p;
    p.name = "scalar-constant";
    p.gen_A = SpectralGenerator({-1.0});
    p.dichotomy_A = DichotomySpec(1, {0}, 1.0, 1.0);
    p.gen_B = SpectralGenerator({0.0});
    p.y_stable = {0};
    p.f = make_constant_nonlinearity({c}, 1);
    return SemilinearSystem(std::move(p));
}

std::vector<double> grid(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    v[n - 1] = b;
    return v;
}

// Classical RK4 on the full system, fixed step.
Vec rk4(const SemilinearSystem& sys, Vec x, Vec y, double T, double dt) {
    const auto la = sys.gen_A().eigenvalues();
    const auto lb = sys.gen_B().eigenvalues();
    auto rhs = [&](const Vec& u, const Vec& v, Vec& du, Vec& dv) {
        const auto f = sys.f()(u, v);
        du.resize(u.size());
        dv.resize(v.size());
        for (std::size_t i = 0; i < u.size(); ++i) du[i] = la[i] * u[i] + f[i];
        for (std::size_t j = 0; j < v.size(); ++j) dv[j] = lb[j] * v[j];
    };
    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    Vec k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y, tx(x.size()), ty(y.size());
    for (std::size_t s = 0; s < steps; ++s) {
        rhs(x, y, k1x, k1y);
        for (std::size_t i = 0; i < x.size(); ++i) tx[i] = x[i] + 0.5 * dt * k1x[i];
        for (std::size_t j = 0; j < y.size(); ++j) ty[j] = y[j] + 0.5 * dt * k1y[j];
        rhs(tx, ty, k2x, k2y);
        for (std::size_t i = 0; i < x.size(); ++i) tx[i] = x[i] + 0.5 * dt * k2x[i];
        for (std::size_t j = 0; j < y.size(); ++j) ty[j] = y[j] + 0.5 * dt * k2y[j];
        rhs(tx, ty, k3x, k3y);
        for (std::size_t i = 0; i < x.size(); ++i) tx[i] = x[i] + dt * k3x[i];
        for (std::size_t j = 0; j < y.size(); ++j) ty[j] = y[j] + dt * k3y[j];
        rhs(tx, ty, k4x, k4y);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dt / 6.0 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]);
        for (std::size_t j = 0; j < y.size(); ++j) y[j] += dt / 6.0 * (k1y[j] + 2 * k2y[j] + 2 * k3y[j] + k4y[j]);
    }
    return x;
}

}  // namespace

TEST_CASE("linear case: mild solution equals the linear flow") {
    ToyConfig tc;
    tc.f = {{"kind", "zero"}};
    const auto sys = make_toy(tc);
    const auto ts = grid(-2.0, 3.0, 11);
    const Vec x0 = {0.7, -0.4}, y0 = {1.3};
    const auto m = mild_solution(sys, x0, y0, ts, SolverOptions::for_system(sys));
    const auto l = linear_flow(sys, x0, y0, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(dist2(m.x_states()[i], l.x_states()[i]) <= 1e-12 * (1.0 + norm2(l.x_states()[i])));
        CHECK(m.y_states()[i] == l.y_states()[i]);
    }
}

TEST_CASE("scalar constant forcing: closed form") {
    const double c = 0.3, u10 = 0.8;
    const auto sys = scalar_constant(c);
    const auto ts = grid(0.0, 4.0, 9);
    const auto tr = mild_solution(sys, Vec{u10}, Vec{0.5}, ts, SolverOptions::for_system(sys));
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i];
        CHECK(tr.x_states()[i][0] == Approx(std::exp(-t) * u10 + c * (1.0 - std::exp(-t))).margin(1e-12));
        CHECK(tr.y_states()[i][0] == 0.5);
    }
}

TEST_CASE("mild solution needs t = 0 in the grid") {
    const auto sys = scalar_constant(0.1);
    const std::vector<double> ts = {0.5, 1.0};
    CHECK_THROWS_AS(mild_solution(sys, Vec{0.0}, Vec{0.0}, ts, SolverOptions{}), InputError);
}

TEST_CASE("linear flow values") {
    const auto sys = scalar_constant(0.0);
    const std::vector<double> ts = {0.0, 2.0};
    const auto l = linear_flow(sys, Vec{1.0}, Vec{2.0}, ts);
    CHECK(l.x_states()[0][0] == 1.0);
    CHECK(l.x_states()[1][0] == Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(l.y_states()[1][0] == 2.0);
}

TEST_CASE("heat-8 mild solution matches an RK4 reference") {
    const auto sys = make_builtin("heat-8");
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Vec x0(sys.x_dim()), y0(sys.y_dim());
    for (double& v : x0) v = U(rng);
    for (double& v : y0) v = U(rng);
    const std::vector<double> ts = {0.0, 0.5, 1.0};
    const auto tr = mild_solution(sys, x0, y0, ts, SolverOptions::for_system(sys));
    const auto ref_half = rk4(sys, x0, y0, 0.5, 1e-4);
    const auto ref_one = rk4(sys, x0, y0, 1.0, 1e-4);
    CHECK(dist2(tr.x_states()[1], ref_half) <= 1e-6);
    CHECK(dist2(tr.x_states()[2], ref_one) <= 1e-6);
}

TEST_CASE("heat-8 variation of constants residual") {
    const auto sys = make_builtin("heat-8");
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Vec x0(sys.x_dim()), y0(sys.y_dim());
    for (double& v : x0) v = U(rng);
    for (double& v : y0) v = U(rng);
    // Composite Simpson on a 2e-5 grid of the computed solution, exact exponentials.
    const double T = 0.6;
    const std::size_t n = 30000;
    const auto ts = grid(0.0, T, n + 1);
    const auto tr = mild_solution(sys, x0, y0, ts, SolverOptions::for_system(sys));
    const auto lam = sys.gen_A().eigenvalues();
    const double dt = T / static_cast<double>(n);
    double worst = 0.0;
    for (std::size_t check : {n / 2, n}) {
        const double t = ts[check];
        Vec rhs = sys.gen_A().apply(t, x0);
        for (std::size_t i = 0; i < sys.x_dim(); ++i) {
            double acc = 0.0;
            for (std::size_t q = 0; q <= check; ++q) {
                const double w = (q == 0 || q == check) ? 1.0 : (q % 2 ? 4.0 : 2.0);
                const double s = ts[q];
                const double fi = sys.f()(tr.x_states()[q], tr.y_states()[q])[i];
                acc += w * std::exp(lam[i] * (t - s)) * fi;
            }
            rhs[i] += acc * dt / 3.0;
        }
        worst = std::max(worst, dist2(rhs, tr.x_states()[check]));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("half-axis bounded solution matches shooting") {
    const auto sys = make_builtin("toy-1-1");
    const Vec xi = {0.6, 0.0};
    const Vec eta = {0.4};
    HalfAxisOptions ho;
    ho.solver = SolverOptions::for_system(sys);
    const auto tr = bounded_solution_halfaxis(sys, xi, eta, HalfAxis::forward, 1.0, ho);
    const std::size_t i0 = tr.index_of(0.0);
    const double unstable0 = tr.x_states()[i0][1];

    // Shooting: choose u(0) on the unstable coordinate so that the forward solution stays bounded.
    const std::vector<double> ts = {0.0, 14.0};
    auto end_sign = [&](double c) {
        const auto m = mild_solution(sys, Vec{xi[0], c}, eta, ts, SolverOptions::for_system(sys));
        return m.x_states()[1][1] > 0.0;
    };
    double lo = -1.0, hi = 1.0;
    REQUIRE_FALSE(end_sign(lo));
    REQUIRE(end_sign(hi));
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (end_sign(mid) ? hi : lo) = mid;
    }
    CHECK(unstable0 == Approx(0.5 * (lo + hi)).margin(1e-7));
    CHECK(tr.x_states()[i0][0] == Approx(xi[0]).margin(1e-14));

    // bound k|xi| + M_B|eta| + 2k f_sup / alpha
    const double bound = sys.k() * norm2(xi) + sys.m_b_halfaxis(Side::stable) * norm2(eta) +
                         2.0 * sys.k() * sys.f_sup() / sys.alpha();
    for (std::size_t i = 0; i < tr.size(); ++i) {
        CHECK(norm2(tr.x_states()[i]) + norm2(tr.y_states()[i]) <= bound + 1e-10);
    }
}

TEST_CASE("half-axis with f = 0 decays exponentially") {
    const auto sys = make_builtin("toy-zero");
    HalfAxisOptions ho;
    ho.solver = SolverOptions::for_system(sys);
    const auto tr = bounded_solution_halfaxis(sys, Vec{1.0, 0.0}, Vec{0.0}, HalfAxis::forward, 3.0, ho);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double t = tr.times()[i];
        CHECK(tr.x_states()[i][0] == Approx(std::exp(-t)).epsilon(1e-13));
        CHECK(tr.x_states()[i][1] == 0.0);
    }
}

TEST_CASE("half-axis preconditions") {
    const auto sys = make_builtin("toy-1-1");
    HalfAxisOptions ho;
    CHECK_THROWS_AS(bounded_solution_halfaxis(sys, Vec{0.0, 1.0}, Vec{0.0}, HalfAxis::forward, 1.0, ho),
                    InputError);
    ToyConfig tc;
    tc.f = {{"kind", "ridge_tanh"}, {"scale", 0.6}};
    const auto strong = make_toy(tc);
    CHECK_THROWS_AS(bounded_solution_halfaxis(strong, Vec{1.0, 0.0}, Vec{0.0}, HalfAxis::forward, 1.0, ho),
                    PreconditionError);
}

TEST_CASE("Lemma 3.1 sanity: linear trajectories are unbounded on one side") {
    const auto sys = make_builtin("toy-2-2");
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double T = 10.0;
    for (int s = 0; s < 50; ++s) {
        Vec x(sys.x_dim());
        for (double& v : x) v = U(rng);
        const double lim = sys.k() * norm2(x) * std::exp(sys.alpha() * T / 2.0);
        const double side = std::max(norm2(sys.gen_A().apply(T, x)), norm2(sys.gen_A().apply(-T, x)));
        CHECK(side > lim);
    }
}

TEST_CASE("trajectory CSV and JSON bundle") {
    const auto sys = make_builtin("toy-1-1");
    const std::vector<double> ts = {0.0, 0.5, 1.0};
    const auto tr = mild_solution(sys, Vec{0.1, 0.2}, Vec{0.3}, ts, SolverOptions::for_system(sys));
    const auto table = trajectory_table(tr);
    CHECK(table.header() == std::vector<std::string>{"t", "x_0", "x_1", "y_0"});
    CHECK(table.rows() == 3);
    const auto j = trajectory_bundle(tr, sys, SolverOptions::for_system(sys));
    CHECK(j.at("system_hash") == sys.hash());
    CHECK(j.contains("picard_iterations"));
}
