#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "conjlab/conjugacy.hpp"
#include "conjlab/errors.hpp"
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

std::vector<ProductState> samples(const SemilinearSystem& sys, std::size_t n, std::uint64_t seed) {
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

}  // namespace

TEST_CASE("constant forcing: h = -c and g = c") {
    // A = -1 is stable: h = -int_{-inf}^0 e^{s} c ds = -c and w = c solves the fixed point.
    const double c = 0.2;
    ConjugacyEngine e(scalar_constant(c));
    const double tail = e.options().tail_tol;
    CHECK(e.compute_h(Vec{0.3}, Vec{0.1})[0] == Approx(-c).margin(tail));
    CHECK(e.compute_g(Vec{0.3}, Vec{0.1})[0] == Approx(c).margin(tail));
}

TEST_CASE("zero nonlinearity: H and G are the identity") {
    ConjugacyEngine e(make_builtin("toy-zero"));
    const auto s = samples(e.system(), 10, 2);
    for (const auto& u : s) {
        const auto h = e.H_map(u);
        const auto g = e.G_map(u);
        CHECK(h.x == u.x);
        CHECK(h.y == u.y);
        CHECK(g.x == u.x);
    }
    std::vector<double> grid = {-1.0, 0.0, 1.0};
    const auto rep = verify_conjugacy(e, s, grid);
    CHECK(rep.max_HG_identity_error == 0.0);
    CHECK(rep.max_GH_identity_error == 0.0);
    CHECK(rep.max_equivariance_error <= 1e-12);
}

TEST_CASE("gate violation is a precondition error naming the inequality") {
    try {
        ConjugacyEngine e(make_builtin("toy-gate-violation"));
        FAIL("engine accepted a system violating the gap condition");
    } catch (const PreconditionError& err) {
        CHECK(std::string(err.what()).find("4k|f|_Lip/alpha < 1") != std::string::npos);
    }
}

TEST_CASE("toy identities, norms and equivariance") {
    ConjugacyEngine e(make_builtin("toy-1-1"));
    const auto s = samples(e.system(), 12, 7);
    std::vector<double> grid;
    for (int j = -6; j <= 6; ++j) grid.push_back(0.5 * j);
    const auto rep = verify_conjugacy(e, s, grid);
    CHECK(rep.max_HG_identity_error <= 1e-6);
    CHECK(rep.max_GH_identity_error <= 1e-6);
    CHECK(rep.max_equivariance_error <= 1e-5);
    CHECK(e.norm_bound() == Approx(0.2));
    CHECK(rep.max_h_norm <= e.norm_bound() + 1e-8);
    CHECK(rep.max_g_norm <= e.norm_bound() + 1e-8);
    for (const auto& u : s) CHECK(e.H_map(u).y == u.y);
}

TEST_CASE("serial and OpenMP verification agree") {
    const auto sys = make_builtin("toy-2-2");
    ConjugacyEngine a(sys), b(sys);
    const auto s = samples(sys, 6, 8);
    std::vector<double> grid = {-1.0, 0.0, 1.0};
    VerifyOptions vs, vp;
    vs.exec = Exec::serial;
    vp.exec = Exec::openmp;
    const auto rs = verify_conjugacy(a, s, grid, vs);
    const auto rp = verify_conjugacy(b, s, grid, vp);
    CHECK(rs.max_HG_identity_error == rp.max_HG_identity_error);
    CHECK(rs.max_equivariance_error == rp.max_equivariance_error);
}

TEST_CASE("g uniqueness and geometric Picard decay") {
    ConjugacyEngine e(make_builtin("toy-1-1"));
    const Vec xi = {0.4, -0.3}, eta = {0.2};
    const auto a = e.solve_g(xi, eta);
    const auto b = e.solve_g(xi, eta, Vec{0.15, -0.15});
    CHECK(dist2(a.g, b.g) <= 10.0 * e.options().picard_tol);
    REQUIRE(a.residuals.size() >= 6);
    const double q = e.system().contraction_factor();
    CHECK(q < 0.5);
    for (std::size_t i = a.residuals.size() - 5; i < a.residuals.size(); ++i) {
        CHECK(a.residuals[i] <= a.residuals[i - 1] * 0.5);
    }
}

TEST_CASE("difference equation along a solution has only the zero bounded solution") {
    // z = int G_A(t - s) [f(U + z) - f(U)] ds started from z = 0.05 converges to 0.
    const auto sys = make_builtin("toy-1-1");
    const auto grid = PanelGrid::around_origin(12.0, 12.0, 0.01);
    const std::size_t n = sys.x_dim(), N = grid.nodes();
    std::vector<double> w(N * n, 0.05), F(N * n), out(N * n);
    const auto traj = linear_flow(sys, Vec{0.5, -0.5}, Vec{0.3}, std::vector<double>{0.0});
    double sup = 1.0;
    for (int it = 0; it < 60 && sup > 1e-13; ++it) {
        for (std::size_t q = 0; q < N; ++q) {
            const double t = grid.time(q);
            const auto x = sys.gen_A().apply(t, traj.x_states()[0]);
            const auto y = sys.gen_B().apply(t, traj.y_states()[0]);
            Vec xz = x;
            for (std::size_t i = 0; i < n; ++i) xz[i] += w[q * n + i];
            const auto a = sys.f()(xz, y);
            const auto b = sys.f()(x, y);
            for (std::size_t i = 0; i < n; ++i) F[q * n + i] = a[i] - b[i];
        }
        green_sweep(sys.gen_A(), sys.dichotomy(), grid, F, out);
        sup = 0.0;
        for (double v : out) sup = std::max(sup, std::abs(v));
        w = out;
    }
    CHECK(sup <= 1e-12);
}
