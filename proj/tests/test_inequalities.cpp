#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "conjlab/errors.hpp"
#include "conjlab/inequalities.hpp"

using namespace conjlab;
using Catch::Approx;

TEST_CASE("forward bound closed forms") {
    DichotomyIneqParams p{1.0, 2.0, 0.0, 0.0, 1.5, 10.0};
    for (double t : {0.0, 0.7, 3.0}) {
        CHECK(dichotomy_bound_forward(p, t) == Approx(1.0 + 2.0 * std::exp(-1.5 * t)).epsilon(1e-15));
    }
    DichotomyIneqParams q{1.0, 2.0, 0.2, 0.2, 1.0, 10.0};
    CHECK(dichotomy_bound_forward(q, 0.0) == Approx(5.0).epsilon(1e-14));
    DichotomyIneqParams r{0.0, 2.0, 0.2, 0.3, 1.0, 10.0};
    const double varpi = 0.5, a1 = 1.0 - 0.2 / 0.5;
    CHECK(dichotomy_bound_forward(r, 2.0) == Approx(2.0 * std::exp(-a1 * 2.0) / (1.0 - varpi)).epsilon(1e-14));
}

TEST_CASE("backward bound mirrors the forward one") {
    DichotomyIneqParams p{1.0, 2.0, 0.2, 0.2, 1.0, 10.0};
    DichotomyIneqParams b = p;
    b.s = 10.0;
    CHECK(dichotomy_bound_backward(b, 0.0) == Approx(dichotomy_bound_forward(p, 0.0)));
    CHECK(dichotomy_bound_backward(b, -1.7) == Approx(dichotomy_bound_forward(p, 1.7)).epsilon(1e-15));
    DichotomyIneqParams z{0.3, 1.0, 0.0, 0.0, 2.0, 5.0};
    CHECK(dichotomy_bound_backward(z, -1.0) == Approx(0.3 + std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("regime errors and flags") {
    DichotomyIneqParams p{1.0, 1.0, 0.6, 0.5, 1.0, 5.0};
    CHECK_FALSE(p.in_regime());
    CHECK_THROWS_AS(dichotomy_bound_forward(p, 1.0), RegimeError);
    DichotomyIneqParams f{1.0, 1.0, 0.8, 0.1, 1.0, 5.0};
    CHECK(f.in_regime());
    CHECK(f.alpha1_flagged());
    CHECK(std::isfinite(dichotomy_bound_forward(f, 1.0)));
}

TEST_CASE("forward bound is nonincreasing when alpha1 > 0") {
    DichotomyIneqParams p{0.5, 1.5, 0.1, 0.3, 1.2, 8.0};
    REQUIRE(p.alpha1() > 0.0);
    double prev = dichotomy_bound_forward(p, 0.0);
    for (double t = 0.05; t <= 8.0; t += 0.05) {
        const double v = dichotomy_bound_forward(p, t);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("folding a decaying a1 into a2 never beats the remark form at t = 0") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double alpha = 0.5 + U(rng);
        const double a1bar = U(rng), a2 = U(rng);
        const double a3 = 0.4 * alpha * U(rng), a4 = 0.4 * alpha * U(rng);
        DichotomyIneqParams folded{0.0, a1bar + a2, a3, a4, alpha, 10.0};
        const double remark = (a1bar + a2) / (1.0 - folded.varpi());
        CHECK(dichotomy_bound_forward(folded, 0.0) >= remark * (1.0 - 1e-15));
    }
}

TEST_CASE("Bellman growth bound") {
    GrowthBounds g;
    g.M_c = 2.0;
    g.omega_c = 1.0;
    CHECK(bellman_growth_bound(g, 0.1, 0.4, 0.6, 1.0) == Approx(2.0 * std::exp(1.2)).epsilon(1e-15));
    CHECK(bellman_growth_bound(g, 0.1, 0.4, 0.6, 0.0) == Approx(2.0));
    CHECK(bellman_growth_bound(g, 0.0, 0.5, 0.0, 2.0) == Approx(std::exp(2.0)).epsilon(1e-15));
}

TEST_CASE("checker: trivial and dominating functions") {
    DichotomyIneqParams p{1.0, 0.5, 0.05, 0.05, 1.0, 6.0};
    const auto grid = uniform_grid(p.s, 600);
    const std::vector<double> zero(grid.size(), 0.0);
    const auto r0 = check_implication(grid, zero, p);
    CHECK(r0.hypothesis_holds);
    CHECK(r0.conclusion_holds);
    const std::vector<double> big(grid.size(), 10.0 * (p.a1 + p.a2));
    const auto r1 = check_implication(grid, big, p);
    CHECK_FALSE(r1.hypothesis_holds);
    CHECK(r1.implication_unrefuted());
}

TEST_CASE("extremal function satisfies the hypothesis and the conclusion") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int d = 0; d < 20; ++d) {
        DichotomyIneqParams p;
        p.alpha = 0.5 + 2.0 * U(rng);
        const double tot = 0.9 * p.alpha * U(rng), sp = U(rng);
        p.a3 = tot * sp;
        p.a4 = tot * (1.0 - sp);
        p.a1 = U(rng);
        p.a2 = U(rng);
        p.s = 5.0 + 10.0 * U(rng);
        for (Direction dir : {Direction::forward, Direction::backward}) {
            const auto grid = uniform_grid(p.s, 2000, dir);
            const auto T = synthesize_extremal(grid, p, dir);
            const auto rep = check_implication(grid, T, p, dir, 1e-6, 1e-9);
            CHECK(rep.hypothesis_holds);
            CHECK(rep.min_conclusion_slack >= -1e-9);
        }
    }
}

TEST_CASE("uniform grid endpoints are exact") {
    const auto f = uniform_grid(7.3, 1000);
    CHECK(f.front() == 0.0);
    CHECK(f.back() == 7.3);
    const auto b = uniform_grid(7.3, 1000, Direction::backward);
    CHECK(b.front() == -7.3);
    CHECK(b.back() == 0.0);
}
