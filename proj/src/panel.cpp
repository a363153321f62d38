#include "conjlab/panel.hpp"

#include "conjlab/errors.hpp"

namespace conjlab {

PanelGrid PanelGrid::around_origin(double t_back, double t_fwd, double step) {
    if (!(step > 0.0) || !(t_back >= 0.0) || !(t_fwd >= 0.0)) {
        throw InputError("PanelGrid: step must be > 0 and window ends >= 0");
    }
    const auto n_back = static_cast<std::size_t>(std::ceil(t_back / step - 1e-9));
    const auto n_fwd = static_cast<std::size_t>(std::ceil(t_fwd / step - 1e-9));
    PanelGrid g;
    g.h = step;
    g.panels = n_back + n_fwd;
    g.t_left = -step * static_cast<double>(n_back);
    return g;
}

void green_sweep(const SpectralGenerator& gen, const DichotomySpec& spec, const PanelGrid& grid,
                 std::span<const double> forcing, std::span<double> out,
                 std::span<const double> left_init_stable,
                 std::span<const double> right_init_unstable) {
    const std::size_t n = gen.dimension();
    const std::size_t m = grid.nodes();
    if (spec.dimension() != n || forcing.size() != n * m || out.size() != n * m) {
        throw InputError("green_sweep: dimension mismatch");
    }
    if ((!left_init_stable.empty() && left_init_stable.size() != n) ||
        (!right_init_unstable.empty() && right_init_unstable.size() != n)) {
        throw InputError("green_sweep: init vectors must have the state dimension");
    }
    const double h = grid.h;
    const std::size_t P = grid.panels;

    for (std::size_t i : spec.stable_indices()) {
        const PanelExp e(gen.eigenvalue(i), h);
        out[i] = left_init_stable.empty() ? 0.0 : left_init_stable[i];
        for (std::size_t p = 0; p < P; ++p) {
            const std::size_t a = 2 * p;
            const double f0 = forcing[a * n + i];
            const double fm = forcing[(a + 1) * n + i];
            const double fe = forcing[(a + 2) * n + i];
            const double x0 = out[a * n + i];
            out[(a + 1) * n + i] = duhamel_mid(e, h, x0, f0, fm, fe);
            out[(a + 2) * n + i] = duhamel_end(e, h, x0, f0, fm, fe);
        }
    }

    // Backward recursion for J(t) = int_t^b e^{lambda(t-s)} F(s) ds; out = e^{..} init - J.
    for (std::size_t i : spec.unstable_indices()) {
        const double lambda = gen.eigenvalue(i);
        const PanelExp e(lambda, h);
        const double e_back = 1.0 / e.full;           // e^{-lambda h}
        const double e_back_half = e.neg_half;        // e^{-lambda h / 2}
        out[(m - 1) * n + i] = right_init_unstable.empty() ? 0.0 : right_init_unstable[i];
        for (std::size_t q = P; q-- > 0;) {
            const std::size_t a = 2 * q;
            const double f0 = forcing[a * n + i];
            const double fm = forcing[(a + 1) * n + i];
            const double fe = forcing[(a + 2) * n + i];
            const double xe = out[(a + 2) * n + i];
            // g(s) = e^{lambda(t_a - s)} F(s) at s = t_a, t_a + h/2, t_a + h
            const double full = h / 6.0 * (f0 + 4.0 * e_back_half * fm + e_back * fe);
            out[a * n + i] = e_back * xe - full;
            // g(s) = e^{lambda(t_mid - s)} F(s), second half of the panel
            const double second = h / 24.0 * (-e.half * f0 + 8.0 * fm + 5.0 * e_back_half * fe);
            out[(a + 1) * n + i] = e_back_half * xe - second;
        }
    }
}

}  // namespace conjlab
