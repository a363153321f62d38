#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

#include "conjlab/vec.hpp"

namespace conjlab {

/// Diagonal generator A = diag(lambda_0, ..., lambda_{n-1}) acting on
/// coefficient vectors. The group e^{At} is applied componentwise and is exact
/// up to the rounding of std::exp.
class SpectralGenerator {
public:
    SpectralGenerator() = default;
    explicit SpectralGenerator(Vec eigenvalues);

    std::size_t dimension() const noexcept { return eigenvalues_.size(); }
    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    double eigenvalue(std::size_t i) const { return eigenvalues_.at(i); }

    // e^{At} x
    Vec apply(double t, std::span<const double> x) const;
    void apply_inplace(double t, std::span<double> x) const;

    /// Smallest omega with |e^{At}| <= e^{omega |t|} in the Euclidean norm,
    /// floored at a tiny positive value so that it is always > 0.
    double growth_rate() const noexcept;

private:
    Vec eigenvalues_;
};

Vec semigroup_apply(const SpectralGenerator& gen, double t, std::span<const double> x);

enum class Side { stable, unstable };

/// Coordinate-aligned dichotomy projection P+ with constants k and alpha.
/// Construction only checks the partition and the ranges of k and alpha; whether
/// a given generator actually satisfies (S1)-(S4) is the job of
/// verify_dichotomy().
class DichotomySpec {
public:
    DichotomySpec() = default;
    DichotomySpec(std::size_t dimension, std::vector<std::size_t> stable_indices, double k,
                  double alpha);

    /// Stable = negative eigenvalues, alpha = min |lambda|, k = 1.
    /// Throws InputError if some eigenvalue is zero (no dichotomy).
    static DichotomySpec from_spectrum(const SpectralGenerator& gen);

    std::size_t dimension() const noexcept { return is_stable_.size(); }
    const std::vector<std::size_t>& stable_indices() const noexcept { return stable_; }
    const std::vector<std::size_t>& unstable_indices() const noexcept { return unstable_; }
    bool is_stable(std::size_t i) const { return is_stable_.at(i) != 0; }
    bool has_stable() const noexcept { return !stable_.empty(); }
    bool has_unstable() const noexcept { return !unstable_.empty(); }
    double k() const noexcept { return k_; }
    double alpha() const noexcept { return alpha_; }

    /// k/alpha times the number of nonempty sides: sup_t of the integral of
    /// |G_A(t - s)| over s.
    double kernel_mass() const noexcept;

private:
    std::vector<char> is_stable_;
    std::vector<std::size_t> stable_;
    std::vector<std::size_t> unstable_;
    double k_ = 1.0;
    double alpha_ = 1.0;
};

Vec project(const DichotomySpec& spec, std::span<const double> x, Side side);

/// G_A(t)x = e^{At} P+ x for t >= 0 and -e^{At} P- x for t < 0.
Vec green_kernel_apply(const SpectralGenerator& gen, const DichotomySpec& spec, double t,
                       std::span<const double> x);

struct GrowthBounds {
    double M_A = 1.0;
    double M_B = 1.0;
    double M_c = 1.0;
    double omega_A = 1.0;
    double omega_B = 1.0;
    double omega_c = 1.0;

    /// For diagonal generators in the Euclidean norm M = 1 and
    /// omega = max |lambda|.
    static GrowthBounds from_generators(const SpectralGenerator& a, const SpectralGenerator& b);
};

struct DichotomyReport {
    double s1_violation = 0.0;  // max |P+ e^{At} x - e^{At} P+ x|, t >= 0
    double s2_violation = 0.0;  // max (|e^{At} P+ x| - k e^{-alpha t}|P+ x|)+, t >= 0
    double s4_violation = 0.0;  // max (|e^{At} P- x| - k e^{alpha t}|P- x|)+, t <= 0
    double tolerance = 0.0;
    std::size_t samples = 0;
    bool passed = false;
};

/// Checks (S1), (S2) and (S4) on every (t, x) pair of the sample grid.
/// Violations are measured as excess over the bound divided by max(1, bound).
/// (S3) holds automatically for diagonal generators and is not sampled.
DichotomyReport verify_dichotomy(const SpectralGenerator& gen, const DichotomySpec& spec,
                                 std::span<const double> times, const std::vector<Vec>& states,
                                 double tolerance = 1e-12);

/// {"eigenvalues": [...], "stable_indices": [...], "k": ..., "alpha": ...}
nlohmann::json operator_to_json(const SpectralGenerator& gen, const DichotomySpec& spec);
std::pair<SpectralGenerator, DichotomySpec> operator_from_json(const nlohmann::json& j);

}  // namespace conjlab
