#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "json.hpp"

#include "conjlab/vec.hpp"

namespace conjlab {

/// Nonlinearity f : X x Y -> X with its recorded sup-norm |f|_inf and
/// Lipschitz constant |f|_Lip (with respect to |x - x'| + |y - y'|).
///
/// The recorded constants are claims made by whoever built the model; they
/// are spot-checked by tests, never proven. Either may be +inf for models that
/// are only locally Lipschitz (see localization.hpp).
class Nonlinearity {
public:
    class Model {
    public:
        virtual ~Model() = default;
        virtual void eval(std::span<const double> x, std::span<const double> y,
                          std::span<double> out) const = 0;
        virtual nlohmann::json describe() const = 0;
    };

    Nonlinearity() = default;
    Nonlinearity(std::shared_ptr<const Model> model, std::size_t x_dim, std::size_t y_dim,
                 double sup, double lip, bool identically_zero = false);

    void evaluate(std::span<const double> x, std::span<const double> y,
                  std::span<double> out) const;
    Vec operator()(std::span<const double> x, std::span<const double> y) const;

    std::size_t x_dim() const noexcept { return x_dim_; }
    std::size_t y_dim() const noexcept { return y_dim_; }
    double sup() const noexcept { return sup_; }
    double lip() const noexcept { return lip_; }
    bool is_zero() const noexcept { return zero_; }
    nlohmann::json describe() const;

private:
    std::shared_ptr<const Model> model_;
    std::size_t x_dim_ = 0;
    std::size_t y_dim_ = 0;
    double sup_ = 0.0;
    double lip_ = 0.0;
    bool zero_ = true;
};

Nonlinearity make_zero_nonlinearity(std::size_t x_dim, std::size_t y_dim);

/// f = c, constant. |f|_Lip = 0.
Nonlinearity make_constant_nonlinearity(Vec value, std::size_t y_dim);

/// f(x, y) = scale * tanh(<wx, x> + <wy, y>) * d. The weights are rescaled so
/// that max(|wx|, |wy|) = 1 and d is normalised, so |f|_inf = |f|_Lip = scale.
Nonlinearity make_ridge_tanh(double scale, Vec wx, Vec wy, Vec direction);

/// f_i(x, y) = scale * tanh(x_i + b * sum_j y_j) with b = 1/sqrt(nx * ny).
/// |f|_Lip = scale, |f|_inf = scale * sqrt(nx).
Nonlinearity make_coordinate_tanh(double scale, std::size_t x_dim, std::size_t y_dim);

/// f(x, y) = c (|x| x + |y| E y), E the zero-padding/truncating embedding
/// Y -> X. f(0, 0) = 0 and |f(u) - f(u')| <= 2c max(r1, r2)(|dx| + |dy|),
/// so the local modulus is L(r1, r2) = 2c max(r1, r2). Globally unbounded.
Nonlinearity make_quadratic(double c, std::size_t x_dim, std::size_t y_dim);

/// Rebuilds one of the models above from its describe() output.
Nonlinearity nonlinearity_from_json(const nlohmann::json& j, std::size_t x_dim,
                                    std::size_t y_dim);

}  // namespace conjlab
