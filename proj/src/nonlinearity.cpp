#include "conjlab/nonlinearity.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "conjlab/errors.hpp"

namespace conjlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class ZeroModel final : public Nonlinearity::Model {
public:
    void eval(std::span<const double>, std::span<const double>, std::span<double> out) const override {
        for (double& v : out) v = 0.0;
    }
    nlohmann::json describe() const override { return {{"kind", "zero"}}; }
};

class ConstantModel final : public Nonlinearity::Model {
public:
    explicit ConstantModel(Vec c) : c_(std::move(c)) {}
    void eval(std::span<const double>, std::span<const double>, std::span<double> out) const override {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = c_[i];
    }
    nlohmann::json describe() const override { return {{"kind", "constant"}, {"value", c_}}; }

private:
    Vec c_;
};

class RidgeTanhModel final : public Nonlinearity::Model {
public:
    RidgeTanhModel(double scale, Vec wx, Vec wy, Vec d)
        : scale_(scale), wx_(std::move(wx)), wy_(std::move(wy)), d_(std::move(d)) {}

    void eval(std::span<const double> x, std::span<const double> y,
              std::span<double> out) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += wx_[i] * x[i];
        for (std::size_t j = 0; j < y.size(); ++j) s += wy_[j] * y[j];
        const double a = scale_ * std::tanh(s);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * d_[i];
    }
    nlohmann::json describe() const override {
        return {{"kind", "ridge_tanh"}, {"scale", scale_}, {"wx", wx_}, {"wy", wy_}, {"direction", d_}};
    }

private:
    double scale_;
    Vec wx_, wy_, d_;
};

class CoordinateTanhModel final : public Nonlinearity::Model {
public:
    CoordinateTanhModel(double scale, double coupling) : scale_(scale), b_(coupling) {}

    void eval(std::span<const double> x, std::span<const double> y,
              std::span<double> out) const override {
        double ys = 0.0;
        for (double v : y) ys += v;
        const double shift = b_ * ys;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale_ * std::tanh(x[i] + shift);
    }
    nlohmann::json describe() const override {
        return {{"kind", "coordinate_tanh"}, {"scale", scale_}};
    }

private:
    double scale_;
    double b_;
};

class QuadraticModel final : public Nonlinearity::Model {
public:
    explicit QuadraticModel(double c) : c_(c) {}

    void eval(std::span<const double> x, std::span<const double> y,
              std::span<double> out) const override {
        const double nx = norm2(x);
        const double ny = norm2(y);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double yi = i < y.size() ? y[i] : 0.0;
            out[i] = c_ * (nx * x[i] + ny * yi);
        }
    }
    nlohmann::json describe() const override { return {{"kind", "quadratic"}, {"c", c_}}; }

private:
    double c_;
};

void require_scale(double s, const char* who) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InputError(std::string(who) + ": scale must be finite and >= 0");
}

}  // namespace

Nonlinearity::Nonlinearity(std::shared_ptr<const Model> model, std::size_t x_dim,
                           std::size_t y_dim, double sup, double lip, bool identically_zero)
    : model_(std::move(model)),
      x_dim_(x_dim),
      y_dim_(y_dim),
      sup_(sup),
      lip_(lip),
      zero_(identically_zero) {
    if (!model_) throw InputError("Nonlinearity: null model");
    if (!(sup >= 0.0) || !(lip >= 0.0)) throw InputError("Nonlinearity: recorded constants must be >= 0");
}

void Nonlinearity::evaluate(std::span<const double> x, std::span<const double> y,
                            std::span<double> out) const {
    if (x.size() != x_dim_ || y.size() != y_dim_ || out.size() != x_dim_) {
        throw InputError("Nonlinearity: dimension mismatch");
    }
    if (!model_) {
        for (double& v : out) v = 0.0;
        return;
    }
    model_->eval(x, y, out);
}

Vec Nonlinearity::operator()(std::span<const double> x, std::span<const double> y) const {
    Vec out(x_dim_, 0.0);
    evaluate(x, y, out);
    return out;
}

nlohmann::json Nonlinearity::describe() const {
    return model_ ? model_->describe() : nlohmann::json{{"kind", "zero"}};
}

Nonlinearity make_zero_nonlinearity(std::size_t x_dim, std::size_t y_dim) {
    return Nonlinearity(std::make_shared<ZeroModel>(), x_dim, y_dim, 0.0, 0.0, true);
}

Nonlinearity make_constant_nonlinearity(Vec value, std::size_t y_dim) {
    const std::size_t n = value.size();
    const double sup = norm2(value);
    const bool zero = sup == 0.0;
    return Nonlinearity(std::make_shared<ConstantModel>(std::move(value)), n, y_dim, sup, 0.0, zero);
}

Nonlinearity make_ridge_tanh(double scale, Vec wx, Vec wy, Vec direction) {
    require_scale(scale, "make_ridge_tanh");
    if (direction.size() != wx.size()) throw InputError("make_ridge_tanh: direction must live in X");
    const double wmax = std::max(norm2(wx), norm2(wy));
    const double dn = norm2(direction);
    if (wmax == 0.0 || dn == 0.0) throw InputError("make_ridge_tanh: zero weights or direction");
    for (double& v : wx) v /= wmax;
    for (double& v : wy) v /= wmax;
    for (double& v : direction) v /= dn;
    const std::size_t nx = wx.size();
    const std::size_t ny = wy.size();
    return Nonlinearity(std::make_shared<RidgeTanhModel>(scale, std::move(wx), std::move(wy),
                                                         std::move(direction)),
                        nx, ny, scale, scale, scale == 0.0);
}

Nonlinearity make_coordinate_tanh(double scale, std::size_t x_dim, std::size_t y_dim) {
    require_scale(scale, "make_coordinate_tanh");
    if (x_dim == 0) throw InputError("make_coordinate_tanh: empty X");
    const double b = y_dim == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(x_dim * y_dim));
    return Nonlinearity(std::make_shared<CoordinateTanhModel>(scale, b), x_dim, y_dim,
                        scale * std::sqrt(static_cast<double>(x_dim)), scale, scale == 0.0);
}

Nonlinearity make_quadratic(double c, std::size_t x_dim, std::size_t y_dim) {
    require_scale(c, "make_quadratic");
    const double unbounded = c == 0.0 ? 0.0 : kInf;
    return Nonlinearity(std::make_shared<QuadraticModel>(c), x_dim, y_dim, unbounded, unbounded,
                        c == 0.0);
}

Nonlinearity nonlinearity_from_json(const nlohmann::json& j, std::size_t x_dim, std::size_t y_dim) {
    const std::string kind = j.value("kind", "");
    if (kind == "zero") return make_zero_nonlinearity(x_dim, y_dim);
    if (kind == "constant") {
        Vec v = j.at("value").get<Vec>();
        if (v.size() != x_dim) throw ConfigurationError("constant nonlinearity: value must have X dimension");
        return make_constant_nonlinearity(std::move(v), y_dim);
    }
    if (kind == "ridge_tanh") {
        Vec wx = j.at("wx").get<Vec>();
        Vec wy = j.contains("wy") ? j.at("wy").get<Vec>() : Vec(y_dim, 0.0);
        Vec d = j.at("direction").get<Vec>();
        if (wx.size() != x_dim || wy.size() != y_dim) {
            throw ConfigurationError("ridge_tanh: weight dimensions do not match the system");
        }
        return make_ridge_tanh(j.at("scale").get<double>(), std::move(wx), std::move(wy), std::move(d));
    }
    if (kind == "coordinate_tanh") return make_coordinate_tanh(j.at("scale").get<double>(), x_dim, y_dim);
    if (kind == "quadratic") return make_quadratic(j.at("c").get<double>(), x_dim, y_dim);
    throw ConfigurationError("unknown nonlinearity kind '" + kind + "'");
}

}  // namespace conjlab
