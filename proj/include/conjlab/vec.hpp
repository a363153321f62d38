#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace conjlab {

using Vec = std::vector<double>;

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return std::sqrt(s);
}

inline double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
}

/// Point of the product space X x Y.
struct ProductState {
    Vec x;
    Vec y;
};

// |(x, y)| = |x| + |y|, the product norm used throughout the estimates.
inline double product_norm(const ProductState& u) { return norm2(u.x) + norm2(u.y); }

inline double product_dist(const ProductState& a, const ProductState& b) {
    return dist2(a.x, b.x) + dist2(a.y, b.y);
}

}  // namespace conjlab
