#include "hyamabe/dimension.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hyamabe {

void Dimensions::validate() const {
    if (n < 2) {
        throw std::invalid_argument("hyperbolic dimension must satisfy n >= 2 (got n = " +
                                    std::to_string(n) + ")");
    }
    if (m < 2) {
        throw std::invalid_argument("sphere dimension must satisfy m >= 2 (got m = " +
                                    std::to_string(m) + ")");
    }
}

DerivedConstants derive(const Dimensions& dims) {
    dims.validate();
    const std::int64_t n = dims.n;
    const std::int64_t m = dims.m;
    const std::int64_t k = n + m;

    DerivedConstants out;
    out.a = Rational(4 * (k - 1), k - 2);
    out.p = Rational(2 * k, k - 2);
    out.q = out.p - Rational(1);
    out.c = Rational((n - 1) * (m - 1), m + n - 2);
    out.d = Rational(m + n - 1, m + n - 2) * Rational((n - 1) * (n - 1)) +
            Rational(m * (m - 1) - n * (n - 1));
    out.vol_sphere_m = sphere_volume(dims.m);
    out.vol_sphere_n_minus_1 = sphere_volume(dims.n - 1);
    return out;
}

double sphere_volume(int k) {
    if (k < 0) {
        throw std::invalid_argument("sphere_volume: dimension must be non-negative");
    }
    const double half = 0.5 * (k + 1);
    return std::exp(std::numbers::ln2 + half * std::log(std::numbers::pi) - std::lgamma(half));
}

double sphere_yamabe(int k) {
    if (k < 3) {
        throw std::invalid_argument("sphere_yamabe: requires k >= 3 (got k = " +
                                    std::to_string(k) + ")");
    }
    return k * (k - 1) * std::pow(sphere_volume(k), 2.0 / k);
}

double sphere_scalar_curvature(const Dimensions& dims, double r) {
    if (!(r > 0.0)) {
        throw std::invalid_argument("sphere radius parameter r must be positive");
    }
    return dims.m * (dims.m - 1) / r;
}

double lambda_of_r(const Dimensions& dims, double r) {
    dims.validate();
    const double s = sphere_scalar_curvature(dims, r) - dims.n * (dims.n - 1);
    return lambda_of_total_curvature(dims, s);
}

double lambda_of_total_curvature(const Dimensions& dims, double s) {
    return s / derive(dims).a.to_double();
}

Regime regime(double s_g, const Dimensions& dims) {
    const double c = derive(dims).c.to_double();
    if (s_g > c) return Regime::PositiveAchieved;
    if (s_g == c) return Regime::PositiveNotAchieved;
    return Regime::MinusInfinity;
}

Regime regime(const Rational& s_g, const Dimensions& dims) {
    const Rational c = derive(dims).c;
    if (s_g > c) return Regime::PositiveAchieved;
    if (s_g == c) return Regime::PositiveNotAchieved;
    return Regime::MinusInfinity;
}

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::PositiveAchieved: return "positive, achieved";
        case Regime::PositiveNotAchieved: return "positive, not achieved";
        case Regime::MinusInfinity: return "minus infinity";
    }
    return "unknown";
}

}  // namespace hyamabe
