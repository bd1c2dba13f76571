#pragma once

#include "hyamabe/rational.hpp"

#include <string_view>

namespace hyamabe {

/// Dimensions of the product H^n x S^m.
struct Dimensions {
    int n = 2;  ///< hyperbolic factor
    int m = 2;  ///< compact factor

    /// Throws std::invalid_argument unless n >= 2 and m >= 2.
    void validate() const;
    [[nodiscard]] int total() const noexcept { return n + m; }

    friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

/// Exact constants attached to a pair (n, m).
struct DerivedConstants {
    Rational a;  ///< a_k = 4(k-1)/(k-2), k = n+m
    Rational p;  ///< p_k = 2k/(k-2)
    Rational q;  ///< p - 1, the subcritical exponent
    Rational c;  ///< (n-1)(m-1)/(m+n-2), curvature threshold of the regime split
    Rational d;  ///< constant of the tail-truncation bound, always positive
    double vol_sphere_m = 0.0;          ///< V(S^m)
    double vol_sphere_n_minus_1 = 0.0;  ///< V(S^{n-1})
};

[[nodiscard]] DerivedConstants derive(const Dimensions& dims);

/// Volume of the round unit sphere S^k, evaluated through lgamma.
[[nodiscard]] double sphere_volume(int k);

/// Yamabe constant of the round sphere, k(k-1) V(S^k)^{2/k}. Requires k >= 3.
[[nodiscard]] double sphere_yamabe(int k);

/// lambda(r) = (-n(n-1) + m(m-1)/r) / a_{n+m}. Requires r > 0.
[[nodiscard]] double lambda_of_r(const Dimensions& dims, double r);

/// lambda for a prescribed total scalar curvature s of H^n x M: s / a_{n+m}.
[[nodiscard]] double lambda_of_total_curvature(const Dimensions& dims, double s);

/// Scalar curvature of (S^m, r g_0): m(m-1)/r.
[[nodiscard]] double sphere_scalar_curvature(const Dimensions& dims, double r);

enum class Regime {
    PositiveAchieved,     ///< s_g > c_{m,n}
    PositiveNotAchieved,  ///< s_g == c_{m,n}
    MinusInfinity,        ///< s_g < c_{m,n}
};

/// Sign/achievability of the H^n-Yamabe constant as a function of the
/// scalar curvature s_g of the compact factor.
[[nodiscard]] Regime regime(double s_g, const Dimensions& dims);
[[nodiscard]] Regime regime(const Rational& s_g, const Dimensions& dims);

[[nodiscard]] std::string_view to_string(Regime regime) noexcept;

}  // namespace hyamabe
