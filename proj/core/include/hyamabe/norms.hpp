#pragma once

#include "hyamabe/dimension.hpp"
#include "hyamabe/ode.hpp"

namespace hyamabe {

/// sinh-weighted norms of a radial profile f(x) = phi(|x|) on H^n.
struct NormBundle {
    double lp = 0.0;     ///< ||f||_p, p = p_{n+m}
    double l2 = 0.0;     ///< ||f||_2
    double grad2 = 0.0;  ///< ||grad f||_2
    double lp_power = 0.0;  ///< integral of f^p over the truncated ball
    double tail_bound_p = 0.0;  ///< certified bound on the omitted integral of f^p
    double truncation_t = 0.0;
    double truncation_phi = 0.0;  ///< phi(truncation_t), the epsilon of the tail bound
};

/// Default panel width of the composite quadrature.
inline constexpr double kDefaultQuadratureStep = 1e-3;

/// V(S^{n-1}) * integral_0^{t_cut} phi^k sinh^{n-1}(t) dt.
///
/// Composite 5-point Gauss-Legendre on the dense output, panels of width at
/// most `step` aligned with the integrator's steps; the [0, t_start] sliver
/// comes from the Taylor head in closed form.
[[nodiscard]] double weighted_lk(const Trajectory& trajectory, double k, int n, double t_cut,
                                 double step = kDefaultQuadratureStep);

/// V(S^{n-1}) * integral_0^{t_cut} phi'^2 sinh^{n-1}(t) dt.
[[nodiscard]] double weighted_grad2(const Trajectory& trajectory, int n, double t_cut,
                                    double step = kDefaultQuadratureStep);

/// K(eps) = eps^{p-2} lp_upper^2 q_upper / (r^{m/(m+n)} V(S^m)^{2/(m+n)} D_{m,n}),
/// a bound on the integral of f^p outside the ball where phi < eps.
[[nodiscard]] double tail_bound(double eps, double r, const Dimensions& dims, double lp_upper,
                                double q_upper);

/// Truncation point: the first sample with phi below `smallness`, else the
/// end of the trajectory. Throws std::runtime_error if phi is not
/// non-increasing up to that point.
[[nodiscard]] double truncation_point(const Trajectory& trajectory, double smallness);

/// lp, l2 and grad2 up to truncation_point(). tail_bound_p is left at 0.
[[nodiscard]] NormBundle measure(const Trajectory& trajectory, const Dimensions& dims,
                                 double smallness, double step = kDefaultQuadratureStep);

}  // namespace hyamabe
