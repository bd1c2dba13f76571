#pragma once

#include "hyamabe/dimension.hpp"
#include "hyamabe/norms.hpp"
#include "hyamabe/ode.hpp"
#include "hyamabe/shooting.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hyamabe {

struct SolverSettings {
    IntegrationControls controls;
    ShootingOptions shooting;
    double quadrature_step = kDefaultQuadratureStep;
    /// Inflation applied to ||f||_p and Q when they serve as upper bounds in
    /// the tail estimate.
    double bound_inflation = 1.01;
    /// r > 1 is well defined but outside the validated range.
    bool allow_r_above_one = false;
};

struct QDiagnostics {
    int bisection_iterations = 0;
    bool normalized = false;      ///< solved in the normalized form (lambda > 0)
    double alpha_raw = 0.0;       ///< ground-state initial value in the solved form
    Bracket bracket;              ///< in the solved form
    double truncation_t = 0.0;
    double tail_bound = 0.0;      ///< bound on the omitted integral of f^p
    double tail_relative = 0.0;   ///< tail_bound / integral of f^p
    double q_edge = 0.0;          ///< Q evaluated on the N-side bracket end
    double rayleigh_residual = 0.0;
    IntegrationControls controls;
    double width_tol = 0.0;
    double smallness = 0.0;
    double truncation_floor = 0.0;
};

/// H^n-Yamabe constant Q_{n,m}(r) with the data that produced it.
struct QResult {
    Dimensions dims;
    double r = 0.0;
    double lambda = 0.0;
    double alpha_lambda = 0.0;  ///< phi(0) of the ground state of the plain equation
    NormBundle norms;
    double q_value = 0.0;
    /// Conservative numerical uncertainty of q_value: bracket spread, tail
    /// bound, and integrator tolerance.
    double uncertainty = 0.0;
    QDiagnostics diagnostics;
};

/// a_{n+m} r^{m/(n+m)} V(S^m)^{2/(n+m)} lp^{4/(n+m-2)}.
[[nodiscard]] double q_from_lp(const Dimensions& dims, double r, double lp);

/// Solves for the ground state at lambda(r) and assembles Q_{n,m}(r).
[[nodiscard]] QResult compute_q(const Dimensions& dims, double r,
                                const SolverSettings& settings = {});

/// Relative residual of a ||grad f||^2 + s ||f||_2^2 = a ||f||_p^p.
[[nodiscard]] double rayleigh_residual(const Dimensions& dims, double r, const NormBundle& norms);

/// Evaluates compute_q over `radii` on up to `jobs` worker threads; the
/// result order matches `radii`. The first failure (by index) is rethrown.
[[nodiscard]] std::vector<QResult> sweep(const Dimensions& dims, std::span<const double> radii,
                                         const SolverSettings& settings = {},
                                         std::size_t jobs = 1);

struct BoundaryConstants {
    double q0 = 0.0;  ///< Q_{n,m}(0), tabulated
    double q1 = 0.0;  ///< Q_{n,m}(1) = Y(S^{n+m})
};

class UnknownQ0 : public std::runtime_error {
public:
    UnknownQ0(const Dimensions& dims, double q1);
    [[nodiscard]] double q1() const noexcept { return q1_; }

private:
    double q1_;
};

/// Q(0) is known for (2,2), (2,3) and (3,2); other pairs throw UnknownQ0,
/// which still carries Q(1).
[[nodiscard]] BoundaryConstants boundary_constants(const Dimensions& dims);

/// (m(m-1) - r n(n-1)) / (m(m-1)) * q0, valid for 0 < r < m(m-1)/(n(n-1)).
[[nodiscard]] double small_r_lower_bound(const Dimensions& dims, double r, double q0);
[[nodiscard]] double small_r_lower_bound(const Dimensions& dims, double r);

/// (r1/r0)^{m/(n+m)} q_at_r0, an upper bound for Q(r1) when r0 <= r1.
[[nodiscard]] double scaling_upper_transfer(double q_at_r0, double r0, double r1,
                                            const Dimensions& dims);

}  // namespace hyamabe
