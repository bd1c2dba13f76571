#include "hyamabe/yamabe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

namespace hyamabe {

namespace {

struct Measured {
    NormBundle norms;
    double q = 0.0;
};

Measured measure_q(const Trajectory& traj, const Dimensions& dims, double r, double smallness,
                   const SolverSettings& settings) {
    Measured out;
    out.norms = measure(traj, dims, smallness, settings.quadrature_step);
    out.q = q_from_lp(dims, r, out.norms.lp);
    return out;
}

}  // namespace

double q_from_lp(const Dimensions& dims, double r, double lp) {
    const DerivedConstants dc = derive(dims);
    const double k = dims.total();
    return dc.a.to_double() * std::pow(r, dims.m / k) * std::pow(dc.vol_sphere_m, 2.0 / k) *
           std::pow(lp, 4.0 / (k - 2.0));
}

double rayleigh_residual(const Dimensions& dims, double r, const NormBundle& norms) {
    const double a = derive(dims).a.to_double();
    const double s = sphere_scalar_curvature(dims, r) - dims.n * (dims.n - 1);
    const double lhs = a * norms.grad2 * norms.grad2 + s * norms.l2 * norms.l2;
    const double rhs = a * norms.lp_power;
    return std::fabs(lhs - rhs) / std::fabs(rhs);
}

QResult compute_q(const Dimensions& dims, double r, const SolverSettings& settings) {
    dims.validate();
    if (!(r > 0.0)) throw std::invalid_argument("compute_q: r must be positive");
    if (r > 1.0 && !settings.allow_r_above_one) {
        throw std::invalid_argument("compute_q: r > 1 is outside the validated range (0, 1]");
    }

    const DerivedConstants dc = derive(dims);
    const double lambda = lambda_of_r(dims, r);
    const double q = dc.q.to_double();
    const double p = dc.p.to_double();

    OdeParams params{lambda, dims.n, q, lambda > 0.0};
    const GroundState gs = find_ground_state(params, settings.controls, settings.shooting);

    const double scale = params.normalized ? std::pow(lambda, 1.0 / (q - 1.0)) : 1.0;
    const Trajectory traj =
        params.normalized ? rescale_normalized(gs.trajectory, lambda) : gs.trajectory;
    const Trajectory edge =
        params.normalized ? rescale_normalized(gs.edge_trajectory, lambda) : gs.edge_trajectory;
    const double smallness = settings.shooting.truncation_floor * scale;

    const Measured mid = measure_q(traj, dims, r, smallness, settings);
    const Measured hi = measure_q(edge, dims, r, smallness, settings);

    QResult out;
    out.dims = dims;
    out.r = r;
    out.lambda = lambda;
    out.alpha_lambda = gs.alpha * scale;
    out.norms = mid.norms;
    out.q_value = mid.q;

    // Self-consistent tail bound: inflate the run's own ||f||_p and Q, then
    // redo once with the tail folded into ||f||_p.
    const double eps = std::max(mid.norms.truncation_phi, smallness);
    double lp_upper = settings.bound_inflation * mid.norms.lp;
    double q_upper = settings.bound_inflation * mid.q;
    double tail = tail_bound(eps, r, dims, lp_upper, q_upper);
    lp_upper = settings.bound_inflation * std::pow(mid.norms.lp_power + tail, 1.0 / p);
    q_upper = settings.bound_inflation * q_from_lp(dims, r, lp_upper);
    tail = tail_bound(eps, r, dims, lp_upper, q_upper);
    out.norms.tail_bound_p = tail;

    const double tail_relative = tail / mid.norms.lp_power;
    out.uncertainty = std::fabs(mid.q - hi.q) + mid.q * (p - 2.0) / p * tail_relative +
                      10.0 * settings.controls.rel_tol * mid.q;

    QDiagnostics& d = out.diagnostics;
    d.bisection_iterations = gs.iterations;
    d.normalized = params.normalized;
    d.alpha_raw = gs.alpha;
    d.bracket = gs.bracket;
    d.truncation_t = mid.norms.truncation_t;
    d.tail_bound = tail;
    d.tail_relative = tail_relative;
    d.q_edge = hi.q;
    d.rayleigh_residual = rayleigh_residual(dims, r, out.norms);
    d.controls = settings.controls;
    d.width_tol = settings.shooting.width_tol;
    d.smallness = settings.shooting.smallness;
    d.truncation_floor = settings.shooting.truncation_floor;
    return out;
}

std::vector<QResult> sweep(const Dimensions& dims, std::span<const double> radii,
                           const SolverSettings& settings, std::size_t jobs) {
    std::vector<QResult> results(radii.size());
    std::vector<std::exception_ptr> errors(radii.size());
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t i = next++; i < radii.size(); i = next++) {
            try {
                results[i] = compute_q(dims, radii[i], settings);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, radii.size()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

UnknownQ0::UnknownQ0(const Dimensions& dims, double q1)
    : std::runtime_error("Q(0) is not tabulated for (n, m) = (" + std::to_string(dims.n) + ", " +
                         std::to_string(dims.m) + "); supply it explicitly"),
      q1_(q1) {}

BoundaryConstants boundary_constants(const Dimensions& dims) {
    dims.validate();
    const double q1 = sphere_yamabe(dims.total());
    if (dims == Dimensions{2, 2}) return {59.40481, q1};
    if (dims == Dimensions{2, 3}) return {78.18644, q1};
    if (dims == Dimensions{3, 2}) return {75.39687, q1};
    throw UnknownQ0(dims, q1);
}

double small_r_lower_bound(const Dimensions& dims, double r, double q0) {
    dims.validate();
    const double mm = dims.m * (dims.m - 1);
    const double nn = dims.n * (dims.n - 1);
    if (!(r > 0.0) || !(r < mm / nn)) {
        throw std::invalid_argument("small_r_lower_bound: r must lie in (0, m(m-1)/(n(n-1)))");
    }
    return (mm - r * nn) / mm * q0;
}

double small_r_lower_bound(const Dimensions& dims, double r) {
    return small_r_lower_bound(dims, r, boundary_constants(dims).q0);
}

double scaling_upper_transfer(double q_at_r0, double r0, double r1, const Dimensions& dims) {
    if (!(r0 > 0.0)) throw std::invalid_argument("scaling_upper_transfer: r0 must be positive");
    if (r1 < r0) throw std::invalid_argument("scaling_upper_transfer: requires r0 <= r1");
    return std::pow(r1 / r0, static_cast<double>(dims.m) / dims.total()) * q_at_r0;
}

}  // namespace hyamabe
