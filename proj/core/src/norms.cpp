#include "hyamabe/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hyamabe {

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kNodes = {
    -0.9061798459386639927976269, -0.5384693101056830910363144, 0.0,
    0.5384693101056830910363144, 0.9061798459386639927976269};
constexpr std::array<double, 5> kWeights = {
    0.2369268850561890875142640, 0.4786286704993664680412915, 0.5688888888888888888888889,
    0.4786286704993664680412915, 0.2369268850561890875142640};

double int_pow(double x, int k) {
    double out = 1.0;
    for (int i = 0; i < k; ++i) out *= x;
    return out;
}

template <typename Integrand>
double composite(const Trajectory& trajectory, int n, double t_cut, double step,
                 Integrand&& integrand) {
    if (!(step > 0.0)) throw std::invalid_argument("quadrature step must be positive");
    if (t_cut > trajectory.t_end() * (1.0 + 1e-14)) {
        throw std::invalid_argument("t_cut beyond the last sample");
    }
    double total = 0.0;
    for (const DenseSegment& seg : trajectory.segments()) {
        const double a = seg.t0;
        const double b = std::min(seg.t_end, t_cut);
        if (b <= a) break;
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / step)));
        const double width = (b - a) / panels;
        for (int j = 0; j < panels; ++j) {
            const double mid = a + (j + 0.5) * width;
            double acc = 0.0;
            for (std::size_t g = 0; g < kNodes.size(); ++g) {
                const double t = mid + 0.5 * width * kNodes[g];
                acc += kWeights[g] * integrand(seg.eval(0, t), seg.eval(1, t)) *
                       int_pow(std::sinh(t), n - 1);
            }
            total += 0.5 * width * acc;
        }
    }
    return total;
}

void check_cut(const Trajectory& trajectory, double t_cut) {
    if (!(t_cut >= trajectory.t_begin())) {
        throw std::invalid_argument("t_cut precedes the first sample");
    }
}

}  // namespace

double weighted_lk(const Trajectory& trajectory, double k, int n, double t_cut, double step) {
    if (!(k > 0.0)) throw std::invalid_argument("weighted_lk: k must be positive");
    check_cut(trajectory, t_cut);
    double total = composite(trajectory, n, t_cut, step, [k](double phi, double) {
        return std::pow(std::max(phi, 0.0), k);
    });
    if (const auto& head = trajectory.head()) {
        // phi^k sinh^{n-1} ~ alpha^k t^{n-1} (1 + (k c/alpha + (n-1)/6) t^2).
        const double ts = trajectory.t_begin();
        const double correction = k * head->curvature / head->alpha + (n - 1) / 6.0;
        total += std::pow(head->alpha, k) *
                 (std::pow(ts, n) / n + correction * std::pow(ts, n + 2) / (n + 2));
    }
    return sphere_volume(n - 1) * total;
}

double weighted_grad2(const Trajectory& trajectory, int n, double t_cut, double step) {
    check_cut(trajectory, t_cut);
    double total =
        composite(trajectory, n, t_cut, step, [](double, double dphi) { return dphi * dphi; });
    if (const auto& head = trajectory.head()) {
        // phi' ~ 2 c t, so phi'^2 sinh^{n-1} ~ 4 c^2 t^{n+1}.
        const double ts = trajectory.t_begin();
        total += 4.0 * head->curvature * head->curvature * std::pow(ts, n + 2) / (n + 2);
    }
    return sphere_volume(n - 1) * total;
}

double tail_bound(double eps, double r, const Dimensions& dims, double lp_upper, double q_upper) {
    if (!(eps > 0.0) || !(r > 0.0) || !(lp_upper > 0.0) || !(q_upper > 0.0)) {
        throw std::invalid_argument("tail_bound: all inputs must be positive");
    }
    const DerivedConstants dc = derive(dims);
    const double k = dims.total();
    const double p = dc.p.to_double();
    return std::pow(eps, p - 2.0) * lp_upper * lp_upper * q_upper /
           (std::pow(r, dims.m / k) * std::pow(dc.vol_sphere_m, 2.0 / k) * dc.d.to_double());
}

double truncation_point(const Trajectory& trajectory, double smallness) {
    const auto samples = trajectory.samples();
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].phi < smallness) return samples[i].t;
        // The last sample may sit on a polished local minimum.
        if (samples[i].dphi > 0.0 && i + 1 < samples.size()) {
            throw std::runtime_error("truncation_point: profile is not decreasing at t = " +
                                     std::to_string(samples[i].t));
        }
    }
    return trajectory.t_end();
}

NormBundle measure(const Trajectory& trajectory, const Dimensions& dims, double smallness,
                   double step) {
    const DerivedConstants dc = derive(dims);
    const double p = dc.p.to_double();
    const int n = dims.n;

    NormBundle out;
    out.truncation_t = truncation_point(trajectory, smallness);
    out.truncation_phi = std::max(trajectory.state_at(out.truncation_t).first, 0.0);
    out.lp_power = weighted_lk(trajectory, p, n, out.truncation_t, step);
    out.lp = std::pow(out.lp_power, 1.0 / p);
    out.l2 = std::sqrt(weighted_lk(trajectory, 2.0, n, out.truncation_t, step));
    out.grad2 = std::sqrt(weighted_grad2(trajectory, n, out.truncation_t, step));
    return out;
}

}  // namespace hyamabe
