#include "hyamabe/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hyamabe {

namespace {

using State = std::array<double, 3>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension (Hairer's dopri5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI step-size controller constants.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kMinShrink = 0.2;  // hnew >= 0.2 h
constexpr double kMaxGrow = 10.0;   // hnew <= 10 h

double int_pow(double x, int k) {
    double out = 1.0;
    for (int i = 0; i < k; ++i) out *= x;
    return out;
}

State rhs(const OdeParams& params, double t, const State& y) {
    const double phi = y[0];
    const double dphi = y[1];
    const double positive = std::max(phi, 0.0);
    return {dphi, params.forcing(phi) - damping(params.n, t) * dphi,
            std::pow(positive, params.q + 1.0) * int_pow(std::sinh(t), params.n - 1)};
}

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        for (const auto& [coef, k] : terms) acc += coef * (*k)[i];
        out[i] += h * acc;
    }
    return out;
}

// Locate a sign change of one dense component on [lo, hi] by bisection.
double bisect_dense(const DenseSegment& seg, std::size_t component, double lo, double hi,
                    double tol) {
    double f_lo = seg.eval(component, lo);
    for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = seg.eval(component, mid);
        if ((f_mid > 0.0) == (f_lo > 0.0) && f_mid != 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Sample make_sample(const OdeParams& params, double t, const State& y) {
    return {t, y[0], y[1], energy(params, y[0], y[1]), y[2]};
}

}  // namespace

void OdeParams::validate() const {
    if (!(q > 1.0)) throw std::invalid_argument("OdeParams: exponent q must exceed 1");
    if (n < 2) throw std::invalid_argument("OdeParams: dimension n must be >= 2");
    if (normalized && !(lambda > 0.0)) {
        throw std::invalid_argument("OdeParams: normalized form requires lambda > 0");
    }
    if (!std::isfinite(lambda)) throw std::invalid_argument("OdeParams: lambda must be finite");
}

double OdeParams::forcing(double phi) const noexcept {
    const double power = std::copysign(std::pow(std::fabs(phi), q), phi);
    return normalized ? lambda * (phi - power) : lambda * phi - power;
}

void IntegrationControls::validate() const {
    if (!(t_start > 0.0 && t_start <= 1e-3)) {
        throw std::invalid_argument("IntegrationControls: t_start must lie in (0, 1e-3]");
    }
    if (!(t_max > t_start)) throw std::invalid_argument("IntegrationControls: t_max <= t_start");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw std::invalid_argument("IntegrationControls: tolerances must be positive");
    }
    if (max_steps == 0) throw std::invalid_argument("IntegrationControls: max_steps must be > 0");
    if (!(max_step > 0.0)) throw std::invalid_argument("IntegrationControls: max_step must be > 0");
}

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::ZeroCrossing: return "zero_crossing";
        case EventKind::LocalMin: return "local_min";
        case EventKind::LocalMax: return "local_max";
    }
    return "unknown";
}

std::string_view to_string(Termination termination) noexcept {
    switch (termination) {
        case Termination::ZeroCrossing: return "zero_crossing";
        case Termination::Horizon: return "horizon";
        case Termination::LocalMin: return "local_min";
        case Termination::NegativeEnergy: return "negative_energy";
        case Termination::NormLimit: return "norm_limit";
        case Termination::Floor: return "floor";
        case Termination::Predicate: return "predicate";
    }
    return "unknown";
}

double DenseSegment::eval(std::size_t component, double t) const noexcept {
    const auto& r = coeff[component];
    const double theta = (t - t0) / h;
    const double theta1 = 1.0 - theta;
    return r[0] + theta * (r[1] + theta1 * (r[2] + theta * (r[3] + theta1 * r[4])));
}

DenseSegment DenseSegment::hermite(double t0, double t1, const std::array<double, 3>& y0,
                                   const std::array<double, 3>& dy0,
                                   const std::array<double, 3>& y1,
                                   const std::array<double, 3>& dy1) {
    DenseSegment seg;
    seg.t0 = t0;
    seg.h = t1 - t0;
    seg.t_end = t1;
    for (std::size_t c = 0; c < 3; ++c) {
        const double diff = y1[c] - y0[c];
        const double slope0 = seg.h * dy0[c] - diff;
        seg.coeff[c] = {y0[c], diff, slope0, diff - seg.h * dy1[c] - slope0, 0.0};
    }
    return seg;
}

Trajectory::Trajectory(OdeParams params, double alpha, std::optional<SeriesHead> head,
                       std::vector<Sample> samples, std::vector<DenseSegment> segments,
                       std::vector<Event> events, Termination termination)
    : params_(params),
      alpha_(alpha),
      head_(head),
      samples_(std::move(samples)),
      segments_(std::move(segments)),
      events_(std::move(events)),
      termination_(termination) {
    if (samples_.empty()) throw std::invalid_argument("Trajectory: no samples");
    if (segments_.size() + 1 != samples_.size()) {
        throw std::invalid_argument("Trajectory: need exactly one segment between samples");
    }
}

double Trajectory::t_begin() const { return samples_.front().t; }
double Trajectory::t_end() const { return samples_.back().t; }

std::pair<double, double> Trajectory::state_at(double t) const {
    if (t < t_begin() || t > t_end()) {
        throw std::out_of_range("Trajectory::state_at: t outside the integrated range");
    }
    if (segments_.empty()) return {samples_.front().phi, samples_.front().dphi};
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double value, const DenseSegment& s) { return value < s.t0; });
    const DenseSegment& seg = it == segments_.begin() ? *it : *std::prev(it);
    return {seg.eval(0, t), seg.eval(1, t)};
}

std::vector<std::pair<double, double>> Trajectory::energy_trace() const {
    std::vector<std::pair<double, double>> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) out.emplace_back(s.t, s.energy);
    return out;
}

std::optional<Event> Trajectory::first_event(EventKind kind) const {
    for (const auto& e : events_) {
        if (e.kind == kind) return e;
    }
    return std::nullopt;
}

IntegrationError::IntegrationError(Kind kind, const std::string& what, Trajectory partial)
    : std::runtime_error(what), kind_(kind), partial_(std::move(partial)) {}

double damping(int n, double t) noexcept {
    // (e^{2t}+1)/(e^{2t}-1) = 1 + 2/(e^{2t}-1); expm1 keeps precision near 0.
    return (n - 1) * (1.0 + 2.0 / std::expm1(2.0 * t));
}

double energy(const OdeParams& params, double phi, double dphi) noexcept {
    const double kinetic = 0.5 * dphi * dphi;
    const double quad = -0.5 * params.lambda * phi * phi;
    const double power = std::pow(std::fabs(phi), params.q + 1.0) / (params.q + 1.0);
    return params.normalized ? kinetic + quad + params.lambda * power : kinetic + quad + power;
}

std::pair<double, double> series_start(const OdeParams& params, double alpha, double t_start) {
    if (!(alpha > 0.0)) throw std::invalid_argument("series_start: alpha must be positive");
    if (!(t_start > 0.0 && t_start <= 1e-3)) {
        throw std::invalid_argument("series_start: t_start must lie in (0, 1e-3]");
    }
    const double f = params.forcing(alpha);
    return {alpha + f * t_start * t_start / (2.0 * params.n), f * t_start / params.n};
}

Trajectory integrate(const OdeParams& params, double alpha, const IntegrationControls& controls,
                     const StopRules& stop) {
    params.validate();
    controls.validate();
    if (!(alpha > 0.0)) throw std::invalid_argument("integrate: alpha must be positive");

    const SeriesHead head{alpha, params.forcing(alpha) / (2.0 * params.n)};
    const auto [phi0, dphi0] = series_start(params, alpha, controls.t_start);

    std::vector<Sample> samples;
    std::vector<DenseSegment> segments;
    std::vector<Event> events;
    Termination termination = Termination::Horizon;

    double t = controls.t_start;
    State y{phi0, dphi0, 0.0};
    samples.push_back(make_sample(params, t, y));

    const auto partial = [&] {
        return Trajectory(params, alpha, head, samples, segments, events, termination);
    };

    State k1 = rhs(params, t, y);
    double h = std::min(controls.max_step, controls.t_start);
    double err_old = 1e-4;
    std::size_t steps = 0;
    bool done = false;

    while (!done && t < controls.t_max) {
        if (++steps > controls.max_steps) {
            throw IntegrationError(IntegrationError::Kind::StepBudgetExhausted,
                                   "integrate: step budget exhausted at t = " + std::to_string(t),
                                   partial());
        }
        bool last = false;
        if (t + h >= controls.t_max) {
            h = controls.t_max - t;
            last = true;
        }

        const State k2 = rhs(params, t + c2 * h, axpy(y, h, {{a21, &k1}}));
        const State k3 = rhs(params, t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        const State k4 =
            rhs(params, t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = rhs(params, t + c5 * h,
                             axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 = rhs(
            params, t + h,
            axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State y_new =
            axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        const State k7 = rhs(params, t + h, y_new);

        double err = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
            const double sc =
                controls.abs_tol + controls.rel_tol * std::max(std::fabs(y[i]), std::fabs(y_new[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / 3.0);
        if (!std::isfinite(err)) err = 1e10;

        const double fac11 = std::pow(err, kExpo);
        if (err <= 1.0) {
            DenseSegment seg;
            seg.t0 = t;
            seg.h = h;
            seg.t_end = last ? controls.t_max : t + h;
            for (std::size_t i = 0; i < 3; ++i) {
                const double diff = y_new[i] - y[i];
                const double bspl = h * k1[i] - diff;
                seg.coeff[i] = {y[i], diff, bspl, diff - h * k7[i] - bspl,
                                h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                     d6 * k6[i] + d7 * k7[i])};
            }

            const double event_tol = controls.abs_tol;
            std::optional<double> t_zero;
            if (y[0] > 0.0 && y_new[0] <= 0.0) {
                t_zero = bisect_dense(seg, 0, seg.t0, seg.t_end, event_tol);
            }
            const double scan_end = t_zero.value_or(seg.t_end);
            std::optional<Event> extremum;
            if (y[1] < 0.0 && seg.eval(1, scan_end) >= 0.0) {
                const double te = bisect_dense(seg, 1, seg.t0, scan_end, event_tol);
                extremum = Event{EventKind::LocalMin, te, seg.eval(0, te)};
            } else if (y[1] > 0.0 && seg.eval(1, scan_end) <= 0.0) {
                const double te = bisect_dense(seg, 1, seg.t0, scan_end, event_tol);
                extremum = Event{EventKind::LocalMax, te, seg.eval(0, te)};
            }

            double t_cut = seg.t_end;
            if (extremum) {
                events.push_back(*extremum);
                if (stop.at_local_min && extremum->kind == EventKind::LocalMin &&
                    extremum->phi > 0.0) {
                    t_cut = extremum->t;
                    termination = Termination::LocalMin;
                    done = true;
                }
            }
            if (!done && t_zero) {
                events.push_back(Event{EventKind::ZeroCrossing, *t_zero, 0.0});
                t_cut = *t_zero;
                termination = Termination::ZeroCrossing;
                done = true;
            }

            State y_cut = y_new;
            if (t_cut < seg.t_end) {
                seg.t_end = t_cut;
                y_cut = {seg.eval(0, t_cut), seg.eval(1, t_cut), seg.eval(2, t_cut)};
                if (termination == Termination::ZeroCrossing) y_cut[0] = 0.0;
            }

            const Sample prev = samples.back();
            segments.push_back(seg);
            samples.push_back(make_sample(params, t_cut, y_cut));
            const Sample& cur = samples.back();

            const double slack =
                100.0 * std::max(controls.abs_tol, controls.rel_tol * std::fabs(prev.energy));
            if (cur.energy > prev.energy + slack) {
                throw IntegrationError(IntegrationError::Kind::EnergyIncrease,
                                       "integrate: energy increased at t = " +
                                           std::to_string(cur.t),
                                       partial());
            }

            if (!done) {
                if (stop.at_negative_energy && cur.energy < 0.0) {
                    termination = Termination::NegativeEnergy;
                    done = true;
                } else if (stop.lp_power_limit && cur.lp_power > *stop.lp_power_limit) {
                    termination = Termination::NormLimit;
                    done = true;
                } else if (stop.phi_floor && cur.phi > 0.0 && cur.phi < *stop.phi_floor) {
                    termination = Termination::Floor;
                    done = true;
                } else if (stop.predicate && stop.predicate(cur)) {
                    termination = Termination::Predicate;
                    done = true;
                }
            }

            t = last ? controls.t_max : t + h;
            y = y_new;
            k1 = k7;

            double fac = fac11 / std::pow(err_old, kBeta);
            fac = std::clamp(fac / kSafety, 1.0 / kMaxGrow, 1.0 / kMinShrink);
            err_old = std::max(err, 1e-4);
            h = std::min(h / fac, controls.max_step);
        } else {
            h /= std::min(1.0 / kMinShrink, fac11 / kSafety);
        }

        if (!done && h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, t)) {
            throw IntegrationError(IntegrationError::Kind::TolerancesNotMet,
                                   "integrate: step size underflow at t = " + std::to_string(t),
                                   partial());
        }
    }

    return Trajectory(params, alpha, head, std::move(samples), std::move(segments),
                      std::move(events), termination);
}

Trajectory rescale_normalized(const Trajectory& normalized, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("rescale_normalized: lambda must be positive");
    const OdeParams& in = normalized.params();
    if (!in.normalized) throw std::invalid_argument("rescale_normalized: trajectory is not normalized");
    if (std::fabs(in.lambda - lambda) > 1e-12 * std::fabs(lambda)) {
        throw std::invalid_argument("rescale_normalized: lambda does not match the trajectory");
    }
    const double scale = std::pow(lambda, 1.0 / (in.q - 1.0));
    const double acc_scale = std::pow(scale, in.q + 1.0);

    OdeParams out = in;
    out.lambda = lambda;
    out.normalized = false;

    std::optional<SeriesHead> head;
    if (normalized.head()) {
        head = SeriesHead{normalized.head()->alpha * scale, normalized.head()->curvature * scale};
    }
    std::vector<Sample> samples;
    samples.reserve(normalized.samples().size());
    for (const auto& s : normalized.samples()) {
        const double phi = s.phi * scale;
        const double dphi = s.dphi * scale;
        samples.push_back({s.t, phi, dphi, energy(out, phi, dphi), s.lp_power * acc_scale});
    }
    std::vector<DenseSegment> segments(normalized.segments().begin(), normalized.segments().end());
    for (auto& seg : segments) {
        for (auto& c : seg.coeff[0]) c *= scale;
        for (auto& c : seg.coeff[1]) c *= scale;
        for (auto& c : seg.coeff[2]) c *= acc_scale;
    }
    std::vector<Event> events(normalized.events().begin(), normalized.events().end());
    for (auto& e : events) e.phi *= scale;

    return Trajectory(out, normalized.alpha() * scale, head, std::move(samples),
                      std::move(segments), std::move(events), normalized.termination());
}

}  // namespace hyamabe
