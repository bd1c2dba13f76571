#include "hyamabe/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hyamabe {

std::string_view to_string(SolutionTag tag) noexcept {
    switch (tag) {
        case SolutionTag::N: return "N";
        case SolutionTag::P: return "P";
        case SolutionTag::GroundStateCandidate: return "G?";
    }
    return "unknown";
}

std::string_view to_string(Witness witness) noexcept {
    switch (witness) {
        case Witness::ZeroCrossing: return "zero_crossing";
        case Witness::LocalMin: return "local_min";
        case Witness::NegativeEnergy: return "negative_energy";
        case Witness::NormExceeded: return "norm_exceeded";
        case Witness::DecayRate: return "decay_rate";
        case Witness::Decayed: return "decayed";
    }
    return "unknown";
}

std::optional<DecayRates> decay_rates(const OdeParams& params) noexcept {
    const double b = params.n - 1.0;
    const double disc = b * b + 4.0 * params.lambda;
    if (!(disc > 0.0)) return std::nullopt;
    const double root = std::sqrt(disc);
    return DecayRates{0.5 * (-b - root), 0.5 * (-b + root)};
}

bool decay_rate_witness(const OdeParams& params, const Sample& sample) noexcept {
    if (!(sample.phi > 0.0)) return false;
    const auto rates = decay_rates(params);
    if (!rates) return false;
    const double z = sample.dphi / sample.phi;
    if (!(z > rates->fast && z < std::min(rates->slow, 0.0))) return false;
    const double growth = -(z - rates->slow) * (z - rates->fast);
    const double coupling = params.normalized ? params.lambda : 1.0;
    return coupling * std::pow(sample.phi, params.q - 1.0) < growth;
}

SolutionClass classify(const OdeParams& params, const Trajectory& trajectory,
                       std::optional<double> reference_lp_power, double smallness) {
    if (auto zero = trajectory.first_event(EventKind::ZeroCrossing)) {
        return {SolutionTag::N, Witness::ZeroCrossing, zero->t, trajectory.back().energy};
    }
    if (params.lambda > 0.0) {
        for (const auto& e : trajectory.events()) {
            if (e.kind == EventKind::LocalMin && e.phi > 0.0) {
                return {SolutionTag::P, Witness::LocalMin, e.t, e.phi};
            }
        }
        for (const auto& s : trajectory.samples()) {
            if (s.energy < 0.0) return {SolutionTag::P, Witness::NegativeEnergy, s.t, s.energy};
        }
    }
    for (const auto& s : trajectory.samples()) {
        if (decay_rate_witness(params, s)) {
            return {SolutionTag::P, Witness::DecayRate, s.t, s.dphi / s.phi};
        }
    }
    if (reference_lp_power && trajectory.back().lp_power > *reference_lp_power) {
        const auto samples = trajectory.samples();
        const auto it = std::find_if(samples.begin(), samples.end(), [&](const Sample& s) {
            return s.lp_power > *reference_lp_power;
        });
        return {SolutionTag::P, Witness::NormExceeded, it->t, it->lp_power};
    }

    const auto samples = trajectory.samples();
    const bool decreasing = std::all_of(samples.begin() + 1, samples.end(),
                                        [](const Sample& s) { return s.dphi <= 0.0; });
    const Sample& last = trajectory.back();
    if (decreasing && last.phi < smallness) {
        return {SolutionTag::GroundStateCandidate, Witness::Decayed, last.t, last.phi};
    }
    throw Indeterminate("classify: no decisive evidence up to t = " + std::to_string(last.t) +
                        " (phi = " + std::to_string(last.phi) + ")");
}

StopRules classification_stops(const OdeParams& params, std::optional<double> reference_lp_power) {
    StopRules stop;
    stop.at_local_min = params.lambda > 0.0;
    stop.at_negative_energy = params.lambda > 0.0;
    stop.lp_power_limit = reference_lp_power;
    stop.predicate = [params](const Sample& s) { return decay_rate_witness(params, s); };
    return stop;
}

StopRules profile_stops(const OdeParams& params, double floor) {
    StopRules stop;
    stop.at_local_min = params.lambda > 0.0;
    stop.phi_floor = floor;
    // The witness can hold while the profile still tracks the ground state
    // closely; wait until the decay rate is past the midpoint of the two
    // linear rates, i.e. the slow mode has taken over.
    const auto rates = decay_rates(params);
    if (rates) {
        const double midpoint = 0.5 * (rates->fast + rates->slow);
        stop.predicate = [params, midpoint](const Sample& s) {
            return decay_rate_witness(params, s) && s.dphi / s.phi > midpoint;
        };
    }
    return stop;
}

GroundState find_ground_state(const OdeParams& params, const IntegrationControls& controls,
                              const ShootingOptions& options) {
    params.validate();
    controls.validate();
    if (!(options.width_tol > 0.0)) {
        throw std::invalid_argument("find_ground_state: width_tol must be positive");
    }
    if (!(options.initial_alpha > 0.0)) {
        throw std::invalid_argument("find_ground_state: initial_alpha must be positive");
    }

    GroundState out;
    std::optional<double> reference;

    const auto shoot = [&](double alpha) -> std::optional<SolutionClass> {
        const Trajectory traj = integrate(params, alpha, controls, classification_stops(params, reference));
        try {
            SolutionClass cls = classify(params, traj, reference, options.smallness);
            out.shots.push_back({alpha, cls.tag, cls.witness, cls.t});
            if (cls.tag == SolutionTag::N) reference = traj.back().lp_power;
            return cls;
        } catch (const Indeterminate&) {
            return std::nullopt;
        }
    };

    // Upper end: double until a shot crosses zero.
    double alpha = options.initial_alpha;
    std::optional<double> hi;
    std::optional<double> lo_candidate;
    for (int i = 0; i < options.max_seed_steps && !hi; ++i) {
        const auto cls = shoot(alpha);
        if (cls && cls->tag == SolutionTag::N) {
            hi = alpha;
        } else {
            lo_candidate = alpha;
            alpha *= 2.0;
        }
    }
    if (!hi) throw SeedFailure("find_ground_state: no zero-crossing shot found while doubling");

    // Lower end: the largest non-N shot seen so far needs a decisive verdict
    // against the N reference; otherwise halve below alpha_hi.
    std::optional<double> lo;
    alpha = lo_candidate.value_or(*hi * 0.5);
    for (int i = 0; i < options.max_seed_steps && !lo; ++i) {
        const auto cls = shoot(alpha);
        if (cls && cls->tag == SolutionTag::N) {
            hi = alpha;
        } else if (cls) {
            lo = alpha;
            break;
        }
        alpha *= 0.5;
    }
    if (!lo) throw SeedFailure("find_ground_state: no P-side shot found while halving");

    double a_lo = *lo;
    double a_hi = *hi;
    int iterations = 0;
    while (a_hi - a_lo > options.width_tol * a_hi) {
        if (++iterations > options.max_bisections) {
            throw SeedFailure("find_ground_state: bisection budget exhausted");
        }
        const double mid = 0.5 * (a_lo + a_hi);
        const auto cls = shoot(mid);
        if (!cls) {
            throw Indeterminate("find_ground_state: shot at alpha = " + std::to_string(mid) +
                                " is indeterminate");
        }
        if (cls->tag == SolutionTag::N) {
            a_hi = mid;
        } else {
            a_lo = mid;
        }
    }

    const StopRules final_stops = profile_stops(params, options.truncation_floor);
    out.alpha = 0.5 * (a_lo + a_hi);
    out.trajectory = integrate(params, out.alpha, controls, final_stops);
    out.edge_trajectory = integrate(params, a_hi, controls, final_stops);
    out.bracket = {a_lo, a_hi, options.width_tol};
    out.iterations = iterations;
    return out;
}

}  // namespace hyamabe
