#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace hyamabe {

/// Parameters of the radial equation
///
///     phi'' + (n-1) coth(t) phi' = F(phi)
///
/// with F(phi) = lambda phi - phi^q (plain form) or
/// F(phi) = lambda (phi - phi^q) (normalized form, lambda > 0), whose
/// constant solutions are 0 and 1.
struct OdeParams {
    double lambda = 0.0;
    int n = 2;
    double q = 3.0;
    bool normalized = false;

    /// Throws std::invalid_argument on q <= 1, n < 2, or a normalized
    /// form with lambda <= 0.
    void validate() const;

    /// Right-hand side F. Odd extension for phi < 0 so that steps that
    /// overshoot a zero crossing stay finite.
    [[nodiscard]] double forcing(double phi) const noexcept;
};

struct IntegrationControls {
    double t_start = 1e-6;  ///< hand-off point from the Taylor expansion at 0
    double t_max = 50.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t max_steps = 2'000'000;
    double max_step = 0.1;

    void validate() const;
};

struct Sample {
    double t;
    double phi;
    double dphi;
    double energy;
    /// Running integral of max(phi,0)^{q+1} sinh^{n-1}(t) from t_start.
    double lp_power;
};

/// Optional early-termination rules used by the shooting classifier. All
/// are off by default; a zero crossing always terminates.
struct StopRules {
    bool at_local_min = false;       ///< stop at the first positive local minimum
    bool at_negative_energy = false;  ///< stop once the energy drops below 0
    std::optional<double> lp_power_limit;  ///< stop once the running L^{q+1} accumulator exceeds this
    std::optional<double> phi_floor;       ///< stop at the first step ending with 0 < phi < floor
    std::function<bool(const Sample&)> predicate;  ///< stop once this holds at a step end
};

enum class EventKind { ZeroCrossing, LocalMin, LocalMax };

struct Event {
    EventKind kind;
    double t;
    double phi;
};

enum class Termination {
    ZeroCrossing,
    Horizon,
    LocalMin,
    NegativeEnergy,
    NormLimit,
    Floor,
    Predicate,
};

[[nodiscard]] std::string_view to_string(EventKind kind) noexcept;
[[nodiscard]] std::string_view to_string(Termination termination) noexcept;

/// One accepted step with its quartic continuous extension. Components are
/// phi, phi' and the running L^{q+1} accumulator.
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;     ///< nominal step length; theta = (t - t0) / h
    double t_end = 0.0;  ///< <= t0 + h; shorter when an event cut the step
    std::array<std::array<double, 5>, 3> coeff{};

    [[nodiscard]] double eval(std::size_t component, double t) const noexcept;

    /// Cubic Hermite segment (the quartic term is zero) from end values and
    /// end derivatives of each component.
    static DenseSegment hermite(double t0, double t1, const std::array<double, 3>& y0,
                                const std::array<double, 3>& dy0,
                                const std::array<double, 3>& y1,
                                const std::array<double, 3>& dy1);
};

/// phi(t) ~= alpha + curvature t^2 on [0, t_start].
struct SeriesHead {
    double alpha;
    double curvature;
};

/// Discretized path (t, phi, phi') with dense output, energy, running
/// weighted-norm accumulator, and detected events.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(OdeParams params, double alpha, std::optional<SeriesHead> head,
               std::vector<Sample> samples, std::vector<DenseSegment> segments,
               std::vector<Event> events, Termination termination);

    [[nodiscard]] const OdeParams& params() const noexcept { return params_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] const std::optional<SeriesHead>& head() const noexcept { return head_; }
    [[nodiscard]] std::span<const Sample> samples() const noexcept { return samples_; }
    [[nodiscard]] std::span<const DenseSegment> segments() const noexcept { return segments_; }
    [[nodiscard]] std::span<const Event> events() const noexcept { return events_; }
    [[nodiscard]] Termination termination() const noexcept { return termination_; }

    [[nodiscard]] double t_begin() const;
    [[nodiscard]] double t_end() const;
    [[nodiscard]] const Sample& back() const { return samples_.back(); }

    /// (phi, phi') at any t in [t_begin, t_end] via dense output.
    [[nodiscard]] std::pair<double, double> state_at(double t) const;

    [[nodiscard]] std::vector<std::pair<double, double>> energy_trace() const;
    [[nodiscard]] std::optional<Event> first_event(EventKind kind) const;

private:
    OdeParams params_{};
    double alpha_ = 0.0;
    std::optional<SeriesHead> head_;
    std::vector<Sample> samples_;
    std::vector<DenseSegment> segments_;
    std::vector<Event> events_;
    Termination termination_ = Termination::Horizon;
};

/// Thrown when integration cannot complete; carries the partial trajectory.
class IntegrationError : public std::runtime_error {
public:
    enum class Kind { StepBudgetExhausted, TolerancesNotMet, EnergyIncrease };

    IntegrationError(Kind kind, const std::string& what, Trajectory partial);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const Trajectory& partial() const noexcept { return partial_; }

private:
    Kind kind_;
    Trajectory partial_;
};

/// (n-1) coth(t), with coth evaluated as 1 + 2/expm1(2t).
[[nodiscard]] double damping(int n, double t) noexcept;

/// Energy (1/2)phi'^2 - lambda phi^2/2 + phi^{q+1}/(q+1); the potential
/// terms are scaled by lambda in the normalized form. Non-increasing along
/// solutions.
[[nodiscard]] double energy(const OdeParams& params, double phi, double dphi) noexcept;

/// Second-order Taylor data at t_start for the regular solution with
/// phi(0) = alpha, phi'(0) = 0: phi = alpha + F t^2/(2n), phi' = F t/n.
[[nodiscard]] std::pair<double, double> series_start(const OdeParams& params, double alpha,
                                                     double t_start);

/// Adaptive Dormand-Prince 5(4) integration from the series hand-off until
/// a zero crossing, a stop rule, or t_max.
[[nodiscard]] Trajectory integrate(const OdeParams& params, double alpha,
                                   const IntegrationControls& controls,
                                   const StopRules& stop = {});

/// Maps a normalized-form trajectory to the plain equation with the same
/// lambda via phi -> lambda^{1/(q-1)} phi.
[[nodiscard]] Trajectory rescale_normalized(const Trajectory& normalized, double lambda);

}  // namespace hyamabe
