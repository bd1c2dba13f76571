#pragma once

#include "hyamabe/ode.hpp"

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace hyamabe {

/// Shooting families: N crosses zero at a finite b; P stays positive but is
/// not L^{q+1}; GroundStateCandidate decayed monotonically below the
/// smallness threshold without other evidence.
enum class SolutionTag { N, P, GroundStateCandidate };

enum class Witness {
    ZeroCrossing,    ///< t = b, value = E(b) > 0
    LocalMin,        ///< t, value = phi at a positive local minimum (lambda > 0)
    NegativeEnergy,  ///< t, value = E(t) < 0, so phi stays away from 0 (lambda > 0)
    NormExceeded,    ///< t, value = running L^{q+1} accumulator above the N reference
    DecayRate,       ///< t, value = phi'/phi trapped above the fast decay rate
    Decayed,         ///< t = last time, value = final phi
};

struct SolutionClass {
    SolutionTag tag;
    Witness witness;
    double t;
    double value;
};

[[nodiscard]] std::string_view to_string(SolutionTag tag) noexcept;
[[nodiscard]] std::string_view to_string(Witness witness) noexcept;

/// No decisive evidence before the horizon; extend t_max or tighten tolerances.
class Indeterminate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A bracket around the ground-state initial value could not be established.
class SeedFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Classifies a trajectory produced by integrate() with the same params.
///
/// reference_lp_power is the running L^{q+1} accumulator of a known N
/// solution with larger initial value. A positive solution whose accumulator
/// exceeds it cannot be N with a smaller initial value, so it is P.
[[nodiscard]] SolutionClass classify(const OdeParams& params, const Trajectory& trajectory,
                                     std::optional<double> reference_lp_power = std::nullopt,
                                     double smallness = 1e-8);

/// Linearized decay rates at phi = 0 for large t: the roots
/// r_- < r_+ of z^2 + (n-1) z - lambda = 0. Requires lambda > -(n-1)^2/4.
struct DecayRates {
    double fast;
    double slow;
};
[[nodiscard]] std::optional<DecayRates> decay_rates(const OdeParams& params) noexcept;

/// Sufficient condition for a positive solution never to reach zero nor to
/// decay at the ground-state rate.
///
/// With z = phi'/phi < 0 and coth >= 1 the equation gives
/// z' >= -(z - r_+)(z - r_-) - c phi^{q-1}, where c = lambda in the normalized
/// form and 1 otherwise. If at some time z lies in (r_-, min(r_+, 0)) and
/// c phi^{q-1} is below -(z - r_+)(z - r_-), the half-line {z' > z} is
/// invariant while phi decreases, so phi stays positive and decays no faster
/// than e^{z t}: the solution is in P.
[[nodiscard]] bool decay_rate_witness(const OdeParams& params, const Sample& sample) noexcept;

struct Bracket {
    double alpha_lo = 0.0;  ///< P side
    double alpha_hi = 0.0;  ///< N side
    double width_tol = 0.0;
};

struct ShootingOptions {
    double width_tol = 1e-9;  ///< relative bracket width
    double smallness = 1e-8;
    /// Final ground-state shots stop, and norms are truncated, at the first
    /// sample with phi below this level.
    double truncation_floor = 1e-12;
    double initial_alpha = 1.0;
    int max_seed_steps = 64;
    int max_bisections = 200;
};

struct Shot {
    double alpha;
    SolutionTag tag;
    Witness witness;
    double t;
};

struct GroundState {
    double alpha = 0.0;
    Trajectory trajectory;       ///< shot at alpha, stopped once phi < truncation_floor
    Trajectory edge_trajectory;  ///< shot at bracket.alpha_hi, same stop rules
    Bracket bracket;
    int iterations = 0;
    std::vector<Shot> shots;
};

/// Stop rules used for every classification shot.
[[nodiscard]] StopRules classification_stops(const OdeParams& params,
                                             std::optional<double> reference_lp_power);

/// Stop rules for the shot whose norms are measured: stop at a zero
/// crossing, below `floor`, or once the profile visibly leaves the ground
/// state (positive local minimum, or a decay-rate witness with phi'/phi
/// already closer to the slow rate than to the fast one).
[[nodiscard]] StopRules profile_stops(const OdeParams& params, double floor);

/// Bisects on phi(0) for the unique positive finite-energy solution.
///
/// alpha_hi is seeded by doubling until a shot crosses zero, alpha_lo by
/// halving until a shot is classified P (or a ground-state candidate). The
/// loop keeps classify(alpha_hi) == N and classify(alpha_lo) != N.
[[nodiscard]] GroundState find_ground_state(const OdeParams& params,
                                            const IntegrationControls& controls,
                                            const ShootingOptions& options = {});

}  // namespace hyamabe
