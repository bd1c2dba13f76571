// Randomized invariants with a fixed seed.
#include <doctest.h>

#include "hyamabe/norms.hpp"
#include "hyamabe/rational.hpp"
#include "hyamabe/shooting.hpp"

#include <cmath>
#include <random>

using namespace hyamabe;

namespace {

std::mt19937_64 rng(20261017);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double pick_q() {
    static const double qs[] = {3.0, 7.0 / 3, 2.0, 5.0 / 3};
    return qs[std::uniform_int_distribution<int>(0, 3)(rng)];
}

}  // namespace

TEST_CASE("energy never increases along random shots") {
    const IntegrationControls c{};
    for (int k = 0; k < 100; ++k) {
        const OdeParams params{uniform(-1.0, 4.0), std::uniform_int_distribution<int>(2, 4)(rng), pick_q(), false};
        const double alpha = uniform(1e-3, 4.0);
        CAPTURE(params.lambda);
        CAPTURE(alpha);
        const Trajectory traj = integrate(params, alpha, c);
        const auto s = traj.samples();
        for (std::size_t i = 1; i < s.size(); ++i) {
            const double slack = 100 * std::max(c.abs_tol, c.rel_tol * std::fabs(s[i - 1].energy));
            REQUIRE(s[i].energy <= s[i - 1].energy + slack);
        }
    }
}

TEST_CASE("no positive local minimum for lambda <= 0") {
    for (int k = 0; k < 60; ++k) {
        const OdeParams params{uniform(-1.0, 0.0), 2, pick_q(), false};
        const Trajectory traj = integrate(params, uniform(1e-3, 4.0), {.t_max = 30.0});
        for (const Event& e : traj.events()) {
            if (e.kind == EventKind::LocalMin) CHECK(e.phi <= 0.0);
            if (e.kind == EventKind::LocalMax) CHECK(e.phi > 0.0);
        }
    }
}

TEST_CASE("normalized equation: local minima below 1, local maxima above 1") {
    for (int k = 0; k < 40; ++k) {
        const OdeParams params{uniform(0.1, 30.0), 2, pick_q(), true};
        const Trajectory traj = integrate(params, uniform(0.05, 3.0), {.t_max = 20.0});
        for (const Event& e : traj.events()) {
            if (e.kind == EventKind::LocalMin && e.phi > 0.0) CHECK(e.phi < 1.0 + 1e-9);
            if (e.kind == EventKind::LocalMax && e.phi > 0.0) CHECK(e.phi > 1.0 - 1e-9);
        }
    }
}

TEST_CASE("p-norm ordering of random N pairs") {
    for (int k = 0; k < 10; ++k) {
        const OdeParams params{uniform(-0.2, 1.0), 2, pick_q(), false};
        const GroundState gs = find_ground_state(params, {}, {});
        const Trajectory a = integrate(params, gs.alpha * uniform(1.001, 3.0), {});
        const Trajectory b = integrate(params, gs.alpha * uniform(1.001, 3.0), {});
        REQUIRE(a.termination() == Termination::ZeroCrossing);
        REQUIRE(b.termination() == Termination::ZeroCrossing);
        const double na = weighted_lk(a, params.q + 1, 2, a.t_end());
        const double nb = weighted_lk(b, params.q + 1, 2, b.t_end());
        if (a.t_end() > b.t_end()) CHECK(nb >= na);
        if (b.t_end() > a.t_end()) CHECK(na >= nb);
    }
}

TEST_CASE("rescaling maps equilibria to equilibria") {
    for (int k = 0; k < 20; ++k) {
        const double lambda = uniform(0.05, 50.0), q = pick_q();
        const Trajectory r = rescale_normalized(integrate({lambda, 3, q, true}, 1.0, {.t_max = 1.0}), lambda);
        const double phi = r.back().phi;
        CHECK(std::fabs(lambda * phi - std::pow(phi, q)) <= 1e-12 * lambda * phi);
    }
}

TEST_CASE("rational arithmetic agrees with floating point") {
    std::uniform_int_distribution<int> num(-1000, 1000), den(1, 1000);
    for (int k = 0; k < 500; ++k) {
        const Rational a(num(rng), den(rng)), b(num(rng), den(rng));
        CHECK((a + b).to_double() == doctest::Approx(a.to_double() + b.to_double()).epsilon(1e-12));
        CHECK((a * b).to_double() == doctest::Approx(a.to_double() * b.to_double()).epsilon(1e-12));
        CHECK(((a - b) + b) == a);
        CHECK((a < b) == (a.to_double() < b.to_double()));
    }
}
