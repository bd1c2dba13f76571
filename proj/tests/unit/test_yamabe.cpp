#include <doctest.h>

#include "hyamabe/yamabe.hpp"

#include <cmath>
#include <numbers>

using namespace hyamabe;

namespace {

const Dimensions d22{2, 2}, d23{2, 3}, d32{3, 2};

}  // namespace

TEST_CASE("compute_q: published values within 0.1%") {
    CHECK(compute_q(d22, 1.0).q_value == doctest::Approx(61.56239).epsilon(1e-3));
    CHECK(compute_q(d22, 0.22732).q_value == doctest::Approx(60.42277).epsilon(1e-3));
    CHECK(compute_q(d32, 0.36158).q_value == doctest::Approx(77.77070).epsilon(1e-3));
}

TEST_CASE("compute_q at r = 1 matches the sphere Yamabe constant") {
    for (const Dimensions d : {d22, d23, d32}) {
        const QResult q = compute_q(d, 1.0);
        CHECK(q.q_value == doctest::Approx(sphere_yamabe(d.total())).epsilon(1e-3));
        CHECK(q.q_value == doctest::Approx(sphere_yamabe(d.total())).epsilon(1e-6));
    }
}

TEST_CASE("QResult bookkeeping") {
    const QResult q = compute_q(d23, 0.46075);
    CHECK(q.lambda == doctest::Approx(lambda_of_r(d23, 0.46075)));
    CHECK(q.diagnostics.normalized);
    CHECK(q.alpha_lambda ==
          doctest::Approx(q.diagnostics.alpha_raw * std::pow(q.lambda, 1.0 / (derive(d23).q.to_double() - 1))));
    CHECK(q.q_value == doctest::Approx(q_from_lp(d23, q.r, q.norms.lp)).epsilon(1e-15));
    CHECK(q.uncertainty > 0.0);
    CHECK(q.uncertainty < 1e-3 * q.q_value);
    CHECK(q.diagnostics.rayleigh_residual < 1e-6);
    CHECK(q.diagnostics.tail_relative < 1e-6);
    CHECK(q.diagnostics.bracket.alpha_lo < q.diagnostics.bracket.alpha_hi);
}

TEST_CASE("Rayleigh identity on ground states") {
    for (const Dimensions d : {d22, d23, d32}) {
        for (double r : {1.0, 0.7, 0.3, 0.05, 0.004}) {
            const QResult q = compute_q(d, r);
            CHECK(rayleigh_residual(d, r, q.norms) < 1e-6);
        }
    }
}

TEST_CASE("r outside (0, 1]") {
    CHECK_THROWS_AS((void)compute_q(d22, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)compute_q(d22, 1.5), std::invalid_argument);
    SolverSettings s;
    s.allow_r_above_one = true;
    const QResult q = compute_q(d22, 1.5, s);
    // Q never exceeds the sphere value beyond r = 1 by more than the scaling bound allows.
    CHECK(q.q_value <= scaling_upper_transfer(compute_q(d22, 1.0).q_value, 1.0, 1.5, d22) * (1 + 1e-6));
}

TEST_CASE("boundary constants") {
    const auto b22 = boundary_constants(d22);
    CHECK(b22.q0 == 59.40481);
    CHECK(b22.q1 == doctest::Approx(61.56239).epsilon(1e-6));
    CHECK(boundary_constants(d23).q0 == 78.18644);
    CHECK(boundary_constants(d23).q1 == doctest::Approx(78.99686).epsilon(1e-6));
    CHECK(boundary_constants(d32).q0 == 75.39687);
    CHECK(boundary_constants(d32).q1 == doctest::Approx(78.99686).epsilon(1e-6));
    try {
        (void)boundary_constants({3, 3});
        FAIL("expected UnknownQ0");
    } catch (const UnknownQ0& e) {
        CHECK(e.q1() == sphere_yamabe(6));
    }
}

TEST_CASE("small-r lower bound") {
    // (2 - 0.02)/2 = 0.99 at (2,2), r = 0.01.
    CHECK(small_r_lower_bound(d22, 0.01) == doctest::Approx(0.99 * 59.40481).epsilon(1e-14));
    CHECK(std::round(small_r_lower_bound(d22, 0.01) * 1e5) / 1e5 == 58.81076);
    CHECK(small_r_lower_bound(d22, 1e-12) == doctest::Approx(59.40481).epsilon(1e-11));
    // 1 - r n(n-1)/(m(m-1)) = 1 - 3r at (3,2): r = 1/300 gives exactly 0.99.
    CHECK(small_r_lower_bound(d32, 1.0 / 300) == doctest::Approx(0.99 * 75.39687).epsilon(1e-14));
    CHECK(small_r_lower_bound(d23, 0.03, 100.0) == doctest::Approx(99.0).epsilon(1e-14));
}

TEST_CASE("scaling transfer") {
    CHECK(scaling_upper_transfer(70.0, 0.3, 0.3, d22) == 70.0);
    CHECK(scaling_upper_transfer(1.0, 1.0, 4.0, d22) == doctest::Approx(2.0));
    CHECK(scaling_upper_transfer(1.0, 1.0, 4.0, d23) == doctest::Approx(std::pow(4.0, 0.6)));
    CHECK(scaling_upper_transfer(1.0, 1.0, 4.0, d32) == doctest::Approx(std::pow(4.0, 0.4)));
}

TEST_CASE("first certification step is consistent with the scaling inequality") {
    const double s2 = std::pow(0.99 * 59.40481 / 61.56239, 2);
    const double q_s2 = compute_q(d22, s2).q_value;
    CHECK(q_s2 == doctest::Approx(61.55039).epsilon(1e-3));
    CHECK(compute_q(d22, 1.0).q_value <= scaling_upper_transfer(q_s2, s2, 1.0, d22));
}

TEST_CASE("sweep keeps order and is independent of the worker count") {
    std::vector<double> radii;
    for (int i = 0; i < 13; ++i) radii.push_back(1.0 - 0.07 * i);
    const auto serial = sweep(d32, radii, {}, 1);
    const auto parallel = sweep(d32, radii, {}, 4);
    REQUIRE(serial.size() == radii.size());
    REQUIRE(parallel.size() == radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        CHECK(serial[i].r == radii[i]);
        CHECK(parallel[i].q_value == serial[i].q_value);
    }
}

TEST_CASE("sweep rethrows the first failure") {
    const std::vector<double> radii{0.5, -1.0, 2.0};
    CHECK_THROWS_AS((void)sweep(d22, radii, {}, 3), std::invalid_argument);
}

TEST_CASE("Q stays between 0.99 Q(0) and Q(1), and obeys the scaling inequality") {
    for (const Dimensions d : {d22, d23, d32}) {
        const auto b = boundary_constants(d);
        std::vector<double> radii;
        for (int i = 0; i < 12; ++i) radii.push_back(std::pow(10.0, -2.5 + 2.5 * i / 11.0));
        const auto results = sweep(d, radii, {}, 4);
        for (std::size_t i = 0; i < results.size(); ++i) {
            CHECK(results[i].q_value > 0.99 * b.q0 * (1 - 1e-6));
            CHECK(results[i].q_value < b.q1 * (1 + 1e-6));
            if (i > 0) {
                CHECK(results[i].q_value <=
                      scaling_upper_transfer(results[i - 1].q_value, radii[i - 1], radii[i], d) * (1 + 1e-6));
            }
        }
    }
}
