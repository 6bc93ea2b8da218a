// Fiber birefringence model and the two-stage paddle/twist alignment.

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "homsim/engine.hpp"
#include "homsim/fiber.hpp"

using namespace homsim;

TEST_CASE("random fiber channels are unitary and seed-deterministic") {
    const FiberChannel a = random_fiber(12);
    const FiberChannel b = random_fiber(12);
    CHECK(a.u_in_a == b.u_in_a);
    CHECK(a.u_in_b == b.u_in_b);
    CHECK(a.u_out_1 == b.u_out_1);
    CHECK(a.u_out_2 == b.u_out_2);

    for (const auto& u : {a.u_in_a, a.u_in_b, a.u_out_1, a.u_out_2}) {
        CHECK(u.is_unitary(1e-12));
    }

    const FiberChannel c = random_fiber(13);
    CHECK(!(a.u_in_a == c.u_in_a));
}

TEST_CASE("probe powers match an explicit Jones-product evaluation") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int i = 0; i < 20; ++i) {
        const FiberChannel channel = random_fiber(rng());
        PaddleSettings settings;
        settings.paddle_axes = {Angle::from_radians(angle(rng)), Angle::from_radians(angle(rng)),
                                Angle::from_radians(angle(rng))};
        settings.twist_retardance = angle(rng);
        const JonesVector probe = linear_state(Angle::from_radians(angle(rng)));
        const Angle analyzer = Angle::from_radians(angle(rng));
        const Arm arm = i % 2 == 0 ? Arm::Output1 : Arm::Output2;

        JonesMatrix chain = paddle_stack(settings) * channel.u_in_a;
        if (arm == Arm::Output1) {
            chain = twist_plate(settings) * channel.u_out_1 * chain;
        } else {
            chain = channel.u_out_2 * chain;
        }
        const double expected = std::norm(inner(linear_state(analyzer), chain * probe));
        CHECK(measure_probe(channel, settings, probe, analyzer, arm) ==
              doctest::Approx(expected).epsilon(1e-14));
    }

    const FiberChannel identity = FiberChannel::identity();
    const PaddleSettings none;
    CHECK(measure_probe(identity, none, JonesVector{1.0, 0.0}, Angle::from_degrees(0.0),
                        Arm::Output1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(measure_probe(identity, none, JonesVector{1.0, 0.0}, Angle::from_degrees(90.0),
                        Arm::Output1) <= 1e-15);

    CHECK_THROWS_AS(measure_probe(identity, none, JonesVector{1.0, 1.0}, Angle{}, Arm::Output1),
                    std::invalid_argument);
    CHECK_THROWS_AS(measure_probe(identity, none, JonesVector{1.0, 0.0}, Angle{}, Arm::InputA),
                    std::invalid_argument);
}

TEST_CASE("uncorrected channels leak strongly") {
    std::vector<double> leaks;
    const PaddleSettings none;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const FiberChannel channel = random_fiber(seed);
        leaks.push_back(measure_probe(channel, none, JonesVector{1.0, 0.0},
                                      Angle::from_degrees(90.0), Arm::Output1));
    }
    std::sort(leaks.begin(), leaks.end());
    CHECK(leaks[50] > 0.1);  // median
}

TEST_CASE("identity channel calibrates immediately") {
    const CalibrationResult result = calibrate(FiberChannel::identity(), 1e-3, 0);
    CHECK(result.converged);
    CHECK(result.residual_hv_leakage <= 1e-15);
    CHECK(result.residual_phase_error <= 1e-12);
    CHECK(result.iterations <= 10);
}

TEST_CASE("random channels calibrate below tolerance") {
    int converged = 0;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const FiberChannel channel = random_fiber(seed);
        const CalibrationResult result = calibrate(channel, 1e-3, seed);
        CHECK(result.iterations <= 10000);
        if (result.converged) {
            ++converged;
            CHECK(result.residual_hv_leakage < 1e-3);
            CHECK(result.residual_phase_error < 1e-3);
        }
    }
    CHECK(converged >= 19);
}

TEST_CASE("calibration never ends worse than it started") {
    const PaddleSettings none;
    for (std::uint64_t seed = 40; seed < 60; ++seed) {
        const FiberChannel channel = random_fiber(seed);
        const double initial =
            std::max(measure_probe(channel, none, JonesVector{1.0, 0.0},
                                   Angle::from_degrees(90.0), Arm::Output1),
                     measure_probe(channel, none, JonesVector{0.0, 1.0},
                                   Angle::from_degrees(0.0), Arm::Output1));
        const CalibrationResult result = calibrate(channel, 1e-3, seed);
        CHECK(result.residual_hv_leakage <= initial + 1e-15);
    }
}

TEST_CASE("calibration is deterministic in (channel, tolerance, seed)") {
    const FiberChannel channel = random_fiber(77);
    const CalibrationResult a = calibrate(channel, 1e-4, 5);
    const CalibrationResult b = calibrate(channel, 1e-4, 5);
    CHECK(a.settings == b.settings);
    CHECK(a.residual_hv_leakage == b.residual_hv_leakage);
    CHECK(a.residual_phase_error == b.residual_phase_error);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("calibrated arm transmits every linear state faithfully") {
    const double tolerance = 1e-6;
    const FiberChannel channel = random_fiber(3);
    const CalibrationResult result = calibrate(channel, tolerance, 3);
    REQUIRE(result.converged);
    for (const double deg : {0.0, 30.0, 45.0, 60.0, 90.0}) {
        const Angle theta = Angle::from_degrees(deg);
        const double overlap =
            measure_probe(channel, result.settings, linear_state(theta), theta, Arm::Output1);
        CHECK(overlap >= 1.0 - 10.0 * tolerance);
    }
}

TEST_CASE("a half-waveplate twist on the upper input lead is fully compensated") {
    FiberChannel channel = FiberChannel::identity();
    channel.u_in_a = half_waveplate(Angle::from_degrees(22.5));

    const CalibrationResult result = calibrate(channel, 1e-10, 11);
    REQUIRE(result.converged);

    ExperimentConfig config =
        make_aligned_experiment(0.1, compensation_angle(0.1, 0.9), Angle::from_degrees(0.0));
    insert_channel_elements(config, channel, result.settings);

    CHECK(coincidence_probability(config, 0.0) < 1e-6);

    std::vector<double> delays;
    for (int i = 0; i <= 80; ++i) delays.push_back(-600.0 + 15.0 * i);
    const DipCurve curve = dip_scan(config, delays);
    CHECK(curve_visibility(curve) == doctest::Approx(1.0).epsilon(1e-6));

    // The inserted elements keep the bookkeeping exact.
    const OutcomeProbabilities outcomes = outcome_probabilities(config, 0.0);
    CHECK(outcomes.total() == doctest::Approx(1.0).epsilon(1e-12));
}
