// Two-photon engine: amplitude enumeration against hand-substituted values,
// the spectral-overlap envelope against numerical quadrature, and the
// closed-form laws as independent oracles for full engine runs.

#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "homsim/engine.hpp"
#include "test_util.hpp"

using namespace homsim;

namespace {

// Quadrature oracle for the interference envelope: the normalized magnitude
// of  integral S(w0+v) S(w0-v) exp(-2 i v tau) dv  with S the Gaussian
// filter intensity spectrum. Simpson rule over +-8 sigma.
double overlap_by_quadrature(double delay_fs, double wavelength_nm, double fwhm_nm) {
    const double c = 299792458.0;
    const double lambda = wavelength_nm * 1e-9;
    const double fwhm_w = 2.0 * kPi * c * fwhm_nm * 1e-9 / (lambda * lambda);
    const double sigma = fwhm_w / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double tau = delay_fs * 1e-15;

    const int n = 4000;  // even
    const double lo = -8.0 * sigma;
    const double step = 16.0 * sigma / n;
    std::complex<double> numerator{0.0, 0.0};
    double denominator = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double v = lo + step * i;
        const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double product = std::exp(-v * v / (sigma * sigma));  // S(w0+v) S(w0-v)
        numerator += weight * product * std::exp(std::complex<double>{0.0, -2.0 * v * tau});
        denominator += weight * product;
    }
    return std::abs(numerator) / denominator;
}

}  // namespace

TEST_CASE("temporal overlap matches the quadrature oracle") {
    const PhotonPairSpec pair;  // 814 nm, 10 nm
    for (const double tau : {0.0, 25.0, 50.0, 82.833, 150.0, 300.0}) {
        const double oracle = overlap_by_quadrature(tau, 814.0, 10.0);
        CHECK(temporal_overlap(tau, pair) == doctest::Approx(oracle).epsilon(1e-9));
    }

    CHECK(temporal_overlap(0.0, pair) == 1.0);
    // 1/e half-width of the envelope for 10 nm filters at 814 nm.
    const double tau_1e = 82.83349052640865;
    CHECK(temporal_overlap(tau_1e, pair) == doctest::Approx(1.0 / std::exp(1.0)).epsilon(1e-12));

    for (const double tau : {13.0, 77.0, 240.0}) {
        CHECK(temporal_overlap(tau, pair) == temporal_overlap(-tau, pair));
    }
    double previous = 1.0;
    for (double tau = 10.0; tau <= 500.0; tau += 10.0) {
        const double value = temporal_overlap(tau, pair);
        CHECK(value < previous);
        previous = value;
    }
    CHECK(temporal_overlap(1e6, pair) == 0.0);

    PhotonPairSpec bad;
    bad.filter_fwhm_nm = 0.0;
    CHECK_THROWS_AS(temporal_overlap(0.0, bad), std::domain_error);
}

TEST_CASE("amplitude enumeration by direct substitution") {
    // Aligned 10/90: a_rr = r^2 = -R, a_tt = t^2 = T.
    const ExperimentConfig aligned =
        make_aligned_experiment(0.1, Angle::from_degrees(0.0), Angle::from_degrees(0.0));
    const TwoPhotonAmplitudes a = enumerate_amplitudes(aligned);
    CHECK(a.a_rr.real() == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(std::abs(a.a_rr.imag()) <= 1e-15);
    CHECK(a.a_tt.real() == doctest::Approx(0.9).epsilon(1e-12));

    // Compensated: |a_tt| is projected down to |a_rr| = R.
    const ExperimentConfig compensated =
        make_aligned_experiment(0.1, Angle::from_degrees(70.5288), Angle::from_degrees(0.0));
    const TwoPhotonAmplitudes b = enumerate_amplitudes(compensated);
    CHECK(std::abs(b.a_rr) == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(std::abs(b.a_tt) == doctest::Approx(0.1).epsilon(1e-4));
    CHECK(std::abs(b.a_tt) ==
          doctest::Approx(0.9 * std::pow(std::cos(Angle::from_degrees(70.5288).radians()), 2))
              .epsilon(1e-12));

    // Symmetric splitter, identical inputs, analyzers aligned.
    const ExperimentConfig symmetric =
        make_aligned_experiment(0.5, Angle::from_degrees(20.0), Angle::from_degrees(20.0));
    const TwoPhotonAmplitudes s = enumerate_amplitudes(symmetric);
    CHECK(std::abs(s.a_rr) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(s.a_tt) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("coincidence probability at the marquee working points") {
    const ExperimentConfig aligned =
        make_aligned_experiment(0.1, Angle::from_degrees(0.0), Angle::from_degrees(0.0));
    CHECK(coincidence_probability(aligned, 1e6) == doctest::Approx(0.82).epsilon(1e-12));

    const Angle star = compensation_angle(0.1, 0.9);
    const ExperimentConfig compensated =
        make_aligned_experiment(0.1, star, Angle::from_degrees(0.0));
    CHECK(coincidence_probability(compensated, 0.0) <= 1e-12);
    CHECK(coincidence_probability(compensated, 1e6) == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("dip scans") {
    const Angle star = compensation_angle(0.1, 0.9);
    const ExperimentConfig compensated =
        make_aligned_experiment(0.1, star, Angle::from_degrees(0.0));

    std::vector<double> delays;
    for (int i = 0; i <= 60; ++i) delays.push_back(-300.0 + 10.0 * i);
    const DipCurve curve = dip_scan(compensated, delays);

    REQUIRE(curve.values.size() == 61);
    CHECK(curve.values[30] <= 1e-12);  // null at zero delay
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        CHECK(curve.values[i] == curve.values[curve.values.size() - 1 - i]);  // even in delay
        CHECK(curve.values[i] >= 0.0);
    }

    // Fully crossed inputs: the transmitted amplitude is extinguished and the
    // curve is flat at R^2.
    const ExperimentConfig crossed =
        make_aligned_experiment(0.1, Angle::from_degrees(90.0), Angle::from_degrees(0.0));
    const DipCurve flat = dip_scan(crossed, delays);
    for (const double value : flat.values) {
        CHECK(value == doctest::Approx(0.01).epsilon(1e-12));
    }
    CHECK(curve_visibility(flat) <= 1e-12);

    const DipCurve single = dip_scan(compensated, {0.0});
    CHECK(single.values[0] == coincidence_probability(compensated, 0.0));

    CHECK_THROWS_AS(dip_scan(compensated, {10.0, 10.0}), std::invalid_argument);
    CHECK_THROWS_AS(dip_scan(compensated, {10.0, -10.0}), std::invalid_argument);
}

TEST_CASE("closed-form visibility and relative rate") {
    CHECK(closed_form_visibility(0.1, 0.9, Angle::from_degrees(0.0)) ==
          doctest::Approx(0.21951).epsilon(1e-4));
    CHECK(closed_form_visibility(0.5, 0.5, Angle::from_degrees(0.0)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(closed_form_visibility(0.1, 0.9, Angle::from_degrees(70.5288)) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(closed_form_visibility(0.1, 0.9, Angle::from_degrees(45.0)) ==
          doctest::Approx(0.42353).epsilon(1e-4));

    CHECK(relative_rate(0.1, 0.9, Angle::from_degrees(0.0)) == doctest::Approx(0.82).epsilon(1e-12));
    CHECK(relative_rate(0.1, 0.9, compensation_angle(0.1, 0.9)) ==
          doctest::Approx(0.02).epsilon(1e-12));
    CHECK(relative_rate(0.5, 0.5, Angle::from_degrees(0.0)) == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(closed_form_visibility(0.1, 0.8, Angle{}), std::domain_error);
    CHECK_THROWS_AS(relative_rate(0.0, 1.0, Angle{}), std::domain_error);
}

TEST_CASE("compensation angle") {
    const Angle star = compensation_angle(0.1, 0.9);
    CHECK(star.degrees() == doctest::Approx(70.5288).epsilon(1e-5));
    CHECK(std::pow(std::cos(star.radians()), 2) == doctest::Approx(0.1 / 0.9).epsilon(1e-12));
    CHECK(compensation_angle(0.5, 0.5).degrees() == doctest::Approx(0.0));
    CHECK_THROWS_AS(compensation_angle(0.9, 0.1), std::domain_error);
}

TEST_CASE("engine curves agree with the closed-form laws on a parameter grid") {
    const std::vector<double> delays = {-600.0, 0.0, 600.0};
    int points = 0;
    for (int ri = 1; ri <= 10; ++ri) {
        const double reflectivity = 0.05 * ri;
        for (int ai = 0; ai <= 20; ++ai) {
            const Angle delta = Angle::from_degrees(4.5 * ai);
            const ExperimentConfig config =
                make_aligned_experiment(reflectivity, delta, Angle::from_degrees(0.0));
            const DipCurve curve = dip_scan(config, delays);
            const double expected_v =
                closed_form_visibility(reflectivity, 1.0 - reflectivity, delta);
            const double expected_rate = relative_rate(reflectivity, 1.0 - reflectivity, delta);
            CHECK(curve_visibility(curve) == doctest::Approx(expected_v).epsilon(1e-9));
            CHECK(curve_baseline(curve) == doctest::Approx(expected_rate).epsilon(1e-9));
            ++points;
        }
    }
    CHECK(points == 210);
}

TEST_CASE("probability is conserved over randomized configurations") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> delay(-400.0, 400.0);
    for (int i = 0; i < 300; ++i) {
        const ExperimentConfig config = testutil::random_config(rng);
        const OutcomeProbabilities p = outcome_probabilities(config, delay(rng));
        CHECK(p.total() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.coincidence >= -1e-15);
        CHECK(p.both_d1 >= -1e-15);
        CHECK(p.both_d2 >= -1e-15);
        CHECK(p.absorbed >= -1e-15);
    }
}

TEST_CASE("coincidence outcome equals the amplitude-level formula") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> delay(-200.0, 200.0);
    for (int i = 0; i < 100; ++i) {
        const ExperimentConfig config = testutil::random_config(rng);
        const double d = delay(rng);
        CHECK(outcome_probabilities(config, d).coincidence ==
              doctest::Approx(coincidence_probability(config, d)).epsilon(1e-12));
    }
}

TEST_CASE("null at the compensation angle across feasible splitters") {
    for (int ri = 1; ri <= 10; ++ri) {
        const double reflectivity = 0.05 * ri;
        const Angle star = compensation_angle(reflectivity, 1.0 - reflectivity);
        const ExperimentConfig config =
            make_aligned_experiment(reflectivity, star, Angle::from_degrees(0.0));
        CHECK(coincidence_probability(config, 0.0) <= 1e-12);
    }
}

TEST_CASE("all measurable quantities are phase-convention independent") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> phase(-kPi, kPi);

    ExperimentConfig config =
        make_aligned_experiment(0.1, Angle::from_degrees(25.0), Angle::from_degrees(-10.0));
    config.polarizer_1 = Angle::from_degrees(40.0);
    config.elements.push_back(
        OpticalElement::waveplate(Arm::Output1, 1.1, Angle::from_degrees(15.0)));

    const double moduli_r = std::sqrt(0.1);
    const double moduli_t = std::sqrt(0.9);
    for (int i = 0; i < 50; ++i) {
        // Any lossless 2x2 with |U00|=|U11|=|r| and |U01|=|U10|=|t| obeys
        // a + d = b + c + pi (mod 2 pi).
        const double a = phase(rng);
        const double b = phase(rng);
        const double c = phase(rng);
        const double d = b + c + kPi - a;
        const JonesMatrix spatial{moduli_r * std::exp(Complex{0.0, a}),
                                  moduli_t * std::exp(Complex{0.0, b}),
                                  moduli_t * std::exp(Complex{0.0, c}),
                                  moduli_r * std::exp(Complex{0.0, d})};
        REQUIRE(spatial.is_unitary(1e-12));
        for (const double delay : {0.0, 40.0, 500.0}) {
            const OutcomeProbabilities reference = outcome_probabilities(config, delay);
            const OutcomeProbabilities alt = outcome_probabilities(config, delay, spatial);
            CHECK(alt.coincidence == doctest::Approx(reference.coincidence).epsilon(1e-12));
            CHECK(alt.both_d1 == doctest::Approx(reference.both_d1).epsilon(1e-12));
            CHECK(alt.both_d2 == doctest::Approx(reference.both_d2).epsilon(1e-12));
            CHECK(alt.absorbed == doctest::Approx(reference.absorbed).epsilon(1e-12));
        }
    }
}

TEST_CASE("analyzer orientations exist that convert the dip into a peak") {
    ExperimentConfig config =
        make_aligned_experiment(0.1, Angle::from_degrees(70.5288), Angle::from_degrees(0.0));

    // Derived orientation: p1 chosen so both coincidence amplitudes end up
    // equal and positive, doubling the zero-delay rate.
    config.polarizer_1 = Angle::from_degrees(-74.2);
    config.polarizer_2 = Angle::from_degrees(0.0);
    const TwoPhotonAmplitudes amp = enumerate_amplitudes(config);
    CHECK((std::conj(amp.a_rr) * amp.a_tt).real() > 0.0);
    const double baseline = coincidence_probability(config, 1e6);
    const double center = coincidence_probability(config, 0.0);
    CHECK(center / baseline > 1.9);

    // A coarse search over both analyzers also finds an enhancement.
    double best_ratio = 0.0;
    for (int i = -18; i <= 18; ++i) {
        for (int j = -18; j <= 18; ++j) {
            config.polarizer_1 = Angle::from_degrees(5.0 * i);
            config.polarizer_2 = Angle::from_degrees(5.0 * j);
            const double far = coincidence_probability(config, 1e6);
            if (far < 1e-6) continue;
            best_ratio = std::max(best_ratio, coincidence_probability(config, 0.0) / far);
        }
    }
    CHECK(best_ratio > 1.5);
}

TEST_CASE("closed-form visibility peaks exactly at the compensation angle") {
    for (int ri = 1; ri <= 10; ++ri) {
        const double reflectivity = 0.05 * ri;
        const double transmissivity = 1.0 - reflectivity;
        double best_v = -1.0;
        double best_angle = 0.0;
        for (double deg = 0.0; deg <= 90.0; deg += 0.5) {
            const double v =
                closed_form_visibility(reflectivity, transmissivity, Angle::from_degrees(deg));
            if (v > best_v) {
                best_v = v;
                best_angle = deg;
            }
        }
        const double star = compensation_angle(reflectivity, transmissivity).degrees();
        CHECK(std::abs(best_angle - star) <= 0.5);
    }
}

TEST_CASE("delay elements shift the dip center and invalid orderings are rejected") {
    const Angle star = compensation_angle(0.1, 0.9);
    ExperimentConfig config = make_aligned_experiment(0.1, star, Angle::from_degrees(0.0));
    config.elements.push_back(OpticalElement::delay(Arm::InputA, 50.0));

    // Null moves to scan delay -50 fs so that the net delay vanishes.
    CHECK(coincidence_probability(config, -50.0) <= 1e-12);
    CHECK(coincidence_probability(config, 0.0) > 1e-4);

    ExperimentConfig bad = make_aligned_experiment(0.1, star, Angle::from_degrees(0.0));
    bad.elements.push_back(OpticalElement::polarizer(Arm::Output1, Angle::from_degrees(10.0)));
    bad.elements.push_back(OpticalElement::delay(Arm::Output1, 5.0));
    CHECK_THROWS_AS(enumerate_amplitudes(bad), ConfigError);
    CHECK_THROWS_AS(coincidence_probability(bad, 0.0), ConfigError);
    CHECK_THROWS_AS(outcome_probabilities(bad, 0.0), ConfigError);
}
