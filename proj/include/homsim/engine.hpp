#pragma once

#include <stdexcept>
#include <vector>

#include "homsim/experiment.hpp"

namespace homsim {

// An experiment description the engine cannot evaluate (e.g. a delay element
// placed downstream of a polarizer on the same arm).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Coincidence path amplitudes after analyzer projection: both photons
// reflected (a_rr) and both transmitted (a_tt). Geometry: photon A reflects
// toward D1 and transmits toward D2; photon B the reverse.
struct TwoPhotonAmplitudes {
    Complex a_rr{0.0, 0.0};
    Complex a_tt{0.0, 0.0};
};

// Coincidence probability sampled over relative optical delay.
struct DipCurve {
    std::vector<double> delays_fs;
    std::vector<double> values;
};

// Exhaustive detection bookkeeping for one delay. `absorbed` collects every
// outcome in which at least one photon was lost at a polarizer; the four
// fields sum to 1.
struct OutcomeProbabilities {
    double coincidence = 0.0;
    double both_d1 = 0.0;
    double both_d2 = 0.0;
    double absorbed = 0.0;

    double total() const { return coincidence + both_d1 + both_d2 + absorbed; }
};

TwoPhotonAmplitudes enumerate_amplitudes(const ExperimentConfig& config);

// Indistinguishability factor multiplying the two-photon cross term:
// the normalized magnitude of the spectral overlap of the pair behind
// identical Gaussian filters. Equals exp(-(sigma_w tau)^2) with sigma_w the
// std dev of the filter intensity spectrum in angular frequency; 1/e point
// at 82.833 fs for the default 10 nm filters at 814 nm.
double temporal_overlap(double delay_fs, const PhotonPairSpec& pair);

// |a_rr|^2 + |a_tt|^2 + 2 Re(conj(a_rr) a_tt) O(delay), clamped at zero
// against roundoff at a perfect null.
double coincidence_probability(const ExperimentConfig& config, double delay_fs);

OutcomeProbabilities outcome_probabilities(const ExperimentConfig& config, double delay_fs);

// Same, with the splitter's 2x2 spatial action replaced by an arbitrary
// lossless unitary. Exists so tests can assert that any phase convention
// with the same |r|, |t| leaves every probability unchanged.
OutcomeProbabilities outcome_probabilities(const ExperimentConfig& config, double delay_fs,
                                           const JonesMatrix& spatial_splitter);

// Pointwise coincidence_probability; delays must be strictly increasing.
// Points are evaluated in parallel when HOMSIM_THREADS allows.
DipCurve dip_scan(const ExperimentConfig& config, const std::vector<double>& delays_fs);

// Dip visibility for input states differing by delta_theta, analyzers
// aligned with the inputs: 2 R T cos^2 / (R^2 + T^2 cos^4).
double closed_form_visibility(double reflectivity, double transmissivity, Angle delta_theta);

// Large-delay coincidence rate relative to an unfiltered pair:
// R^2 + T^2 cos^4(delta_theta).
double relative_rate(double reflectivity, double transmissivity, Angle delta_theta);

// The unique delta_theta in [0, 90 deg] with cos^2 = R/T, at which the
// closed-form visibility reaches 1. Requires R <= T (the transmitted
// amplitude is the one attenuated); throws std::domain_error otherwise.
Angle compensation_angle(double reflectivity, double transmissivity);

// The standard geometry: linear inputs at theta_a / theta_b with analyzers
// aligned to them, default 814 nm / 10 nm pair.
ExperimentConfig make_aligned_experiment(double reflectivity, Angle theta_a, Angle theta_b);

// (max - min) / max of the curve. Zero for a flat curve.
double curve_visibility(const DipCurve& curve);

// Curve value at the largest |delay| sample.
double curve_baseline(const DipCurve& curve);

// (max - baseline) / baseline; positive when the center is enhanced.
double curve_peak_visibility(const DipCurve& curve);

}  // namespace homsim
