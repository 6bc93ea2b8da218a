#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "homsim/engine.hpp"

namespace homsim {

// Fit failure on data that carries no identifiable feature.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One counting-experiment sample: integrated coincidences at one delay.
struct CountRecord {
    double delay_fs = 0.0;
    long long counts = 0;
    double duration_s = 1.0;
};

// Poisson synthesis parameters for emulating a counting run.
struct SynthesisSettings {
    double pair_rate_hz = 1000.0;  // detected pairs per second at unit probability
    double dwell_s = 1.0;          // integration time per point
    std::uint64_t seed = 0;

    bool operator==(const SynthesisSettings&) const = default;
};

// Gaussian fit of a dip (or peak): rate(x) = baseline * (1 - V exp(-(x-c)^2/w^2)).
// dip_depth = baseline * V is signed, negative for a peak.
struct FitResult {
    double baseline = 0.0;
    double dip_depth = 0.0;
    double center_fs = 0.0;
    double width_fs = 0.0;  // Gaussian 1/e half-width
    double visibility = 0.0;
    double visibility_sigma = 0.0;
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Draws each point from Poisson(curve value * pair_rate * duration).
// Identical seeds give identical sequences.
std::vector<CountRecord> synthesize_counts(const DipCurve& curve, double pair_rate_hz,
                                           double duration_per_point_s, std::uint64_t seed);

// Damped least squares with analytic Jacobian, max 200 iterations, relative
// step tolerance 1e-10. Initialization: baseline from the outer 20% of
// points, center at the extremal point, width = half the scan range,
// V from min/max. The 1-sigma visibility uncertainty comes from the inverse
// Gauss-Newton normal matrix scaled by the residual variance.
FitResult fit_gaussian(const std::vector<double>& xs_fs, const std::vector<double>& ys);

// fit_gaussian on count rates (counts / duration). Requires >= 5 points and
// not-all-equal counts.
FitResult fit_gaussian_dip(const std::vector<CountRecord>& data);

struct SweepPoint {
    Angle delta_theta;
    FitResult fit;
};

// For each delta_theta: aligned-geometry scan, optional Poisson noise
// (per-angle seed = settings.seed + index), Gaussian fit. An exactly flat
// curve (delta_theta = 90 deg) is reported as visibility 0 without fitting.
// Fit failures are reported per point (converged = false), never aborting
// the sweep.
std::vector<SweepPoint> visibility_sweep(double reflectivity, double transmissivity,
                                         const std::vector<Angle>& angles,
                                         const std::optional<SynthesisSettings>& noise = std::nullopt);

// Delay grid used by visibility_sweep: 121 points over [-600, 600] fs, wide
// enough that the endpoints sit at the uncontaminated baseline.
std::vector<double> sweep_delay_grid();

}  // namespace homsim
