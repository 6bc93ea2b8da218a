#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "homsim/experiment.hpp"

namespace homsim {

// Stress-induced birefringence of the fiber coupler: one unknown unitary per
// lead.
struct FiberChannel {
    JonesMatrix u_in_a;
    JonesMatrix u_in_b;
    JonesMatrix u_out_1;
    JonesMatrix u_out_2;

    static FiberChannel identity() { return {}; }
};

// Four independent Haar-random lead unitaries, deterministic per seed.
FiberChannel random_fiber(std::uint64_t seed);

// Haar-distributed 2x2 unitary (uniform over SU(2) up to phase).
JonesMatrix haar_random_unitary(std::mt19937_64& rng);

// The adjustable correction: a quarter/half/quarter paddle stack on the
// upper input lead plus a slightly twistable plate (horizontal fast axis) in
// the upper output port.
struct PaddleSettings {
    std::array<Angle, 3> paddle_axes{};  // quarter, half, quarter fast axes in [0, pi)
    double twist_retardance = 0.0;       // radians in [-pi, pi]

    bool operator==(const PaddleSettings&) const = default;
};

// Stack as seen by light: quarter(paddle 0), half(paddle 1), quarter(paddle 2).
JonesMatrix paddle_stack(const PaddleSettings& settings);
JonesMatrix twist_plate(const PaddleSettings& settings);

struct CalibrationResult {
    PaddleSettings settings;
    double residual_hv_leakage = 0.0;   // worst crossed-analyzer power, upper path
    double residual_phase_error = 0.0;  // radians, from the 45 deg probe
    long long iterations = 0;           // probe-power evaluations spent
    bool converged = false;
};

// Power of a polarized probe sent down the upper input lead and analyzed in
// the chosen output arm, normalized to that arm's splitter throughput.
// Probe must be unit norm; arm must be Output1 or Output2.
double measure_probe(const FiberChannel& channel, const PaddleSettings& settings,
                     const JonesVector& probe, Angle analyzer, Arm output_arm);

// Two stages, in the order the alignment is performed physically: first the
// paddles are adjusted until H and V probes emerge intact on the upper arm
// (crossed-analyzer power minimized), then the output plate is twisted until
// a 45 deg probe emerges linear (power at the -45 deg analyzer minimized).
// Derivative-free: per-coordinate grid bracketing plus golden-section
// refinement, with seeded restarts, capped at 10^4 evaluations. Reports
// best-found settings with converged = false when the tolerance is not met.
CalibrationResult calibrate(const FiberChannel& channel, double tolerance, std::uint64_t seed);

// Inserts the channel's lead unitaries and the correction elements into an
// experiment, in propagation order.
void insert_channel_elements(ExperimentConfig& config, const FiberChannel& channel,
                             const PaddleSettings& settings);

}  // namespace homsim
