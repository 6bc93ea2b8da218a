#include "homsim/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace homsim {

JonesMatrix haar_random_unitary(std::mt19937_64& rng) {
    // Uniform point on the unit 3-sphere -> Haar on SU(2).
    std::normal_distribution<double> normal(0.0, 1.0);
    double q[4];
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (double& x : q) {
            x = normal(rng);
            norm2 += x * x;
        }
    } while (norm2 < 1e-12);
    const double inv = 1.0 / std::sqrt(norm2);
    const Complex a{q[0] * inv, q[1] * inv};
    const Complex b{q[2] * inv, q[3] * inv};
    return {a, b, -std::conj(b), std::conj(a)};
}

FiberChannel random_fiber(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    FiberChannel channel;
    channel.u_in_a = haar_random_unitary(rng);
    channel.u_in_b = haar_random_unitary(rng);
    channel.u_out_1 = haar_random_unitary(rng);
    channel.u_out_2 = haar_random_unitary(rng);
    return channel;
}

JonesMatrix paddle_stack(const PaddleSettings& settings) {
    return quarter_waveplate(settings.paddle_axes[2]) * half_waveplate(settings.paddle_axes[1]) *
           quarter_waveplate(settings.paddle_axes[0]);
}

JonesMatrix twist_plate(const PaddleSettings& settings) {
    return waveplate(settings.twist_retardance, Angle::from_degrees(0.0));
}

double measure_probe(const FiberChannel& channel, const PaddleSettings& settings,
                     const JonesVector& probe, Angle analyzer, Arm output_arm) {
    if (std::abs(probe.norm2() - 1.0) > 1e-9) {
        throw std::invalid_argument("measure_probe: probe must be unit norm");
    }
    if (output_arm != Arm::Output1 && output_arm != Arm::Output2) {
        throw std::invalid_argument("measure_probe: arm must be an output arm");
    }
    JonesVector v = channel.u_in_a * probe;
    v = paddle_stack(settings) * v;
    if (output_arm == Arm::Output1) {
        v = channel.u_out_1 * v;
        v = twist_plate(settings) * v;
    } else {
        v = channel.u_out_2 * v;
    }
    return std::norm(inner(linear_state(analyzer), v));
}

namespace {

constexpr long long kEvalBudget = 10000;

struct ProbeCounter {
    const FiberChannel& channel;
    long long evals = 0;

    double power(const PaddleSettings& s, const JonesVector& probe, Angle analyzer) {
        ++evals;
        return measure_probe(channel, s, probe, analyzer, Arm::Output1);
    }
    long long remaining() const { return kEvalBudget - evals; }
};

const JonesVector kProbeH = linear_state(Angle::from_degrees(0.0));
const JonesVector kProbeV = linear_state(Angle::from_degrees(90.0));
const JonesVector kProbe45 = linear_state(Angle::from_degrees(45.0));
const Angle kAnalyzerH = Angle::from_degrees(0.0);
const Angle kAnalyzerV = Angle::from_degrees(90.0);
const Angle kAnalyzerM45 = Angle::from_degrees(-45.0);

double leak_sum(ProbeCounter& probe, const PaddleSettings& s) {
    return probe.power(s, kProbeH, kAnalyzerV) + probe.power(s, kProbeV, kAnalyzerH);
}

double leak_max(ProbeCounter& probe, const PaddleSettings& s) {
    return std::max(probe.power(s, kProbeH, kAnalyzerV), probe.power(s, kProbeV, kAnalyzerH));
}

double phase_power(ProbeCounter& probe, const PaddleSettings& s) {
    return probe.power(s, kProbe45, kAnalyzerM45);
}

// Grid bracketing followed by golden-section refinement of f over
// [center - half, center + half]; stops at xtol or when the budget is gone.
double line_minimize(const std::function<double(double)>& f, double lo, double hi, int grid,
                     double xtol, ProbeCounter& probe, double* fmin_out) {
    double best_x = lo;
    double best_f = f(lo);
    for (int k = 1; k <= grid && probe.remaining() > 2; ++k) {
        const double x = lo + (hi - lo) * k / grid;
        const double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    const double h = (hi - lo) / grid;
    double a = best_x - h;
    double b = best_x + h;

    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - (b - a) * kInvPhi;
    double d = a + (b - a) * kInvPhi;
    double fc = f(c);
    double fd = f(d);
    while (std::abs(b - a) > xtol && probe.remaining() > 2) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * kInvPhi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * kInvPhi;
            fd = f(d);
        }
    }
    const double x = fc < fd ? c : d;
    const double fx = std::min(fc, fd);
    if (fx < best_f) {
        best_f = fx;
        best_x = x;
    }
    if (fmin_out) *fmin_out = best_f;
    return best_x;
}

}  // namespace

CalibrationResult calibrate(const FiberChannel& channel, double tolerance, std::uint64_t seed) {
    if (tolerance < 0.0) throw std::invalid_argument("calibrate: tolerance must be >= 0");

    ProbeCounter probe{channel};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform_axis(0.0, kPi);

    PaddleSettings current;  // all paddles at zero, no twist
    PaddleSettings best = current;
    double best_sum = leak_sum(probe, best);

    // Deep stop: drive the leakage two decades under the requested tolerance
    // so downstream interference checks are not limited by the alignment.
    const double stop_sum = std::max(tolerance * 1e-2, 1e-26);
    const long long stage1_budget = kEvalBudget * 17 / 20;

    // Stage 1: paddle sweep, H/V probes against crossed analyzers.
    double current_sum = best_sum;
    while (best_sum > stop_sum && probe.evals < stage1_budget && probe.remaining() > 3) {
        const double before = current_sum;
        for (int coord = 0; coord < 3 && probe.remaining() > 3; ++coord) {
            auto f = [&](double x) {
                PaddleSettings s = current;
                s.paddle_axes[coord] = Angle::from_radians(x);
                return leak_sum(probe, s);
            };
            const double x0 = current.paddle_axes[coord].radians();
            double fx = 0.0;
            const double x = line_minimize(f, x0 - kPi / 2.0, x0 + kPi / 2.0, 12, 1e-13, probe, &fx);
            if (fx < current_sum) {
                current.paddle_axes[coord] = Angle::from_radians(x);
                current_sum = fx;
            }
        }
        if (current_sum < best_sum) {
            best = current;
            best_sum = current_sum;
        }
        if (current_sum > 0.5 * before && current_sum > stop_sum) {
            // Stalled in a poor basin; restart from random paddles.
            for (auto& axis : current.paddle_axes) {
                axis = Angle::from_radians(uniform_axis(rng));
            }
            current_sum = leak_sum(probe, current);
        }
    }

    // Stage 2: twist the output plate until the 45 degree probe emerges
    // linear. The twist is diagonal, so stage 1's leakage is untouched.
    current = best;
    double best_phase_power = phase_power(probe, current);
    if (best_phase_power > stop_sum && probe.remaining() > 3) {
        auto g = [&](double x) {
            PaddleSettings s = current;
            s.twist_retardance = x;
            return phase_power(probe, s);
        };
        double gx = 0.0;
        const double x = line_minimize(g, -kPi, kPi, 24, 1e-13, probe, &gx);
        if (gx < best_phase_power) {
            current.twist_retardance = x;
            best_phase_power = gx;
        }
        best = current;
    }

    for (auto& axis : best.paddle_axes) axis = axis.normalized_axis();
    best.twist_retardance = Angle::from_radians(best.twist_retardance).normalized_signed().radians();

    CalibrationResult result;
    result.settings = best;
    result.residual_hv_leakage = leak_max(probe, best);
    result.residual_phase_error =
        2.0 * std::asin(std::min(1.0, std::sqrt(std::max(0.0, best_phase_power))));
    result.iterations = probe.evals;
    result.converged = result.residual_hv_leakage <= tolerance &&
                       result.residual_phase_error <= tolerance;
    return result;
}

void insert_channel_elements(ExperimentConfig& config, const FiberChannel& channel,
                             const PaddleSettings& settings) {
    config.elements.push_back(OpticalElement::fiber(Arm::InputA, channel.u_in_a));
    config.elements.push_back(
        OpticalElement::quarter_waveplate(Arm::InputA, settings.paddle_axes[0]));
    config.elements.push_back(OpticalElement::half_waveplate(Arm::InputA, settings.paddle_axes[1]));
    config.elements.push_back(
        OpticalElement::quarter_waveplate(Arm::InputA, settings.paddle_axes[2]));
    config.elements.push_back(OpticalElement::fiber(Arm::InputB, channel.u_in_b));
    config.elements.push_back(OpticalElement::fiber(Arm::Output1, channel.u_out_1));
    config.elements.push_back(
        OpticalElement::waveplate(Arm::Output1, settings.twist_retardance, Angle::from_degrees(0.0)));
    config.elements.push_back(OpticalElement::fiber(Arm::Output2, channel.u_out_2));
}

}  // namespace homsim
