#include "homsim/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "homsim/parallel.hpp"

namespace homsim {

namespace {

constexpr double kSpeedOfLight = 299792458.0;  // m/s
constexpr double kFwhmToSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

bool is_input(Arm arm) { return arm == Arm::InputA || arm == Arm::InputB; }

// Delay elements are folded into the temporal envelope before the photons
// meet the analyzers; an ordering with a delay downstream of a polarizer is
// not representable.
void validate_element_order(const ExperimentConfig& config) {
    for (Arm arm : {Arm::InputA, Arm::InputB, Arm::Output1, Arm::Output2}) {
        bool saw_polarizer = false;
        for (const auto& e : config.elements) {
            if (e.location != arm) continue;
            if (e.kind == OpticalElement::Kind::Polarizer) saw_polarizer = true;
            if (e.kind == OpticalElement::Kind::Delay && saw_polarizer) {
                throw ConfigError(std::string("delay element downstream of a polarizer on arm ") +
                                  arm_name(arm) + " is unsupported");
            }
        }
    }
}

// Net relative delay: the scan delay plus fixed delay elements on the input
// arms (positive on arm a retards photon A). Delays on the output arms are
// common to both two-photon terms and cancel in every outcome probability.
double effective_delay_fs(const ExperimentConfig& config, double scan_delay_fs) {
    double d = scan_delay_fs;
    for (const auto& e : config.elements) {
        if (e.kind != OpticalElement::Kind::Delay) continue;
        if (e.location == Arm::InputA) d += e.delay_fs;
        if (e.location == Arm::InputB) d -= e.delay_fs;
    }
    return d;
}

// Composite polarization action of one arm's element chain (polarizers as
// projectors, delays as identity).
JonesMatrix chain_matrix(const ExperimentConfig& config, Arm arm) {
    JonesMatrix m = JonesMatrix::identity();
    for (const auto& e : config.elements) {
        if (e.location == arm) m = e.jones() * m;
    }
    return m;
}

int count_polarizers(const ExperimentConfig& config) {
    int n = 2;  // the two analyzers
    for (const auto& e : config.elements) {
        if (e.kind == OpticalElement::Kind::Polarizer) ++n;
    }
    return n;
}

// Single-photon transfer through the whole network, with every polarizer's
// rejected component routed to its own loss slot so the map stays an
// isometry. Through modes: (arm1 H, arm1 V, arm2 H, arm2 V).
struct SingleVector {
    std::array<Complex, 4> through{};
    std::vector<Complex> absorbed;
};

void apply_polarizer(JonesVector& block, Angle axis, Complex& loss_slot) {
    const JonesVector e = linear_state(axis);
    const JonesVector e_perp = linear_state(axis + Angle::from_degrees(90.0));
    const Complex pass = inner(e, block);
    loss_slot = inner(e_perp, block);
    block = {e.h * pass, e.v * pass};
}

SingleVector propagate(const ExperimentConfig& config, const JonesVector& psi, Arm input_arm,
                       const JonesMatrix& spatial) {
    SingleVector out;
    out.absorbed.assign(static_cast<std::size_t>(count_polarizers(config)), Complex{0.0, 0.0});

    JonesVector block_a{0.0, 0.0};
    JonesVector block_b{0.0, 0.0};
    (input_arm == Arm::InputA ? block_a : block_b) = psi;

    std::size_t loss_index = 0;
    for (const auto& e : config.elements) {
        if (!is_input(e.location)) continue;
        JonesVector& block = e.location == Arm::InputA ? block_a : block_b;
        if (e.kind == OpticalElement::Kind::Polarizer) {
            apply_polarizer(block, e.axis, out.absorbed[loss_index++]);
        } else {
            block = e.jones() * block;
        }
    }

    // Splitter mixes the spatial modes only: out1 = s00 a + s01 b, etc.
    JonesVector block_1{spatial.m00 * block_a.h + spatial.m01 * block_b.h,
                        spatial.m00 * block_a.v + spatial.m01 * block_b.v};
    JonesVector block_2{spatial.m10 * block_a.h + spatial.m11 * block_b.h,
                        spatial.m10 * block_a.v + spatial.m11 * block_b.v};

    for (const auto& e : config.elements) {
        if (is_input(e.location)) continue;
        JonesVector& block = e.location == Arm::Output1 ? block_1 : block_2;
        if (e.kind == OpticalElement::Kind::Polarizer) {
            apply_polarizer(block, e.axis, out.absorbed[loss_index++]);
        } else {
            block = e.jones() * block;
        }
    }

    apply_polarizer(block_1, config.polarizer_1, out.absorbed[loss_index++]);
    apply_polarizer(block_2, config.polarizer_2, out.absorbed[loss_index++]);

    out.through = {block_1.h, block_1.v, block_2.h, block_2.v};
    return out;
}

enum class Channel { D1, D2, Loss };

Channel channel_of(std::size_t mode) {
    if (mode < 2) return Channel::D1;
    if (mode < 4) return Channel::D2;
    return Channel::Loss;
}

OutcomeProbabilities outcomes_impl(const ExperimentConfig& config, double delay_fs,
                                   const JonesMatrix& spatial) {
    validate_element_order(config);

    const SingleVector a = propagate(config, config.pair.psi_a, Arm::InputA, spatial);
    const SingleVector b = propagate(config, config.pair.psi_b, Arm::InputB, spatial);
    const double overlap = temporal_overlap(effective_delay_fs(config, delay_fs), config.pair);

    std::vector<Complex> alpha(a.through.begin(), a.through.end());
    alpha.insert(alpha.end(), a.absorbed.begin(), a.absorbed.end());
    std::vector<Complex> beta(b.through.begin(), b.through.end());
    beta.insert(beta.end(), b.absorbed.begin(), b.absorbed.end());

    OutcomeProbabilities out;
    const std::size_t n = alpha.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double p;
            if (i == j) {
                // Both photons in one discrete mode: bosonic enhancement.
                p = std::norm(alpha[i] * beta[i]) * (1.0 + overlap);
            } else {
                // Two assignments (A->i, B->j) and (B->i, A->j) interfere
                // with weight given by the temporal overlap.
                const Complex u = alpha[i] * beta[j];
                const Complex v = beta[i] * alpha[j];
                p = std::norm(u) + std::norm(v) + 2.0 * (u * std::conj(v)).real() * overlap;
            }
            const Channel ci = channel_of(i);
            const Channel cj = channel_of(j);
            if (ci == Channel::Loss || cj == Channel::Loss) {
                out.absorbed += p;
            } else if (ci == Channel::D1 && cj == Channel::D1) {
                out.both_d1 += p;
            } else if (ci == Channel::D2 && cj == Channel::D2) {
                out.both_d2 += p;
            } else {
                out.coincidence += p;
            }
        }
    }
    return out;
}

}  // namespace

TwoPhotonAmplitudes enumerate_amplitudes(const ExperimentConfig& config) {
    validate_element_order(config);

    const JonesVector psi_a = chain_matrix(config, Arm::InputA) * config.pair.psi_a;
    const JonesVector psi_b = chain_matrix(config, Arm::InputB) * config.pair.psi_b;
    const JonesMatrix u1 = chain_matrix(config, Arm::Output1);
    const JonesMatrix u2 = chain_matrix(config, Arm::Output2);
    const JonesVector p1 = linear_state(config.polarizer_1);
    const JonesVector p2 = linear_state(config.polarizer_2);

    const Complex r2 = config.splitter.r * config.splitter.r;
    const Complex t2 = config.splitter.t * config.splitter.t;

    TwoPhotonAmplitudes amp;
    amp.a_rr = r2 * inner(p1, u1 * psi_a) * inner(p2, u2 * psi_b);
    amp.a_tt = t2 * inner(p2, u2 * psi_a) * inner(p1, u1 * psi_b);
    return amp;
}

double temporal_overlap(double delay_fs, const PhotonPairSpec& pair) {
    if (!(pair.filter_fwhm_nm > 0.0) || !(pair.center_wavelength_nm > 0.0)) {
        throw std::domain_error("temporal_overlap: filter FWHM and wavelength must be positive");
    }
    const double lambda = pair.center_wavelength_nm * 1e-9;
    const double fwhm_w = 2.0 * kPi * kSpeedOfLight * pair.filter_fwhm_nm * 1e-9 / (lambda * lambda);
    const double sigma_w = fwhm_w / kFwhmToSigma;
    const double x = sigma_w * delay_fs * 1e-15;
    return std::exp(-x * x);
}

double coincidence_probability(const ExperimentConfig& config, double delay_fs) {
    const TwoPhotonAmplitudes amp = enumerate_amplitudes(config);
    const double overlap = temporal_overlap(effective_delay_fs(config, delay_fs), config.pair);
    const double p = std::norm(amp.a_rr) + std::norm(amp.a_tt) +
                     2.0 * (std::conj(amp.a_rr) * amp.a_tt).real() * overlap;
    return std::max(0.0, p);
}

OutcomeProbabilities outcome_probabilities(const ExperimentConfig& config, double delay_fs) {
    return outcomes_impl(config, delay_fs, config.splitter.spatial_matrix());
}

OutcomeProbabilities outcome_probabilities(const ExperimentConfig& config, double delay_fs,
                                           const JonesMatrix& spatial_splitter) {
    return outcomes_impl(config, delay_fs, spatial_splitter);
}

DipCurve dip_scan(const ExperimentConfig& config, const std::vector<double>& delays_fs) {
    for (std::size_t i = 1; i < delays_fs.size(); ++i) {
        if (!(delays_fs[i] > delays_fs[i - 1])) {
            throw std::invalid_argument("dip_scan: delays must be strictly increasing");
        }
    }
    DipCurve curve;
    curve.delays_fs = delays_fs;
    curve.values.resize(delays_fs.size());
    parallel_for(delays_fs.size(), [&](std::size_t i) {
        curve.values[i] = coincidence_probability(config, delays_fs[i]);
    });
    return curve;
}

namespace {

void validate_split(double reflectivity, double transmissivity) {
    if (!(reflectivity > 0.0) || !(reflectivity < 1.0) || !(transmissivity > 0.0) ||
        !(transmissivity < 1.0) || std::abs(reflectivity + transmissivity - 1.0) > 1e-9) {
        throw std::domain_error("R and T must lie in (0, 1) with R + T = 1");
    }
}

}  // namespace

double closed_form_visibility(double reflectivity, double transmissivity, Angle delta_theta) {
    validate_split(reflectivity, transmissivity);
    const double c = std::cos(delta_theta.radians());
    const double c2 = c * c;
    return 2.0 * reflectivity * transmissivity * c2 /
           (reflectivity * reflectivity + transmissivity * transmissivity * c2 * c2);
}

double relative_rate(double reflectivity, double transmissivity, Angle delta_theta) {
    validate_split(reflectivity, transmissivity);
    const double c = std::cos(delta_theta.radians());
    const double c2 = c * c;
    return reflectivity * reflectivity + transmissivity * transmissivity * c2 * c2;
}

Angle compensation_angle(double reflectivity, double transmissivity) {
    validate_split(reflectivity, transmissivity);
    if (reflectivity > transmissivity) {
        throw std::domain_error(
            "compensation infeasible for R > T: only the transmitted amplitude is attenuated");
    }
    return Angle::from_radians(std::acos(std::sqrt(reflectivity / transmissivity)));
}

ExperimentConfig make_aligned_experiment(double reflectivity, Angle theta_a, Angle theta_b) {
    ExperimentConfig config;
    config.pair.psi_a = linear_state(theta_a);
    config.pair.psi_b = linear_state(theta_b);
    config.splitter = make_beamsplitter(reflectivity);
    config.polarizer_1 = theta_a;
    config.polarizer_2 = theta_b;
    return config;
}

double curve_visibility(const DipCurve& curve) {
    if (curve.values.empty()) throw std::invalid_argument("curve_visibility: empty curve");
    const auto [lo, hi] = std::minmax_element(curve.values.begin(), curve.values.end());
    if (*hi <= 0.0) return 0.0;
    return (*hi - *lo) / *hi;
}

double curve_baseline(const DipCurve& curve) {
    if (curve.values.empty()) throw std::invalid_argument("curve_baseline: empty curve");
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.delays_fs.size(); ++i) {
        if (std::abs(curve.delays_fs[i]) > std::abs(curve.delays_fs[best])) best = i;
    }
    return curve.values[best];
}

double curve_peak_visibility(const DipCurve& curve) {
    const double baseline = curve_baseline(curve);
    if (baseline <= 0.0) return 0.0;
    const double hi = *std::max_element(curve.values.begin(), curve.values.end());
    return (hi - baseline) / baseline;
}

}  // namespace homsim
