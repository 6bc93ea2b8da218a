#pragma once

#include <vector>

#include "homsim/elements.hpp"
#include "homsim/splitter.hpp"

namespace homsim {

// The photon pair entering the interferometer: polarization states of the
// upper (A) and lower (B) input photons plus the common filter spectrum.
struct PhotonPairSpec {
    JonesVector psi_a{1.0, 0.0};         // upper input
    JonesVector psi_b{1.0, 0.0};         // lower input
    double center_wavelength_nm = 814.0;
    double filter_fwhm_nm = 10.0;

    bool operator==(const PhotonPairSpec&) const = default;
};

// Full description of one dip/peak experiment. polarizer_1/2 are the
// analyzers immediately before D1 and D2; additional elements (including
// extra polarizers) may sit anywhere via `elements`.
struct ExperimentConfig {
    PhotonPairSpec pair;
    SplitterSpec splitter;
    std::vector<OpticalElement> elements;
    Angle polarizer_1{};
    Angle polarizer_2{};

    bool operator==(const ExperimentConfig&) const = default;
};

std::vector<OpticalElement> elements_on(const ExperimentConfig& config, Arm arm);

}  // namespace homsim
