#pragma once

#include <random>

#include "homsim/engine.hpp"
#include "homsim/fiber.hpp"

namespace homsim::testutil {

// Any invalid-order (delay after polarizer) placements are avoided so the
// generated config is always evaluable.
inline ExperimentConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_int_distribution<int> count(0, 4);
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_int_distribution<int> arm_pick(0, 3);

    ExperimentConfig config;
    config.splitter = make_beamsplitter(0.02 + 0.96 * unit(rng));
    config.pair.psi_a = haar_random_unitary(rng) * JonesVector{1.0, 0.0};
    config.pair.psi_b = haar_random_unitary(rng) * JonesVector{1.0, 0.0};
    config.polarizer_1 = Angle::from_radians(angle(rng));
    config.polarizer_2 = Angle::from_radians(angle(rng));

    const Arm arms[] = {Arm::InputA, Arm::InputB, Arm::Output1, Arm::Output2};
    bool polarizer_seen[4] = {false, false, false, false};
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        const int a = arm_pick(rng);
        switch (kind(rng)) {
            case 0:
                config.elements.push_back(OpticalElement::waveplate(
                    arms[a], 2.0 * kPi * unit(rng), Angle::from_radians(angle(rng))));
                break;
            case 1:
                config.elements.push_back(
                    OpticalElement::polarizer(arms[a], Angle::from_radians(angle(rng))));
                polarizer_seen[a] = true;
                break;
            case 2:
                config.elements.push_back(OpticalElement::fiber(arms[a], haar_random_unitary(rng)));
                break;
            case 3:
                if (polarizer_seen[a]) {
                    config.elements.push_back(OpticalElement::fiber(arms[a], haar_random_unitary(rng)));
                } else {
                    config.elements.push_back(
                        OpticalElement::delay(arms[a], 400.0 * (unit(rng) - 0.5)));
                }
                break;
        }
    }
    return config;
}

}  // namespace homsim::testutil
