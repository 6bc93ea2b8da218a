#include "homsim/experiment.hpp"

namespace homsim {

std::vector<OpticalElement> elements_on(const ExperimentConfig& config, Arm arm) {
    std::vector<OpticalElement> out;
    for (const auto& e : config.elements) {
        if (e.location == arm) out.push_back(e);
    }
    return out;
}

}  // namespace homsim
