#include "homsim/splitter.hpp"

#include <cmath>
#include <stdexcept>

namespace homsim {

SplitterSpec make_beamsplitter(double reflectivity) {
    if (!(reflectivity > 0.0) || !(reflectivity < 1.0)) {
        throw std::domain_error("beamsplitter reflectivity must lie in (0, 1)");
    }
    SplitterSpec s;
    s.refl_ = reflectivity;
    s.trans_ = 1.0 - reflectivity;
    s.r = Complex{0.0, std::sqrt(reflectivity)};
    s.t = Complex{std::sqrt(s.trans_), 0.0};
    return s;
}

}  // namespace homsim
