#pragma once

#include "homsim/jones.hpp"

namespace homsim {

// Non-polarizing beamsplitter, symmetric phase convention r = i sqrt(R),
// t = sqrt(T). The intensities are stored so that R + T == 1 holds exactly.
struct SplitterSpec {
    Complex r{0.0, 0.0};  // amplitude reflection
    Complex t{0.0, 0.0};  // amplitude transmission

    double reflectivity() const { return refl_; }
    double transmissivity() const { return trans_; }

    // Spatial-mode action: out1 = r*a + t*b, out2 = t*a + r*b.
    JonesMatrix spatial_matrix() const { return {r, t, t, r}; }

    bool operator==(const SplitterSpec&) const = default;

    friend SplitterSpec make_beamsplitter(double reflectivity);

private:
    double refl_ = 0.0;
    double trans_ = 0.0;
};

// Throws std::domain_error for reflectivity outside (0, 1): R = 0 or 1 gives
// no interferometer.
SplitterSpec make_beamsplitter(double reflectivity);

}  // namespace homsim
