#pragma once

#include <complex>

#include "homsim/angle.hpp"

namespace homsim {

using Complex = std::complex<double>;

// Polarization state over the {H, V} basis. norm2() is the survival
// probability of the photon; lossy elements (polarizers) shrink it.
struct JonesVector {
    Complex h{0.0, 0.0};
    Complex v{0.0, 0.0};

    double norm2() const { return std::norm(h) + std::norm(v); }

    bool operator==(const JonesVector&) const = default;
};

// <a|b>, conjugate-linear in the first argument.
inline Complex inner(const JonesVector& a, const JonesVector& b) {
    return std::conj(a.h) * b.h + std::conj(a.v) * b.v;
}

// 2x2 complex matrix. Carries polarization transforms over {H, V}; the same
// algebra is reused for the splitter acting on the two spatial modes.
struct JonesMatrix {
    Complex m00{1.0}, m01{0.0};
    Complex m10{0.0}, m11{1.0};

    static JonesMatrix identity() { return {}; }

    JonesVector operator*(const JonesVector& x) const {
        return {m00 * x.h + m01 * x.v, m10 * x.h + m11 * x.v};
    }

    JonesMatrix operator*(const JonesMatrix& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }

    JonesMatrix adjoint() const {
        return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
    }

    bool is_unitary(double tol = 1e-12) const;

    bool operator==(const JonesMatrix&) const = default;
};

// Unit-norm linear polarization state at angle theta from horizontal.
JonesVector linear_state(Angle theta);

// Rotation of the polarization plane by phi.
JonesMatrix rotation(Angle phi);

// Projector onto the linear state at `axis`. Idempotent, Hermitian, trace 1;
// polarizer(axis) == polarizer(axis + 180 deg) exactly.
JonesMatrix polarizer(Angle axis);

// Linear retarder: phase exp(-i d/2) on the fast axis, exp(+i d/2) on the
// slow axis. A half-waveplate at fast axis phi maps a linear state at theta
// to a linear state at 2 phi - theta.
JonesMatrix waveplate(double retardance_rad, Angle fast_axis);
JonesMatrix half_waveplate(Angle fast_axis);
JonesMatrix quarter_waveplate(Angle fast_axis);

// Euler-style factorization u ~ rotation(rot) * waveplate(retardance, axis)
// up to a global phase; every 2x2 unitary admits one.
struct RetarderFactors {
    Angle rot;
    double retardance = 0.0;
    Angle axis;
};
RetarderFactors retarder_factors(const JonesMatrix& u);

}  // namespace homsim
