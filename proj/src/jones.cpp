#include "homsim/jones.hpp"

#include <cmath>
#include <stdexcept>

namespace homsim {

bool JonesMatrix::is_unitary(double tol) const {
    const JonesMatrix p = adjoint() * (*this);
    return std::abs(p.m00 - Complex{1.0}) <= tol && std::abs(p.m11 - Complex{1.0}) <= tol &&
           std::abs(p.m01) <= tol && std::abs(p.m10) <= tol;
}

JonesVector linear_state(Angle theta) {
    return {Complex{std::cos(theta.radians()), 0.0}, Complex{std::sin(theta.radians()), 0.0}};
}

JonesMatrix rotation(Angle phi) {
    const double c = std::cos(phi.radians());
    const double s = std::sin(phi.radians());
    return {Complex{c}, Complex{-s}, Complex{s}, Complex{c}};
}

JonesMatrix polarizer(Angle axis) {
    const double c = std::cos(axis.radians());
    const double s = std::sin(axis.radians());
    return {Complex{c * c}, Complex{c * s}, Complex{c * s}, Complex{s * s}};
}

JonesMatrix waveplate(double retardance_rad, Angle fast_axis) {
    const Complex fast = std::exp(Complex{0.0, -retardance_rad / 2.0});
    const Complex slow = std::exp(Complex{0.0, +retardance_rad / 2.0});
    const JonesMatrix d{fast, 0.0, 0.0, slow};
    return rotation(fast_axis) * d * rotation(-fast_axis);
}

JonesMatrix half_waveplate(Angle fast_axis) { return waveplate(kPi, fast_axis); }

JonesMatrix quarter_waveplate(Angle fast_axis) { return waveplate(kPi / 2.0, fast_axis); }

RetarderFactors retarder_factors(const JonesMatrix& u) {
    if (!u.is_unitary(1e-9)) {
        throw std::invalid_argument("retarder_factors: matrix is not unitary");
    }
    // Normalize to SU(2): U = [[alpha, beta], [-conj(beta), conj(alpha)]].
    const Complex det = u.m00 * u.m11 - u.m01 * u.m10;
    const Complex scale = std::sqrt(det);
    const Complex alpha = u.m00 / scale;
    const Complex beta = u.m01 / scale;

    // With s = rot + ... the su(2) entries read
    //   alpha = cos(d/2) cos(s) - i sin(d/2) cos(p)
    //   beta  = -cos(d/2) sin(s) - i sin(d/2) sin(p)
    // where s and p are sums/differences of the two frame rotations.
    const double cos_half = std::hypot(alpha.real(), beta.real());
    const double sin_half = std::hypot(alpha.imag(), beta.imag());
    const double retardance = 2.0 * std::atan2(sin_half, cos_half);
    const double s = cos_half > 1e-15 ? std::atan2(-beta.real(), alpha.real()) : 0.0;
    const double p = sin_half > 1e-15 ? std::atan2(-beta.imag(), -alpha.imag()) : 0.0;

    RetarderFactors f;
    f.rot = Angle::from_radians(s).normalized_signed();
    f.retardance = retardance;
    f.axis = Angle::from_radians((p - s) / 2.0).normalized_signed();
    return f;
}

}  // namespace homsim
