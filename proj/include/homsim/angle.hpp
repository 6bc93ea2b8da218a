#pragma once

#include <cmath>

namespace homsim {

inline constexpr double kPi = 3.14159265358979323846;

// Plane angle stored in radians. Interfaces that face the user (DSL, CLI,
// reports) speak degrees; everything internal is radians.
class Angle {
public:
    constexpr Angle() = default;

    static constexpr Angle from_radians(double r) { return Angle{r}; }
    static constexpr Angle from_degrees(double d) { return Angle{d * kPi / 180.0}; }

    constexpr double radians() const { return rad_; }
    constexpr double degrees() const { return rad_ * 180.0 / kPi; }

    // Polarizer axes are lines, not directions: axis and axis + 180 deg are
    // physically the same element. Maps into [0, pi).
    Angle normalized_axis() const {
        double r = std::fmod(rad_, kPi);
        if (r < 0.0) r += kPi;
        return Angle{r};
    }

    // Signed normalization into (-pi, pi], used for waveplate fast axes.
    Angle normalized_signed() const {
        double r = std::fmod(rad_, 2.0 * kPi);
        if (r > kPi) r -= 2.0 * kPi;
        if (r <= -kPi) r += 2.0 * kPi;
        return Angle{r};
    }

    constexpr Angle operator+(Angle o) const { return Angle{rad_ + o.rad_}; }
    constexpr Angle operator-(Angle o) const { return Angle{rad_ - o.rad_}; }
    constexpr Angle operator-() const { return Angle{-rad_}; }

    constexpr bool operator==(const Angle&) const = default;

private:
    explicit constexpr Angle(double r) : rad_(r) {}
    double rad_ = 0.0;
};

inline double cos(Angle a) { return std::cos(a.radians()); }
inline double sin(Angle a) { return std::sin(a.radians()); }

}  // namespace homsim
