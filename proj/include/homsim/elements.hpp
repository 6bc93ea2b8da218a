#pragma once

#include "homsim/jones.hpp"

namespace homsim {

// The four arms of the interferometer: two inputs feeding the splitter and
// the two output arms ending at detectors D1 and D2.
enum class Arm { InputA, InputB, Output1, Output2 };

// One optical element placed on one arm. Elements on an arm act in list
// order (propagation order).
struct OpticalElement {
    enum class Kind { Waveplate, Polarizer, FiberSegment, Delay };

    Kind kind = Kind::Waveplate;
    Arm location = Arm::InputA;
    double retardance = 0.0;   // Waveplate, FiberSegment (radians)
    Angle axis{};              // Waveplate/FiberSegment fast axis, Polarizer axis
    Angle rot{};               // FiberSegment extra rotation
    double delay_fs = 0.0;     // Delay
    JonesMatrix matrix{};      // FiberSegment explicit unitary
    bool from_params = true;   // FiberSegment built from (rot, retardance, axis)?

    static OpticalElement waveplate(Arm arm, double retardance, Angle fast_axis);
    static OpticalElement half_waveplate(Arm arm, Angle fast_axis);
    static OpticalElement quarter_waveplate(Arm arm, Angle fast_axis);
    static OpticalElement polarizer(Arm arm, Angle axis);
    static OpticalElement fiber(Arm arm, Angle rot, double retardance, Angle axis);
    static OpticalElement fiber(Arm arm, const JonesMatrix& u);
    static OpticalElement delay(Arm arm, double fs);

    // Polarization action; identity for Delay, projector for Polarizer.
    JonesMatrix jones() const;

    bool operator==(const OpticalElement&) const = default;
};

const char* arm_name(Arm arm);

}  // namespace homsim
