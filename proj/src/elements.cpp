#include "homsim/elements.hpp"

namespace homsim {

OpticalElement OpticalElement::waveplate(Arm arm, double retardance, Angle fast_axis) {
    OpticalElement e;
    e.kind = Kind::Waveplate;
    e.location = arm;
    e.retardance = retardance;
    e.axis = fast_axis;
    return e;
}

OpticalElement OpticalElement::half_waveplate(Arm arm, Angle fast_axis) {
    return waveplate(arm, kPi, fast_axis);
}

OpticalElement OpticalElement::quarter_waveplate(Arm arm, Angle fast_axis) {
    return waveplate(arm, kPi / 2.0, fast_axis);
}

OpticalElement OpticalElement::polarizer(Arm arm, Angle axis) {
    OpticalElement e;
    e.kind = Kind::Polarizer;
    e.location = arm;
    e.axis = axis;
    return e;
}

OpticalElement OpticalElement::fiber(Arm arm, Angle rot, double retardance, Angle axis) {
    OpticalElement e;
    e.kind = Kind::FiberSegment;
    e.location = arm;
    e.rot = rot;
    e.retardance = retardance;
    e.axis = axis;
    e.matrix = rotation(rot) * homsim::waveplate(retardance, axis);
    e.from_params = true;
    return e;
}

OpticalElement OpticalElement::fiber(Arm arm, const JonesMatrix& u) {
    OpticalElement e;
    e.kind = Kind::FiberSegment;
    e.location = arm;
    e.matrix = u;
    e.from_params = false;
    return e;
}

OpticalElement OpticalElement::delay(Arm arm, double fs) {
    OpticalElement e;
    e.kind = Kind::Delay;
    e.location = arm;
    e.delay_fs = fs;
    return e;
}

JonesMatrix OpticalElement::jones() const {
    switch (kind) {
        case Kind::Waveplate:
            return homsim::waveplate(retardance, axis);
        case Kind::Polarizer:
            return homsim::polarizer(axis);
        case Kind::FiberSegment:
            return matrix;
        case Kind::Delay:
            return JonesMatrix::identity();
    }
    return JonesMatrix::identity();
}

const char* arm_name(Arm arm) {
    switch (arm) {
        case Arm::InputA: return "a";
        case Arm::InputB: return "b";
        case Arm::Output1: return "1";
        case Arm::Output2: return "2";
    }
    return "?";
}

}  // namespace homsim
