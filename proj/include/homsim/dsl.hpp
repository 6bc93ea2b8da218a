#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homsim/analysis.hpp"
#include "homsim/experiment.hpp"

namespace homsim {

// Parser message anchored to a position in the source text (1-based).
struct Diagnostic {
    enum class Severity { Error, Warning };

    Severity severity = Severity::Error;
    int line = 1;
    int column = 1;
    std::string message;
};

struct ScanSettings {
    double from_fs = -300.0;
    double to_fs = 300.0;
    int steps = 41;

    std::vector<double> delays() const;

    bool operator==(const ScanSettings&) const = default;
};

struct ParsedExperiment {
    ExperimentConfig config;
    ScanSettings scan;
    std::optional<SynthesisSettings> noise;

    bool operator==(const ParsedExperiment&) const = default;
};

struct ParseResult {
    std::optional<ParsedExperiment> experiment;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return experiment.has_value(); }
};

// Line-oriented experiment description (`.hom`); one statement per line,
// `#` starts a comment. Statements:
//
//   source pdc wavelength=<len> bandwidth=<len>
//   photon <A|B> pol=<angle>
//   element <hwp|qwp|plate|fiber|polarizer|delay> arm=<a|b|1|2> key=value...
//   splitter R=<fraction>
//   scan from=<fs> to=<fs> steps=<int>
//   noise rate=<hz> dwell=<s> seed=<int>
//
// Angles take an optional deg/rad suffix (default deg), lengths nm, delays
// fs. The last polarizer element on each output arm is that arm's analyzer
// and must be the arm's final element. Invalid input yields located
// diagnostics, never an exception.
ParseResult parse(std::string_view text);

// Canonical text form: fixed statement order (source, photons, elements by
// arm a/b/1/2, splitter, scan, noise), angles in degrees with 6 decimals.
// parse(serialize(x)) == x for any x produced by parse.
std::string serialize(const ParsedExperiment& experiment);

std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics);

}  // namespace homsim
