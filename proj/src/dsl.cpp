#include "homsim/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace homsim {

std::vector<double> ScanSettings::delays() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    if (steps == 1) {
        out.push_back(from_fs);
        return out;
    }
    for (int i = 0; i < steps; ++i) {
        out.push_back(from_fs + (to_fs - from_fs) * i / (steps - 1));
    }
    return out;
}

namespace {

struct Token {
    std::string text;
    int column = 1;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return tokens;
}

struct KeyValue {
    std::string key;
    std::string value;
    int key_col = 1;
    int value_col = 1;
};

enum class Unit { None, Angle, Length, Delay };

struct PendingElement {
    OpticalElement element;
    int line = 1;
    int column = 1;
};

struct Parser {
    std::vector<Diagnostic> diags;
    int line = 1;

    // collected statements
    bool saw_source = false;
    double wavelength_nm = 814.0;
    double bandwidth_nm = 10.0;
    std::optional<Angle> pol_a, pol_b;
    std::optional<double> splitter_r;
    std::optional<ScanSettings> scan;
    std::optional<SynthesisSettings> noise;
    std::vector<PendingElement> elements;

    void error(int column, std::string message) {
        diags.push_back({Diagnostic::Severity::Error, line, column, std::move(message)});
    }
    void error_at(int at_line, int column, std::string message) {
        diags.push_back({Diagnostic::Severity::Error, at_line, column, std::move(message)});
    }

    // Number with optional unit suffix; returns the value scaled to the
    // unit family's canonical scale (radians for angles).
    std::optional<double> number(const KeyValue& kv, Unit unit) {
        const char* first = kv.value.data();
        const char* last = first + kv.value.size();
        double raw = 0.0;
        const auto [ptr, ec] = std::from_chars(first, last, raw);
        if (ec != std::errc{} || ptr == first) {
            error(kv.value_col, "malformed number '" + kv.value + "'");
            return std::nullopt;
        }
        const std::string suffix(ptr, last);
        const int suffix_col = kv.value_col + static_cast<int>(ptr - first);
        switch (unit) {
            case Unit::None:
                if (!suffix.empty()) {
                    error(suffix_col, "unexpected unit '" + suffix + "'");
                    return std::nullopt;
                }
                return raw;
            case Unit::Angle:
                if (suffix.empty() || suffix == "deg") return raw * kPi / 180.0;
                if (suffix == "rad") return raw;
                error(suffix_col, "unknown unit '" + suffix + "' (expected deg or rad)");
                return std::nullopt;
            case Unit::Length:
                if (suffix.empty() || suffix == "nm") return raw;
                error(suffix_col, "unknown unit '" + suffix + "' (expected nm)");
                return std::nullopt;
            case Unit::Delay:
                if (suffix.empty() || suffix == "fs") return raw;
                error(suffix_col, "unknown unit '" + suffix + "' (expected fs)");
                return std::nullopt;
        }
        return std::nullopt;
    }

    std::optional<long long> integer(const KeyValue& kv) {
        const char* first = kv.value.data();
        const char* last = first + kv.value.size();
        long long raw = 0;
        const auto [ptr, ec] = std::from_chars(first, last, raw);
        if (ec != std::errc{} || ptr != last) {
            error(kv.value_col, "malformed integer '" + kv.value + "'");
            return std::nullopt;
        }
        return raw;
    }

    // Splits "key=value" tokens, reporting duplicates and non key=value junk.
    std::map<std::string, KeyValue> keyvalues(const std::vector<Token>& tokens, std::size_t from) {
        std::map<std::string, KeyValue> out;
        for (std::size_t i = from; i < tokens.size(); ++i) {
            const auto& tok = tokens[i];
            const std::size_t eq = tok.text.find('=');
            if (eq == std::string::npos || eq == 0) {
                error(tok.column, "expected key=value, got '" + tok.text + "'");
                continue;
            }
            KeyValue kv;
            kv.key = tok.text.substr(0, eq);
            kv.value = tok.text.substr(eq + 1);
            kv.key_col = tok.column;
            kv.value_col = tok.column + static_cast<int>(eq) + 1;
            if (!out.emplace(kv.key, kv).second) {
                error(kv.key_col, "duplicate key '" + kv.key + "'");
            }
        }
        return out;
    }

    const KeyValue* take(std::map<std::string, KeyValue>& kvs, const std::string& key) {
        const auto it = kvs.find(key);
        if (it == kvs.end()) return nullptr;
        return &it->second;
    }

    void reject_unknown(std::map<std::string, KeyValue>& kvs,
                        std::initializer_list<const char*> known) {
        for (const auto& [key, kv] : kvs) {
            if (std::find_if(known.begin(), known.end(),
                             [&](const char* k) { return key == k; }) == known.end()) {
                error(kv.key_col, "unknown key '" + key + "'");
            }
        }
    }

    std::optional<Arm> element_arm(const KeyValue& kv) {
        if (kv.value == "a") return Arm::InputA;
        if (kv.value == "b") return Arm::InputB;
        if (kv.value == "1") return Arm::Output1;
        if (kv.value == "2") return Arm::Output2;
        error(kv.value_col, "unknown arm '" + kv.value + "' (expected a, b, 1 or 2)");
        return std::nullopt;
    }

    void statement_source(const std::vector<Token>& tokens) {
        if (saw_source) {
            error(tokens[0].column, "duplicate source statement");
            return;
        }
        saw_source = true;
        if (tokens.size() < 2 || tokens[1].text != "pdc") {
            error(tokens.size() > 1 ? tokens[1].column : tokens[0].column,
                  "source type must be 'pdc'");
            return;
        }
        auto kvs = keyvalues(tokens, 2);
        reject_unknown(kvs, {"wavelength", "bandwidth"});
        if (const auto* kv = take(kvs, "wavelength")) {
            if (auto v = number(*kv, Unit::Length)) {
                if (*v > 0.0) wavelength_nm = *v;
                else error(kv->value_col, "wavelength must be positive");
            }
        }
        if (const auto* kv = take(kvs, "bandwidth")) {
            if (auto v = number(*kv, Unit::Length)) {
                if (*v > 0.0) bandwidth_nm = *v;
                else error(kv->value_col, "bandwidth must be positive");
            }
        }
    }

    void statement_photon(const std::vector<Token>& tokens) {
        if (tokens.size() < 2 || (tokens[1].text != "A" && tokens[1].text != "B")) {
            error(tokens.size() > 1 ? tokens[1].column : tokens[0].column,
                  "photon arm must be A or B");
            return;
        }
        const bool is_a = tokens[1].text == "A";
        auto& slot = is_a ? pol_a : pol_b;
        if (slot) {
            error(tokens[1].column, std::string("duplicate photon ") + (is_a ? "A" : "B") +
                                        " statement");
            return;
        }
        auto kvs = keyvalues(tokens, 2);
        reject_unknown(kvs, {"pol"});
        const auto* kv = take(kvs, "pol");
        if (!kv) {
            error(tokens[0].column, "photon statement requires pol=<angle>");
            return;
        }
        if (auto v = number(*kv, Unit::Angle)) slot = Angle::from_radians(*v);
    }

    void statement_element(const std::vector<Token>& tokens) {
        if (tokens.size() < 2) {
            error(tokens[0].column, "element statement requires a kind");
            return;
        }
        const std::string& kind = tokens[1].text;
        auto kvs = keyvalues(tokens, 2);

        const auto* arm_kv = take(kvs, "arm");
        std::optional<Arm> arm;
        if (arm_kv) arm = element_arm(*arm_kv);
        else error(tokens[0].column, "element statement requires arm=<a|b|1|2>");

        auto angle_key = [&](const char* key, bool required,
                             Angle fallback = Angle{}) -> std::optional<Angle> {
            if (const auto* kv = take(kvs, key)) {
                if (auto v = number(*kv, Unit::Angle)) return Angle::from_radians(*v);
                return std::nullopt;
            }
            if (required) {
                error(tokens[1].column, "element " + kind + " requires " + key + "=<angle>");
                return std::nullopt;
            }
            return fallback;
        };

        std::optional<OpticalElement> element;
        if (kind == "hwp" || kind == "qwp") {
            reject_unknown(kvs, {"arm", "axis"});
            const auto axis = angle_key("axis", true);
            if (arm && axis) {
                element = kind == "hwp" ? OpticalElement::half_waveplate(*arm, *axis)
                                        : OpticalElement::quarter_waveplate(*arm, *axis);
            }
        } else if (kind == "plate") {
            reject_unknown(kvs, {"arm", "ret", "axis"});
            const auto ret = angle_key("ret", true);
            const auto axis = angle_key("axis", false);
            if (arm && ret && axis) {
                element = OpticalElement::waveplate(*arm, ret->radians(), *axis);
            }
        } else if (kind == "fiber") {
            reject_unknown(kvs, {"arm", "rot", "ret", "axis"});
            const auto rot = angle_key("rot", false);
            const auto ret = angle_key("ret", false);
            const auto axis = angle_key("axis", false);
            if (arm && rot && ret && axis) {
                element = OpticalElement::fiber(*arm, *rot, ret->radians(), *axis);
            }
        } else if (kind == "polarizer") {
            reject_unknown(kvs, {"arm", "axis"});
            const auto axis = angle_key("axis", true);
            if (arm && axis) {
                if (*arm == Arm::InputA || *arm == Arm::InputB) {
                    error(arm_kv->value_col, "polarizer elements are restricted to output arms");
                    return;
                }
                element = OpticalElement::polarizer(*arm, *axis);
            }
        } else if (kind == "delay") {
            reject_unknown(kvs, {"arm", "dt"});
            const auto* kv = take(kvs, "dt");
            std::optional<double> dt;
            if (kv) dt = number(*kv, Unit::Delay);
            else error(tokens[1].column, "element delay requires dt=<fs>");
            if (arm && dt) element = OpticalElement::delay(*arm, *dt);
        } else {
            error(tokens[1].column, "unknown element kind '" + kind + "'");
            return;
        }
        if (element) elements.push_back({*element, line, tokens[0].column});
    }

    void statement_splitter(const std::vector<Token>& tokens) {
        if (splitter_r) {
            error(tokens[0].column, "duplicate splitter statement");
            return;
        }
        auto kvs = keyvalues(tokens, 1);
        reject_unknown(kvs, {"R"});
        const auto* kv = take(kvs, "R");
        if (!kv) {
            error(tokens[0].column, "splitter statement requires R=<fraction>");
            return;
        }
        if (auto v = number(*kv, Unit::None)) {
            if (*v > 0.0 && *v < 1.0) splitter_r = *v;
            else error(kv->value_col, "R must be in (0,1)");
        }
    }

    void statement_scan(const std::vector<Token>& tokens) {
        if (scan) {
            error(tokens[0].column, "duplicate scan statement");
            return;
        }
        auto kvs = keyvalues(tokens, 1);
        reject_unknown(kvs, {"from", "to", "steps"});
        const auto* from_kv = take(kvs, "from");
        const auto* to_kv = take(kvs, "to");
        const auto* steps_kv = take(kvs, "steps");
        if (!from_kv || !to_kv || !steps_kv) {
            error(tokens[0].column, "scan statement requires from=, to= and steps=");
            return;
        }
        const auto from = number(*from_kv, Unit::Delay);
        const auto to = number(*to_kv, Unit::Delay);
        const auto steps = integer(*steps_kv);
        if (!from || !to || !steps) return;
        if (*steps < 2) {
            error(steps_kv->value_col, "steps must be at least 2");
            return;
        }
        if (!(*from < *to)) {
            error(to_kv->value_col, "scan range must be increasing");
            return;
        }
        scan = ScanSettings{*from, *to, static_cast<int>(*steps)};
    }

    void statement_noise(const std::vector<Token>& tokens) {
        if (noise) {
            error(tokens[0].column, "duplicate noise statement");
            return;
        }
        auto kvs = keyvalues(tokens, 1);
        reject_unknown(kvs, {"rate", "dwell", "seed"});
        const auto* rate_kv = take(kvs, "rate");
        const auto* dwell_kv = take(kvs, "dwell");
        const auto* seed_kv = take(kvs, "seed");
        if (!rate_kv || !dwell_kv || !seed_kv) {
            error(tokens[0].column, "noise statement requires rate=, dwell= and seed=");
            return;
        }
        const auto rate = number(*rate_kv, Unit::None);
        const auto dwell = number(*dwell_kv, Unit::None);
        const auto seed = integer(*seed_kv);
        if (!rate || !dwell || !seed) return;
        if (!(*rate > 0.0)) {
            error(rate_kv->value_col, "rate must be positive");
            return;
        }
        if (!(*dwell > 0.0)) {
            error(dwell_kv->value_col, "dwell must be positive");
            return;
        }
        if (*seed < 0) {
            error(seed_kv->value_col, "seed must be non-negative");
            return;
        }
        noise = SynthesisSettings{*rate, *dwell, static_cast<std::uint64_t>(*seed)};
    }

    void statement(const std::vector<Token>& tokens) {
        const std::string& head = tokens[0].text;
        if (head == "source") statement_source(tokens);
        else if (head == "photon") statement_photon(tokens);
        else if (head == "element") statement_element(tokens);
        else if (head == "splitter") statement_splitter(tokens);
        else if (head == "scan") statement_scan(tokens);
        else if (head == "noise") statement_noise(tokens);
        else error(tokens[0].column, "unknown statement '" + head + "'");
    }
};

}  // namespace

ParseResult parse(std::string_view text) {
    Parser parser;

    std::vector<std::string> lines;
    {
        std::string current;
        for (const char c : text) {
            if (c == '\n') {
                lines.push_back(current);
                current.clear();
            } else if (c != '\r') {
                current.push_back(c);
            }
        }
        lines.push_back(current);
    }

    for (std::size_t i = 0; i < lines.size(); ++i) {
        parser.line = static_cast<int>(i) + 1;
        std::string body = lines[i];
        if (const std::size_t hash = body.find('#'); hash != std::string::npos) {
            body.resize(hash);
        }
        const auto tokens = tokenize(body);
        if (tokens.empty()) continue;
        parser.statement(tokens);
    }

    const int eof_line = static_cast<int>(lines.size());
    parser.line = std::max(1, eof_line);

    if (!parser.splitter_r) parser.error(1, "missing splitter statement");
    if (!parser.pol_a) parser.error(1, "missing photon A statement");
    if (!parser.pol_b) parser.error(1, "missing photon B statement");
    if (!parser.scan) parser.error(1, "missing scan statement");

    // Placement checks: a delay may not follow a polarizer on the same arm,
    // and the analyzer (last polarizer) must close each output arm.
    for (Arm arm : {Arm::InputA, Arm::InputB, Arm::Output1, Arm::Output2}) {
        bool saw_polarizer = false;
        for (const auto& pending : parser.elements) {
            if (pending.element.location != arm) continue;
            if (pending.element.kind == OpticalElement::Kind::Polarizer) saw_polarizer = true;
            if (pending.element.kind == OpticalElement::Kind::Delay && saw_polarizer) {
                parser.error_at(pending.line, pending.column,
                                std::string("delay element may not follow a polarizer on arm ") +
                                    arm_name(arm));
            }
        }
    }
    for (Arm arm : {Arm::Output1, Arm::Output2}) {
        const PendingElement* last = nullptr;
        const PendingElement* last_polarizer = nullptr;
        for (const auto& pending : parser.elements) {
            if (pending.element.location != arm) continue;
            last = &pending;
            if (pending.element.kind == OpticalElement::Kind::Polarizer) last_polarizer = &pending;
        }
        if (!last_polarizer) {
            parser.error(1, std::string("missing polarizer (analyzer) on output arm ") +
                                arm_name(arm));
        } else if (last != last_polarizer) {
            parser.error_at(last->line, last->column,
                            std::string("the analyzer must be the last element on output arm ") +
                                arm_name(arm));
        }
    }

    ParseResult result;
    result.diagnostics = std::move(parser.diags);
    if (!result.diagnostics.empty()) return result;

    ParsedExperiment experiment;
    experiment.config.pair.psi_a = linear_state(*parser.pol_a);
    experiment.config.pair.psi_b = linear_state(*parser.pol_b);
    experiment.config.pair.center_wavelength_nm = parser.wavelength_nm;
    experiment.config.pair.filter_fwhm_nm = parser.bandwidth_nm;
    experiment.config.splitter = make_beamsplitter(*parser.splitter_r);

    // The closing polarizer of each output arm becomes that arm's analyzer.
    const PendingElement* analyzer_1 = nullptr;
    const PendingElement* analyzer_2 = nullptr;
    for (const auto& pending : parser.elements) {
        if (pending.element.kind != OpticalElement::Kind::Polarizer) continue;
        if (pending.element.location == Arm::Output1) analyzer_1 = &pending;
        if (pending.element.location == Arm::Output2) analyzer_2 = &pending;
    }
    experiment.config.polarizer_1 = analyzer_1->element.axis;
    experiment.config.polarizer_2 = analyzer_2->element.axis;
    for (const auto& pending : parser.elements) {
        if (&pending == analyzer_1 || &pending == analyzer_2) continue;
        experiment.config.elements.push_back(pending.element);
    }

    experiment.scan = *parser.scan;
    experiment.noise = parser.noise;
    result.experiment = std::move(experiment);
    return result;
}

namespace {

std::string fixed6(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 6);
    return std::string(buf, ptr);
}

std::string angle6(Angle a) { return fixed6(a.degrees()); }

void serialize_element(std::ostringstream& out, const OpticalElement& e) {
    out << "element ";
    switch (e.kind) {
        case OpticalElement::Kind::Waveplate:
            if (e.retardance == kPi) {
                out << "hwp arm=" << arm_name(e.location) << " axis=" << angle6(e.axis);
            } else if (e.retardance == kPi / 2.0) {
                out << "qwp arm=" << arm_name(e.location) << " axis=" << angle6(e.axis);
            } else {
                out << "plate arm=" << arm_name(e.location)
                    << " ret=" << fixed6(e.retardance * 180.0 / kPi) << " axis=" << angle6(e.axis);
            }
            break;
        case OpticalElement::Kind::Polarizer:
            out << "polarizer arm=" << arm_name(e.location) << " axis=" << angle6(e.axis);
            break;
        case OpticalElement::Kind::FiberSegment: {
            Angle rot = e.rot;
            double ret = e.retardance;
            Angle axis = e.axis;
            if (!e.from_params) {
                const RetarderFactors f = retarder_factors(e.matrix);
                rot = f.rot;
                ret = f.retardance;
                axis = f.axis;
            }
            out << "fiber arm=" << arm_name(e.location) << " rot=" << angle6(rot)
                << " ret=" << fixed6(ret * 180.0 / kPi) << " axis=" << angle6(axis);
            break;
        }
        case OpticalElement::Kind::Delay:
            out << "delay arm=" << arm_name(e.location) << " dt=" << fixed6(e.delay_fs) << "fs";
            break;
    }
    out << "\n";
}

}  // namespace

std::string serialize(const ParsedExperiment& experiment) {
    const ExperimentConfig& config = experiment.config;
    std::ostringstream out;

    out << "source pdc wavelength=" << fixed6(config.pair.center_wavelength_nm)
        << "nm bandwidth=" << fixed6(config.pair.filter_fwhm_nm) << "nm\n";

    const double pol_a = std::atan2(config.pair.psi_a.v.real(), config.pair.psi_a.h.real());
    const double pol_b = std::atan2(config.pair.psi_b.v.real(), config.pair.psi_b.h.real());
    out << "photon A pol=" << angle6(Angle::from_radians(pol_a)) << "\n";
    out << "photon B pol=" << angle6(Angle::from_radians(pol_b)) << "\n";

    for (Arm arm : {Arm::InputA, Arm::InputB, Arm::Output1, Arm::Output2}) {
        for (const auto& e : config.elements) {
            if (e.location == arm) serialize_element(out, e);
        }
        if (arm == Arm::Output1) {
            out << "element polarizer arm=1 axis=" << angle6(config.polarizer_1) << "\n";
        }
        if (arm == Arm::Output2) {
            out << "element polarizer arm=2 axis=" << angle6(config.polarizer_2) << "\n";
        }
    }

    out << "splitter R=" << fixed6(config.splitter.reflectivity()) << "\n";
    out << "scan from=" << fixed6(experiment.scan.from_fs) << "fs to="
        << fixed6(experiment.scan.to_fs) << "fs steps=" << experiment.scan.steps << "\n";
    if (experiment.noise) {
        out << "noise rate=" << fixed6(experiment.noise->pair_rate_hz)
            << " dwell=" << fixed6(experiment.noise->dwell_s) << " seed=" << experiment.noise->seed
            << "\n";
    }
    return out.str();
}

std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    std::ostringstream out;
    for (const auto& d : diagnostics) {
        out << d.line << ":" << d.column << ": "
            << (d.severity == Diagnostic::Severity::Error ? "error" : "warning") << ": "
            << d.message << "\n";
    }
    return out.str();
}

}  // namespace homsim
