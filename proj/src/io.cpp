#include "homsim/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace homsim {

std::string format_double(double value, int precision) {
    char buf[64];
    const auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, precision);
    return std::string(buf, ptr);
}

std::string counts_csv(const std::vector<CountRecord>& records, const std::string& manifest_hash) {
    std::ostringstream out;
    if (!manifest_hash.empty()) out << "# manifest_hash=" << manifest_hash << "\n";
    out << "delay_fs,counts,duration_s\n";
    for (const auto& rec : records) {
        out << format_double(rec.delay_fs, 9) << "," << rec.counts << ","
            << format_double(rec.duration_s, 9) << "\n";
    }
    return out.str();
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

double field_double(const std::string& field, int line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw std::runtime_error("CSV line " + std::to_string(line_no) + ": bad number '" + field +
                                 "'");
    }
    return v;
}

long long field_int(const std::string& field, int line_no) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw std::runtime_error("CSV line " + std::to_string(line_no) + ": bad integer '" + field +
                                 "'");
    }
    return v;
}

}  // namespace

std::vector<CountRecord> parse_counts_csv(const std::string& text) {
    std::vector<CountRecord> records;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("delay_fs", 0) != 0) {
                throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                         ": expected header delay_fs,counts,duration_s");
            }
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 3) {
            throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                     ": expected 3 fields, got " + std::to_string(fields.size()));
        }
        CountRecord rec;
        rec.delay_fs = field_double(fields[0], line_no);
        rec.counts = field_int(fields[1], line_no);
        rec.duration_s = field_double(fields[2], line_no);
        if (rec.counts < 0 || !(rec.duration_s > 0.0)) {
            throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                     ": counts must be >= 0 and duration positive");
        }
        records.push_back(rec);
    }
    if (!header_seen) throw std::runtime_error("CSV: no header line found");
    return records;
}

std::vector<CountRecord> read_counts_csv(const std::string& path) {
    return parse_counts_csv(read_text_file(path));
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string fit_report(const FitResult& fit) {
    std::ostringstream out;
    out << "baseline=" << format_double(fit.baseline) << "\n"
        << "dip_depth=" << format_double(fit.dip_depth) << "\n"
        << "center_fs=" << format_double(fit.center_fs) << "\n"
        << "width_fs=" << format_double(fit.width_fs) << "\n"
        << "visibility=" << format_double(fit.visibility) << "\n"
        << "visibility_sigma=" << format_double(fit.visibility_sigma) << "\n"
        << "residual_norm=" << format_double(fit.residual_norm) << "\n"
        << "converged=" << (fit.converged ? "true" : "false") << "\n"
        << "iterations=" << fit.iterations << "\n";
    return out.str();
}

std::string fit_csv_row(const FitResult& fit, bool with_header) {
    std::ostringstream out;
    if (with_header) {
        out << "baseline,dip_depth,center_fs,width_fs,visibility,visibility_sigma,"
               "residual_norm,converged,iterations\n";
    }
    out << format_double(fit.baseline) << "," << format_double(fit.dip_depth) << ","
        << format_double(fit.center_fs) << "," << format_double(fit.width_fs) << ","
        << format_double(fit.visibility) << "," << format_double(fit.visibility_sigma) << ","
        << format_double(fit.residual_norm) << "," << (fit.converged ? "true" : "false") << ","
        << fit.iterations << "\n";
    return out.str();
}

std::string calibration_report(const CalibrationResult& result) {
    std::ostringstream out;
    out << "paddle1_deg=" << format_double(result.settings.paddle_axes[0].degrees()) << "\n"
        << "paddle2_deg=" << format_double(result.settings.paddle_axes[1].degrees()) << "\n"
        << "paddle3_deg=" << format_double(result.settings.paddle_axes[2].degrees()) << "\n"
        << "twist_rad=" << format_double(result.settings.twist_retardance) << "\n"
        << "residual_hv_leakage=" << format_double(result.residual_hv_leakage) << "\n"
        << "residual_phase_error_rad=" << format_double(result.residual_phase_error) << "\n"
        << "iterations=" << result.iterations << "\n"
        << "converged=" << (result.converged ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace homsim
