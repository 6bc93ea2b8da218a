#pragma once

#include <string>
#include <vector>

#include "homsim/analysis.hpp"
#include "homsim/fiber.hpp"

namespace homsim {

// Counting-data CSV schema: delay_fs,counts,duration_s. Lines starting with
// '#' are comments; the first non-comment line is the header.
std::string counts_csv(const std::vector<CountRecord>& records,
                       const std::string& manifest_hash = {});
std::vector<CountRecord> parse_counts_csv(const std::string& text);
std::vector<CountRecord> read_counts_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// key=value report blocks (one key per line).
std::string fit_report(const FitResult& fit);
std::string fit_csv_row(const FitResult& fit, bool with_header);
std::string calibration_report(const CalibrationResult& result);

std::string format_double(double value, int precision = 9);

}  // namespace homsim
