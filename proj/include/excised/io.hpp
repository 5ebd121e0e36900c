#pragma once

// Text output helpers shared by the library and the CLI. Doubles are
// written in shortest round-trip form so reruns are byte-identical.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "excised/haar.hpp"

namespace excised::io {

inline constexpr const char* kVersion = "1.0.0";

std::string format_double(double x);

/// Writes `header` then one comma-separated row per entry of `rows`, LF
/// line endings.
void write_csv(std::ostream& out, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

/// Raw spectra: theta_1,...,theta_N,log_lambda
void write_spectra_csv(std::ostream& out, std::span<const haar::EigenphaseSpectrum> spectra);

/// First numeric column of a CSV file. A non-numeric first row is taken as
/// a header and skipped. Throws std::runtime_error if unreadable.
std::vector<double> load_column_csv(const std::string& path);

}  // namespace excised::io
