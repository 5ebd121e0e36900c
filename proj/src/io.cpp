#include "excised/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace excised::io {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
}

void write_spectra_csv(std::ostream& out, std::span<const haar::EigenphaseSpectrum> spectra) {
    if (spectra.empty()) return;
    const int n = spectra.front().n_pairs();
    std::vector<std::string> header;
    for (int j = 1; j <= n; ++j) header.push_back("theta_" + std::to_string(j));
    header.push_back("log_lambda");
    std::vector<std::vector<double>> rows;
    rows.reserve(spectra.size());
    for (const auto& s : spectra) {
        std::vector<double> row(s.phases().begin(), s.phases().end());
        row.push_back(haar::log_char_poly_at_1(s));
        rows.push_back(std::move(row));
    }
    write_csv(out, header, rows);
}

std::vector<double> load_column_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<double> values;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string cell = line.substr(0, line.find(','));
        if (cell.empty()) continue;
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
            if (first) {
                first = false;
                continue;
            }
            throw std::runtime_error(path + ": non-numeric value '" + cell + "'");
        }
        first = false;
        values.push_back(v);
    }
    return values;
}

}  // namespace excised::io
