#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace mhd2d {

/// Per-step diagnostic series of a run. Column set and order are part of the
/// CSV contract; time derivatives are centered finite differences of the
/// integrated states (one-sided at the final step).
struct EstimateSeries {
    static constexpr std::array<const char*, 21> column_names = {
        "t",     "e_kin", "e_mag", "diss_u", "diss_B", "rho_min", "rho_max",
        "rho_mass", "u_L2", "u_Linf", "B_Linf", "u_H1", "B_H1",   "u_H2",
        "B_H2",  "u_H3",  "B_H3",  "sqrt_rho_ut_L2", "Bt_L2", "div_u_max",
        "div_B_max"};

    std::array<std::vector<double>, 21> columns;

    std::vector<double>& t() { return columns[0]; }
    const std::vector<double>& t() const { return columns[0]; }
    const std::vector<double>& operator[](const std::string& name) const {
        for (size_t i = 0; i < column_names.size(); ++i)
            if (name == column_names[i]) return columns[i];
        throw std::invalid_argument("EstimateSeries: unknown column " + name);
    }

    size_t rows() const { return columns[0].size(); }

    void append_row(const std::array<double, 21>& row) {
        for (size_t i = 0; i < row.size(); ++i) columns[i].push_back(row[i]);
    }
};

/// Floats are rendered with 17 significant digits so a written series
/// round-trips bit for bit.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_csv(const EstimateSeries& s, std::ostream& out) {
    for (size_t i = 0; i < s.column_names.size(); ++i)
        out << (i ? "," : "") << s.column_names[i];
    out << "\n";
    for (size_t r = 0; r < s.rows(); ++r) {
        for (size_t i = 0; i < s.columns.size(); ++i)
            out << (i ? "," : "") << format_g17(s.columns[i][r]);
        out << "\n";
    }
}

inline void write_csv(const EstimateSeries& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    write_csv(s, out);
}

/// Generic CSV table, used by the report command.
struct CsvTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    size_t rows() const { return names.empty() || columns.empty() ? 0 : columns[0].size(); }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.names.push_back(cell);
    table.columns.resize(table.names.size());
    size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        std::stringstream ss(line);
        size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= table.names.size())
                throw ConfigError("row " + std::to_string(row) + ": too many columns");
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw ConfigError("row " + std::to_string(row) + ": bad number '" + cell + "'");
            }
            if (used != cell.size())
                throw ConfigError("row " + std::to_string(row) + ": bad number '" + cell + "'");
            table.columns[col].push_back(v);
            ++col;
        }
        if (col != table.names.size())
            throw ConfigError("row " + std::to_string(row) + ": column count mismatch");
    }
    return table;
}

}  // namespace mhd2d
