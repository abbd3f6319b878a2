#pragma once

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "series.hpp"

namespace greymatch::csv {

struct Table {
    std::vector<std::string> header;  // "t", then one name per component
    VectorSeries series;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_number(const std::string& cell, std::size_t line_no, std::size_t col) {
    auto fail = [&] {
        return ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                          ": cannot parse \"" + cell + "\" as a number");
    };
    if (cell.empty()) throw fail();
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(v)) throw fail();
    return v;
}

}  // namespace detail

/**
 * @brief Parse `t,x1,...,xd` CSV text. Blank lines are skipped.
 *
 * Any malformed cell, ragged row or unsorted time raises ParseError naming the
 * 1-based line number.
 */
inline Table parse(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    Table table;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) break;
    }
    if (detail::trim(line).empty()) throw ParseError("CSV input is empty (expected header t,x1,...,xd)");
    table.header = detail::split(line);
    if (table.header.size() < 2 || table.header.front() != "t") {
        throw ParseError("line " + std::to_string(line_no) + ": header must be t,x1,...,xd");
    }
    const std::size_t d = table.header.size() - 1;

    std::vector<double> times;
    std::vector<Vector> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split(line);
        if (cells.size() != d + 1) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(d + 1) +
                             " fields, found " + std::to_string(cells.size()));
        }
        const double t = detail::parse_number(cells[0], line_no, 0);
        if (!times.empty() && !(t > times.back())) {
            throw ParseError("line " + std::to_string(line_no) + ": times must be strictly increasing");
        }
        Vector row(d);
        for (std::size_t j = 0; j < d; ++j) row[j] = detail::parse_number(cells[j + 1], line_no, j + 1);
        times.push_back(t);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("CSV input has a header but no data rows");
    table.series = VectorSeries(TimeGrid(std::move(times)), Matrix::from_rows(rows));
    return table;
}

inline Table read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open input file \"" + path + "\"");
    return parse(f);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Write a series with 17 significant digits so that values round-trip exactly.
inline void write(std::ostream& out, const VectorSeries& s, const std::vector<std::string>& header) {
    if (header.size() != s.dimension() + 1) throw ShapeError("CSV header does not match series dimension");
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
    for (std::size_t k = 0; k < s.size(); ++k) {
        out << format_double(s.grid()[k]);
        for (std::size_t j = 0; j < s.dimension(); ++j) out << ',' << format_double(s.values()(k, j));
        out << '\n';
    }
}

/// Default header t,x1,...,xd (with an optional suffix such as "_hat").
inline std::vector<std::string> default_header(std::size_t d, const std::string& suffix = "") {
    std::vector<std::string> h{"t"};
    for (std::size_t j = 1; j <= d; ++j) h.push_back("x" + std::to_string(j) + suffix);
    return h;
}

}  // namespace greymatch::csv
