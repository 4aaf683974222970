#include "geoxray/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace geoxray::io {

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

double parse_cell(const std::string& cell, const std::string& path) {
    if (cell == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        throw std::runtime_error(path + ": malformed number '" + cell + "'");
    }
    if (used != cell.size()) {
        throw std::runtime_error(path + ": malformed number '" + cell + "'");
    }
    return v;
}

}  // namespace

void write_table(const std::string& path, const Table& table) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << '#';
    bool first = true;
    for (const auto& [key, value] : table.header) {
        out << (first ? " " : ",") << key << '=' << value;
        first = false;
    }
    out << '\n';
    for (std::size_t r = 0; r < table.rows; ++r) {
        for (std::size_t c = 0; c < table.cols; ++c) {
            if (c > 0) {
                out << ',';
            }
            out << format_double(table.values[r * table.cols + c]);
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    Table table;
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != '#') {
        throw std::runtime_error(path + ": missing header line");
    }
    std::istringstream header(line.substr(1));
    std::string item;
    while (std::getline(header, item, ',')) {
        item.erase(0, item.find_first_not_of(' '));
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ": malformed header entry '" + item + "'");
        }
        table.header[item.substr(0, eq)] = item.substr(eq + 1);
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::size_t cols = 0;
        while (std::getline(row, cell, ',')) {
            table.values.push_back(parse_cell(cell, path));
            ++cols;
        }
        if (table.rows == 0) {
            table.cols = cols;
        } else if (cols != table.cols) {
            throw std::runtime_error(path + ": ragged rows");
        }
        ++table.rows;
    }
    return table;
}

void write_grid_csv(const std::string& stem, const ScalarGrid& grid,
                    const std::map<std::string, std::string>& header) {
    Table re;
    Table im;
    re.header = header;
    re.header["n"] = std::to_string(grid.n());
    re.header["mask_radius"] = format_double(grid.mask_radius());
    im.header = re.header;
    re.rows = im.rows = grid.n();
    re.cols = im.cols = grid.n();
    re.values.reserve(grid.values().size());
    im.values.reserve(grid.values().size());
    for (const auto& v : grid.values()) {
        re.values.push_back(v.real());
        im.values.push_back(v.imag());
    }
    write_table(stem + "_real.csv", re);
    write_table(stem + "_imag.csv", im);
}

ScalarGrid read_grid_csv(const std::string& stem) {
    const Table re = read_table(stem + "_real.csv");
    const Table im = read_table(stem + "_imag.csv");
    if (re.rows != re.cols || im.rows != re.rows || im.cols != re.cols) {
        throw std::runtime_error(stem + ": grid files are not matching square tables");
    }
    const auto it = re.header.find("mask_radius");
    if (it == re.header.end()) {
        throw std::runtime_error(stem + ": header lacks mask_radius");
    }
    ScalarGrid grid(re.rows, std::stod(it->second));
    for (std::size_t i = 0; i < re.values.size(); ++i) {
        grid.values()[i] = {re.values[i], im.values[i]};
    }
    return grid;
}

void write_pgm(const std::string& path, std::size_t width, std::size_t height,
               const std::vector<double>& values) {
    if (values.size() != width * height) {
        throw std::invalid_argument("write_pgm: size mismatch");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : values) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(lo <= hi)) {
        lo = hi = 0.0;
    }
    const double range = hi > lo ? hi - lo : 1.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << "P5\n" << width << ' ' << height << "\n255\n";
    for (double v : values) {
        const double t = std::isfinite(v) ? (v - lo) / range : 0.0;
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
    }
    std::ofstream side(path + ".txt");
    side << "min=" << format_double(lo) << "\nmax=" << format_double(hi) << '\n';
}

}  // namespace geoxray::io
