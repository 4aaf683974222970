#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "geoxray/grid.hpp"

namespace geoxray::io {

/// Real-valued table with a "# key=value,..." header line.
struct Table {
    std::map<std::string, std::string> header;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
};

/// Numbers are written with 17 significant digits so reloading is exact.
void write_table(const std::string& path, const Table& table);
Table read_table(const std::string& path);

/// Writes `<stem>_real.csv` and `<stem>_imag.csv` (row = y index, column = x index).
void write_grid_csv(const std::string& stem, const ScalarGrid& grid,
                    const std::map<std::string, std::string>& header = {});
/// Reads a grid pair; the mask is rebuilt from the stored mask radius.
ScalarGrid read_grid_csv(const std::string& stem);

/// Writes an 8-bit binary PGM of `values` (row-major) with linear min-max
/// scaling, plus `<path>.txt` recording the scaling range.
void write_pgm(const std::string& path, std::size_t width, std::size_t height,
               const std::vector<double>& values);

std::string format_double(double v);

}  // namespace geoxray::io
