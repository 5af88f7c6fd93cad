#pragma once

#include "klab/ratio.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace klab::harness {

// One CSV file worth of rows. Cells are already formatted.
struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
};

// Exact cell "p/q" and its 12 significant digit rendering.
std::string exact(const Ratio& r);
std::string decimal(const Ratio& r);
// Appends "<name>,<name>_dec" columns.
void add_ratio_columns(std::vector<std::string>& columns, const std::string& name);
void add_ratio_cells(std::vector<std::string>& row, const Ratio& r);

std::string csv_escape(const std::string& cell);
// Header line, then the column row, then the rows.
std::string to_csv(const Table& t, const std::string& header_line);
void write_file(const std::string& path, const std::string& content);

// "# lab <command> <UTC timestamp> wall_ms=<ms>"
std::string header_line(const std::string& command, std::int64_t wall_ms);

} // namespace klab::harness
