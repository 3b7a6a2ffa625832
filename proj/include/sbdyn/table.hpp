// table.hpp — Column tables with CSV and JSON serialisation

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sbdyn {

struct Table {
    /// Key/value lines written before the header (CSV) or under "meta" (JSON).
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    /// Summary values written after the rows (CSV) or under "meta" (JSON).
    std::vector<std::pair<std::string, double>> footer;

    /// Throws std::invalid_argument if the row width does not match the columns.
    void add_row(std::vector<double> row);
};

/// Shortest-round-trip-safe rendering with 17 significant digits.
std::string format_number(double value);

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

} // namespace sbdyn
