#include "sbdyn/table.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sbdyn {

void Table::add_row(std::vector<double> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument("row has " + std::to_string(row.size()) + " values for " +
                                    std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
}

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string to_csv(const Table& table) {
    std::string out;
    for (const auto& [key, value] : table.meta) {
        out += "# " + key + "," + value + "\n";
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out += (c ? "," : "") + table.columns[c];
    }
    out += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) {
                out += ",";
            }
            out += format_number(row[c]);
        }
        out += "\n";
    }
    for (const auto& [key, value] : table.footer) {
        out += "# " + key + "," + format_number(value) + "\n";
    }
    return out;
}

std::string to_json(const Table& table) {
    // Insertion order is kept so identical tables serialise identically.
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [key, value] : table.meta) {
        meta[key] = value;
    }
    for (const auto& [key, value] : table.footer) {
        meta[key] = std::isfinite(value) ? nlohmann::ordered_json(value)
                                         : nlohmann::ordered_json(format_number(value));
    }
    nlohmann::ordered_json series = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        nlohmann::ordered_json column = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            const double v = row[c];
            if (std::isfinite(v)) {
                column.push_back(v);
            } else {
                column.push_back(format_number(v));
            }
        }
        series[table.columns[c]] = std::move(column);
    }
    nlohmann::ordered_json doc;
    doc["meta"] = std::move(meta);
    doc["series"] = std::move(series);
    return doc.dump(2) + "\n";
}

} // namespace sbdyn
