#pragma once

// Rectangular numeric result tables with a metadata block, rendered as
// CSV: '#'-prefixed metadata lines, a header row, then rows with doubles
// at 17 significant digits so they round-trip losslessly.

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "igeo/errors.hpp"

namespace igeo {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    // optional leading non-numeric column (e.g. invariant names)
    std::string label_column;
    std::vector<std::string> row_labels;

    void meta(std::string key, std::string value) { metadata.emplace_back(std::move(key), std::move(value)); }

    void add_row(std::vector<double> row) {
        if (row.size() != columns.size()) throw ShapeError("row width does not match column count");
        rows.push_back(std::move(row));
    }

    void add_row(std::string label, std::vector<double> row) {
        if (label_column.empty()) throw ShapeError("table has no label column");
        add_row(std::move(row));
        row_labels.push_back(std::move(label));
    }

    std::string to_csv() const {
        if (!label_column.empty() && row_labels.size() != rows.size())
            throw ShapeError("label count does not match row count");
        std::string out;
        for (const auto& [key, value] : metadata) {
            out += "# ";
            out += key;
            out += "=";
            out += value;
            out += "\n";
        }
        if (!label_column.empty()) {
            out += label_column;
            if (!columns.empty()) out += ",";
        }
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out += ",";
            out += columns[i];
        }
        out += "\n";
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!label_column.empty()) {
                out += row_labels[r];
                if (!rows[r].empty()) out += ",";
            }
            for (std::size_t i = 0; i < rows[r].size(); ++i) {
                if (i) out += ",";
                out += format_double(rows[r][i]);
            }
            out += "\n";
        }
        return out;
    }
};

} // namespace igeo
