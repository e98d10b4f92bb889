#pragma once

// CSV plumbing.  Every numeric field is written as %.17g so a rerun
// reproduces its files byte for byte; nothing time-dependent belongs
// in a data file (timestamps live in the sidecar, not here).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace weyllab {

// Shortest decimal that round-trips a double.
inline std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Standard CSV quoting: fields holding a comma, quote, or newline are
// wrapped in double quotes with inner quotes doubled.
inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) {
        if (row.size() != header.size())
            throw std::invalid_argument("csv: row width does not match header");
        rows.push_back(std::move(row));
    }

    std::string to_string() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < header.size(); ++i)
            os << (i ? "," : "") << csv_escape(header[i]);
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << csv_escape(row[i]);
            os << "\n";
        }
        return os.str();
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("csv: cannot open " + path);
        out << to_string();
        if (!out) throw std::runtime_error("csv: write failed for " + path);
    }
};

namespace detail {

// Whole field parses as one double, surrounding spaces tolerated.
inline bool parse_field(const std::string& field, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(field, &used);
        while (used < field.size() &&
               std::isspace(static_cast<unsigned char>(field[used])))
            ++used;
        return used == field.size();
    } catch (const std::exception&) {
        return false;
    }
}

template <typename RowFn>
void for_each_csv_row(const std::string& path, RowFn&& fn) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        fn(fields);
    }
}

}  // namespace detail

// Fully numeric rows of a CSV file; headers (any row holding a
// non-numeric field) and blank lines are skipped.
inline std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
    std::vector<std::vector<double>> rows;
    detail::for_each_csv_row(path, [&](const std::vector<std::string>& fields) {
        std::vector<double> row;
        for (const auto& f : fields) {
            double v = 0.0;
            if (!detail::parse_field(f, v)) return;
            row.push_back(v);
        }
        if (!row.empty()) rows.push_back(std::move(row));
    });
    return rows;
}

// The requested columns as numbers, one vector per row; rows where any
// requested column is absent or non-numeric (headers, text rows) are
// skipped.  Other columns may hold anything.
inline std::vector<std::vector<double>> read_csv_columns(
    const std::string& path, const std::vector<std::size_t>& cols) {
    std::vector<std::vector<double>> rows;
    detail::for_each_csv_row(path, [&](const std::vector<std::string>& fields) {
        std::vector<double> row;
        for (std::size_t c : cols) {
            double v = 0.0;
            if (c >= fields.size() || !detail::parse_field(fields[c], v))
                return;
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    });
    return rows;
}

}  // namespace weyllab
