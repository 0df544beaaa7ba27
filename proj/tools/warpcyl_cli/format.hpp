#pragma once

// Output plumbing shared by the subcommands: 12-significant-digit floats, CSV tables, and
// the CSV readers for tabulated profiles and sampled paths.

#include <warpcyl/error.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace warpcyl::cli {

using Json = nlohmann::ordered_json;

/// x rounded to 12 significant digits.
inline double round12(double x) {
    if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

/// Shortest decimal that round-trips round12(x).
inline std::string format_number(double x) {
    const double r = round12(x);
    char buf[32];
    for (int p = 1; p <= 12; ++p) {
        std::snprintf(buf, sizeof buf, "%.*g", p, r);
        if (std::strtod(buf, nullptr) == r) break;
    }
    return buf;
}

inline Json number(double x) { return Json(round12(x)); }

/// Comma-separated rows with a header, LF line endings.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable& row(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) fail(ErrorKind::Internal, "CSV row width mismatch");
        rows_.push_back(std::move(cells));
        return *this;
    }

    std::size_t size() const noexcept { return rows_.size(); }

    void write(std::ostream& os) const {
        write_line(os, header_);
        for (const auto& r : rows_) write_line(os, r);
    }

    void save(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) fail(ErrorKind::Config, "cannot open " + path + " for writing");
        write(os);
    }

private:
    static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    const std::vector<double>* column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return &columns[i];
        return nullptr;
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
}

inline CsvData read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::Config, "cannot read " + path);
    CsvData data;
    std::string line;
    if (!std::getline(is, line)) fail(ErrorKind::Config, path + " is empty");
    data.header = split_csv_line(line);
    data.columns.resize(data.header.size());
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != data.header.size())
            fail(ErrorKind::Config, path + ":" + std::to_string(line_no) + ": expected " +
                                        std::to_string(data.header.size()) + " columns");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            char* end = nullptr;
            const double v = std::strtod(cells[i].c_str(), &end);
            if (cells[i].empty() || *end != '\0')
                fail(ErrorKind::Config, path + ":" + std::to_string(line_no) + ": '" + cells[i] + "' is not a number");
            data.columns[i].push_back(v);
        }
    }
    return data;
}

} // namespace warpcyl::cli
