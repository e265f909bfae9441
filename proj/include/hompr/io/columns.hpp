#pragma once

// Plain-text column files: '#' header lines ("# key: value"), then rows of
// whitespace-separated numbers written with 17 significant digits.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "hompr/error.hpp"

namespace hompr::io {

struct ColumnFile {
    /// "# key: value" header entries, in any order.
    std::map<std::string, std::string> header;
    /// Free-form header lines without a key.
    std::vector<std::string> comments;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
};

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Strict number parse: the whole token must be consumed, nan/inf rejected.
inline bool parse_double(std::string_view token, double& out) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline ColumnFile parse_columns(std::istream& in, const std::string& source, std::size_t expected_columns = 0) {
    ColumnFile f;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            const auto body = trim(t.substr(1));
            const auto colon = body.find(':');
            if (colon != std::string_view::npos && body.substr(0, colon).find(' ') == std::string_view::npos)
                f.header[std::string(trim(body.substr(0, colon)))] = std::string(trim(body.substr(colon + 1)));
            else
                f.comments.emplace_back(body);
            continue;
        }
        std::vector<double> row;
        std::istringstream tokens{std::string(t)};
        std::string tok;
        while (tokens >> tok) {
            double v = 0.0;
            if (!parse_double(tok, v))
                throw InputError(source + ":" + std::to_string(line_no) + ": '" + tok + "' is not a finite number");
            row.push_back(v);
        }
        if (f.columns.empty()) {
            if (expected_columns != 0 && row.size() != expected_columns)
                throw InputError(source + ":" + std::to_string(line_no) + ": expected " +
                                 std::to_string(expected_columns) + " columns, found " + std::to_string(row.size()));
            f.columns.resize(row.size());
        } else if (row.size() != f.columns.size()) {
            throw InputError(source + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(f.columns.size()) + " columns, found " + std::to_string(row.size()));
        }
        for (std::size_t c = 0; c < row.size(); ++c) f.columns[c].push_back(row[c]);
    }
    if (f.columns.empty()) throw InputError(source + ": no data rows");
    return f;
}

inline ColumnFile read_columns(const std::filesystem::path& path, std::size_t expected_columns = 0) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    return parse_columns(in, path.string(), expected_columns);
}

struct ColumnSpec {
    std::string name;
    const std::vector<double>* values;
};

/// Writes header entries ("# key: value"), a "# columns:" line and rows.
inline void write_columns(const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, std::string>>& header,
                          const std::vector<ColumnSpec>& columns) {
    detail::require(!columns.empty(), "no columns to write");
    const std::size_t rows = columns.front().values->size();
    for (const auto& c : columns) detail::require(c.values->size() == rows, "columns differ in length");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError(path.string() + ": cannot write file");
    for (const auto& [k, v] : header) out << "# " << k << ": " << v << '\n';
    out << "# columns:";
    for (const auto& c : columns) out << ' ' << c.name;
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out << ' ';
            out << format_double((*columns[c].values)[r]);
        }
        out << '\n';
    }
    if (!out) throw InputError(path.string() + ": write failed");
}

} // namespace hompr::io
