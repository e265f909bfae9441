#pragma once

// Flat "dotted.key = value" text files. '#' starts a comment; blank lines
// are ignored. Every key may appear once. Readers mark the keys they
// consume so leftovers can be reported as unknown fields.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hompr/error.hpp"
#include "hompr/io/columns.hpp"

namespace hompr::io {

class KeyValueFile {
public:
    static KeyValueFile parse(std::istream& in, const std::string& source) {
        KeyValueFile f;
        f.source_ = source;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto hash = line.find('#');
            auto t = trim(std::string_view(line).substr(0, hash));
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string_view::npos)
                throw InputError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
            const std::string key(trim(t.substr(0, eq)));
            const std::string value(trim(t.substr(eq + 1)));
            if (key.empty()) throw InputError(source + ":" + std::to_string(line_no) + ": empty key");
            if (f.entries_.count(key))
                throw FieldError(key, "given twice (" + source + ":" + std::to_string(line_no) + ")");
            f.entries_[key] = {value, line_no};
            f.order_.push_back(key);
        }
        return f;
    }

    static KeyValueFile read(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw InputError(path.string() + ": cannot open config file");
        return parse(in, path.string());
    }

    const std::string& source() const noexcept { return source_; }
    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    /// Replaces or adds a value (command-line overrides).
    void set(const std::string& key, std::string value) {
        if (!entries_.count(key)) order_.push_back(key);
        entries_[key] = {std::move(value), 0};
    }

    std::optional<std::string> text(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        used_.insert(key);
        return it->second.first;
    }

    std::string text_or(const std::string& key, std::string fallback) const {
        auto v = text(key);
        return v ? *v : std::move(fallback);
    }

    std::string required_text(const std::string& key) const {
        auto v = text(key);
        if (!v) throw FieldError(key, "is required");
        return *v;
    }

    std::optional<double> number(const std::string& key) const {
        auto v = text(key);
        if (!v) return std::nullopt;
        double d = 0.0;
        if (!parse_double(*v, d)) throw FieldError(key, "'" + *v + "' is not a finite number");
        return d;
    }

    double number_or(const std::string& key, double fallback) const { return number(key).value_or(fallback); }

    double required_number(const std::string& key) const {
        auto v = number(key);
        if (!v) throw FieldError(key, "is required");
        return *v;
    }

    std::optional<std::int64_t> integer(const std::string& key) const {
        auto v = text(key);
        if (!v) return std::nullopt;
        std::int64_t i = 0;
        const auto* end = v->data() + v->size();
        const auto [ptr, ec] = std::from_chars(v->data(), end, i);
        if (ec != std::errc() || ptr != end) throw FieldError(key, "'" + *v + "' is not an integer");
        return i;
    }

    std::int64_t integer_or(const std::string& key, std::int64_t fallback) const {
        return integer(key).value_or(fallback);
    }

    /// Whitespace- or comma-separated numbers.
    std::optional<std::vector<double>> numbers(const std::string& key) const {
        auto v = text(key);
        if (!v) return std::nullopt;
        std::string s = *v;
        for (char& c : s)
            if (c == ',') c = ' ';
        std::istringstream in(s);
        std::vector<double> out;
        std::string tok;
        while (in >> tok) {
            double d = 0.0;
            if (!parse_double(tok, d)) throw FieldError(key, "'" + tok + "' is not a finite number");
            out.push_back(d);
        }
        return out;
    }

    /// Keys present in the file that no reader asked for.
    std::vector<std::string> unused() const {
        std::vector<std::string> out;
        for (const auto& k : order_)
            if (!used_.count(k)) out.push_back(k);
        return out;
    }

    void reject_unused() const {
        const auto u = unused();
        if (!u.empty()) throw FieldError(u.front(), "unknown field");
    }

    /// All entries in file order.
    std::vector<std::pair<std::string, std::string>> entries() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& k : order_) out.emplace_back(k, entries_.at(k).first);
        return out;
    }

private:
    std::string source_;
    std::map<std::string, std::pair<std::string, std::size_t>> entries_;
    std::vector<std::string> order_;
    mutable std::set<std::string> used_;
};

/// "key = value" lines for records.
inline void write_record(const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, std::string>>& entries) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError(path.string() + ": cannot write file");
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
    if (!out) throw InputError(path.string() + ": write failed");
}

} // namespace hompr::io
