#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "signallab/core/error.hpp"

namespace signallab {

/// One parsed CSV table. Lines starting with '#' before any data are treated
/// as comments. Quoted fields may contain commas, doubled quotes, and
/// newlines.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines; // 1-based source line of each row

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

namespace detail {

struct CsvScanner {
    std::istream& in;
    std::size_t line = 1;

    // Reads one record; returns false on clean EOF.
    bool record(std::vector<std::string>& out) {
        out.clear();
        int c = in.get();
        while (c == '\n') { // skip blank lines
            ++line;
            c = in.get();
        }
        if (c == EOF) return false;
        std::string field;
        bool quoted = false;
        const std::size_t start_line = line;
        while (true) {
            if (c == EOF) {
                if (quoted) throw parse_error(start_line, "unterminated quoted field");
                out.push_back(field);
                return true;
            }
            char ch = static_cast<char>(c);
            if (quoted) {
                if (ch == '"') {
                    int peek = in.peek();
                    if (peek == '"') {
                        field += '"';
                        in.get();
                    } else {
                        quoted = false;
                    }
                } else {
                    if (ch == '\n') ++line;
                    field += ch;
                }
            } else if (ch == '"' && field.empty()) {
                quoted = true;
            } else if (ch == ',') {
                out.push_back(field);
                field.clear();
            } else if (ch == '\n') {
                ++line;
                out.push_back(field);
                return true;
            } else if (ch != '\r') {
                field += ch;
            }
            c = in.get();
        }
    }
};

} // namespace detail

inline CsvTable read_csv(std::istream& in) {
    detail::CsvScanner scanner{in};
    CsvTable table;
    std::vector<std::string> rec;
    std::size_t at = scanner.line;
    while (scanner.record(rec)) {
        if (!rec.empty() && !rec[0].empty() && rec[0][0] == '#' && table.header.empty()) {
            at = scanner.line;
            continue; // leading comment
        }
        if (table.header.empty()) {
            table.header = rec;
        } else {
            if (rec.size() != table.header.size())
                throw parse_error(at, "expected " + std::to_string(table.header.size()) +
                                          " fields, found " + std::to_string(rec.size()));
            table.rows.push_back(rec);
            table.row_lines.push_back(at);
        }
        at = scanner.line;
    }
    if (table.header.empty()) throw parse_error("empty CSV input");
    return table;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(fields[i]);
    }
    os << '\n';
}

} // namespace signallab
