#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "signallab/core/csv.hpp"
#include "signallab/core/format.hpp"
#include "signallab/core/series.hpp"

namespace signallab::ingest {

/// Weekly series file: optional leading '#' comments, header
/// week_start,value, one row per consecutive Monday. Missing weeks keep an
/// empty value field.
inline void write_weekly_csv(std::ostream& os, const WeeklySeries& s,
                             const std::string& comment = {}, int digits = 10) {
    if (!comment.empty()) os << "# " << comment << '\n';
    if (!s.label.empty()) os << "# label: " << s.label << '\n';
    write_csv_row(os, {"week_start", "value"});
    for (std::size_t i = 0; i < s.size(); ++i)
        write_csv_row(os, {format_date(s.week_at(i).monday()),
                           s.values[i] ? format_num(*s.values[i], digits) : ""});
}

inline WeeklySeries read_weekly_csv(std::istream& in, std::string label = {}) {
    CsvTable table = read_csv(in);
    if (table.header != std::vector<std::string>{"week_start", "value"})
        throw parse_error(1, "weekly series header must be week_start,value");
    if (table.rows.empty()) throw parse_error(1, "weekly series has no rows");
    WeeklySeries s;
    s.label = std::move(label);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::size_t line = table.row_lines[r];
        Date d{};
        try {
            d = parse_date(table.rows[r][0]);
        } catch (const parse_error& e) {
            throw parse_error(line, e.what());
        }
        if (!is_monday(d)) throw parse_error(line, "week_start " + table.rows[r][0] + " is not a Monday");
        const Week w = Week::of_date(d);
        if (r == 0)
            s.start = w;
        else if (w.index != s.start.index + static_cast<std::int64_t>(r))
            throw parse_error(line, "weeks are not consecutive");
        const std::string& field = table.rows[r][1];
        if (field.empty()) {
            s.values.emplace_back();
            continue;
        }
        try {
            std::size_t pos = 0;
            const double v = std::stod(field, &pos);
            if (pos != field.size()) throw std::invalid_argument("");
            s.values.emplace_back(v);
        } catch (const std::exception&) {
            throw parse_error(line, "invalid value '" + field + "'");
        }
    }
    return s;
}

} // namespace signallab::ingest
