#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>

#include "signallab/core/error.hpp"

namespace signallab {

using Date = std::chrono::year_month_day;

inline std::int64_t days_since_epoch(const Date& d) {
    return std::chrono::sys_days{d}.time_since_epoch().count();
}

inline Date date_from_days(std::int64_t days) {
    return Date{std::chrono::sys_days{std::chrono::days{days}}};
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

/// Monday-start UTC week. Index 0 is the week of 1969-12-29, the Monday
/// preceding the Unix epoch (1970-01-01 fell on a Thursday).
struct Week {
    std::int64_t index = 0;

    static Week of_date(const Date& d) { return Week{floor_div(days_since_epoch(d) + 3, 7)}; }
    static Week of_day(std::int64_t days) { return Week{floor_div(days + 3, 7)}; }

    Date monday() const { return date_from_days(index * 7 - 3); }

    Week operator+(std::int64_t n) const { return Week{index + n}; }
    auto operator<=>(const Week&) const = default;
};

inline bool is_monday(const Date& d) {
    return std::chrono::weekday{std::chrono::sys_days{d}} == std::chrono::Monday;
}

/// UTC instant, seconds since the Unix epoch.
struct Timestamp {
    std::int64_t seconds = 0;

    std::int64_t day() const { return floor_div(seconds, 86400); }
    Week week() const { return Week::of_day(day()); }
    auto operator<=>(const Timestamp&) const = default;
};

namespace detail {

inline bool parse_uint(const std::string& s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

} // namespace detail

/// Parses "YYYY-MM-DD". Throws parse_error on malformed or invalid dates.
inline Date parse_date(const std::string& s) {
    int y = 0, m = 0, d = 0;
    bool ok = s.size() == 10 && s[4] == '-' && s[7] == '-' &&
              detail::parse_uint(s, 0, 4, y) && detail::parse_uint(s, 5, 2, m) &&
              detail::parse_uint(s, 8, 2, d);
    if (!ok) throw parse_error("invalid date '" + s + "' (expected YYYY-MM-DD)");
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) throw parse_error("invalid date '" + s + "'");
    return date;
}

/// Parses an RFC 3339 timestamp, e.g. "2012-06-18T09:30:00Z" or with a
/// numeric offset "2012-06-18T10:30:00+01:00". Fractional seconds are
/// accepted and truncated.
inline Timestamp parse_timestamp(const std::string& s) {
    auto fail = [&]() -> Timestamp { throw parse_error("invalid timestamp '" + s + "'"); };
    if (s.size() < 20) return fail();
    int hh = 0, mm = 0, ss = 0;
    if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return fail();
    if (!(s[13] == ':' && s[16] == ':' && detail::parse_uint(s, 11, 2, hh) &&
          detail::parse_uint(s, 14, 2, mm) && detail::parse_uint(s, 17, 2, ss)))
        return fail();
    if (hh > 23 || mm > 59 || ss > 60) return fail();
    if (ss == 60) ss = 59; // leap second, clamp

    Date date;
    try {
        date = parse_date(s.substr(0, 10));
    } catch (const parse_error&) {
        return fail();
    }

    std::size_t pos = 19;
    while (pos < s.size() && (s[pos] == '.' || (pos > 19 && s[pos] >= '0' && s[pos] <= '9')))
        ++pos; // skip fractional seconds
    if (pos >= s.size()) return fail();

    std::int64_t offset = 0;
    char c = s[pos];
    if (c == 'Z' || c == 'z') {
        if (pos + 1 != s.size()) return fail();
    } else if (c == '+' || c == '-') {
        int oh = 0, om = 0;
        if (pos + 6 != s.size() || s[pos + 3] != ':' ||
            !detail::parse_uint(s, pos + 1, 2, oh) || !detail::parse_uint(s, pos + 4, 2, om))
            return fail();
        offset = (c == '+' ? 1 : -1) * (oh * 3600LL + om * 60LL);
    } else {
        return fail();
    }

    std::int64_t secs = days_since_epoch(date) * 86400LL + hh * 3600LL + mm * 60LL + ss - offset;
    return Timestamp{secs};
}

inline std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

inline std::string format_timestamp(const Timestamp& t) {
    std::int64_t day = t.day();
    std::int64_t rem = t.seconds - day * 86400LL;
    char buf[32];
    Date d = date_from_days(day);
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(d).c_str(),
                  static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

} // namespace signallab
