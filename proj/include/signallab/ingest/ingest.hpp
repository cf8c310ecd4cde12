#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <utility>
#include <vector>

#include "signallab/core/series.hpp"
#include "signallab/ingest/records.hpp"

namespace signallab::ingest {

namespace detail {

inline std::string fold_ascii(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace detail

/// Keeps tweets whose language and time-zone label both match the country
/// spec, case-insensitively. Time zones carry the capital's name, which
/// separates countries sharing a language.
inline std::vector<TweetRecord> filter_country(const std::vector<TweetRecord>& tweets,
                                               const CountrySpec& spec) {
    const std::string lang = detail::fold_ascii(spec.language);
    const std::string capital = detail::fold_ascii(spec.capital);
    std::vector<TweetRecord> out;
    for (const auto& t : tweets)
        if (detail::fold_ascii(t.language) == lang && detail::fold_ascii(t.user_timezone) == capital)
            out.push_back(t);
    return out;
}

/// Counts timestamps per Monday-start week over [from, to]. Weeks with no
/// timestamps hold an explicit zero. Timestamps outside the range are
/// skipped and tallied in *n_outside when given.
inline WeeklySeries aggregate_weekly(const std::vector<Timestamp>& timestamps, Date from, Date to,
                                     std::size_t* n_outside = nullptr, std::string label = {}) {
    if (days_since_epoch(from) > days_since_epoch(to))
        throw std::invalid_argument("aggregate range start after end");
    const Week first = Week::of_date(from);
    const Week last = Week::of_date(to);
    WeeklySeries series;
    series.start = first;
    series.label = std::move(label);
    series.values.assign(static_cast<std::size_t>(last.index - first.index + 1), 0.0);
    std::size_t outside = 0;
    for (const auto& ts : timestamps) {
        const Week w = ts.week();
        if (w < first || w > last) {
            ++outside;
            continue;
        }
        auto& cell = series.values[static_cast<std::size_t>(w.index - first.index)];
        cell = cell.value_or(0.0) + 1.0;
    }
    if (n_outside) *n_outside = outside;
    return series;
}

/// Sums sales units per week over [from, to]. Weeks with no record stay
/// missing: an absent sales row is unobserved, unlike a week without tweets.
inline WeeklySeries aggregate_sales(const std::vector<SalesRecord>& records, Date from, Date to,
                                    std::size_t* n_outside = nullptr, std::string label = {}) {
    if (days_since_epoch(from) > days_since_epoch(to))
        throw std::invalid_argument("aggregate range start after end");
    const Week first = Week::of_date(from);
    const Week last = Week::of_date(to);
    WeeklySeries series;
    series.start = first;
    series.label = std::move(label);
    series.values.assign(static_cast<std::size_t>(last.index - first.index + 1), std::nullopt);
    std::size_t outside = 0;
    for (const auto& rec : records) {
        const Week w = Week::of_date(rec.week_start);
        if (w < first || w > last) {
            ++outside;
            continue;
        }
        auto& cell = series.values[static_cast<std::size_t>(w.index - first.index)];
        cell = cell.value_or(0.0) + rec.units;
    }
    if (n_outside) *n_outside = outside;
    return series;
}

/// Scales so the maximum non-missing value becomes 1. Missing stays missing.
inline WeeklySeries normalize_series(const WeeklySeries& s) {
    double max_v = 0.0;
    bool any = false;
    for (const auto& v : s.values)
        if (v) {
            max_v = any ? std::max(max_v, *v) : *v;
            any = true;
        }
    if (!any) throw degenerate_error("cannot normalize: all values missing");
    if (max_v <= 0.0) throw degenerate_error("cannot normalize: non-positive maximum");
    WeeklySeries out = s;
    for (auto& v : out.values)
        if (v) v = *v / max_v;
    return out;
}

/// Trims both series to the intersection of their week ranges.
inline std::pair<WeeklySeries, WeeklySeries> align(const WeeklySeries& a, const WeeklySeries& b) {
    const Week start = std::max(a.start, b.start);
    const Week end = std::min(a.end(), b.end());
    if (start >= end) throw alignment_error("no overlap between series week ranges");
    auto slice = [&](const WeeklySeries& s) {
        WeeklySeries out;
        out.start = start;
        out.label = s.label;
        const std::size_t offset = static_cast<std::size_t>(start.index - s.start.index);
        out.values.assign(s.values.begin() + offset,
                          s.values.begin() + offset + static_cast<std::size_t>(end.index - start.index));
        return out;
    };
    return {slice(a), slice(b)};
}

/// Week range [min, max] spanned by a set of timestamps.
inline std::pair<Date, Date> natural_range(const std::vector<Timestamp>& timestamps) {
    if (timestamps.empty()) throw std::invalid_argument("no timestamps for range");
    auto [lo, hi] = std::minmax_element(timestamps.begin(), timestamps.end());
    return {lo->week().monday(), hi->week().monday()};
}

inline std::pair<Date, Date> natural_range(const std::vector<SalesRecord>& records) {
    if (records.empty()) throw std::invalid_argument("no sales records for range");
    auto cmp = [](const SalesRecord& a, const SalesRecord& b) {
        return days_since_epoch(a.week_start) < days_since_epoch(b.week_start);
    };
    auto [lo, hi] = std::minmax_element(records.begin(), records.end(), cmp);
    return {lo->week_start, hi->week_start};
}

} // namespace signallab::ingest
