#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "signallab/core/csv.hpp"
#include "signallab/core/error.hpp"
#include "signallab/core/format.hpp"
#include "signallab/core/series.hpp"
#include "signallab/tsa/dist.hpp"

namespace signallab::tsa {

constexpr double kModerateR = 0.3;

/// Product-moment correlation; callers drop missing pairs first.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    if (x.size() < 3) throw std::invalid_argument("pearson: need at least 3 pairs");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw degenerate_error("degenerate series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct LagStat {
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

/// Two-sided p for H0: rho = 0, via t = r·sqrt((n−2)/(1−r²)).
inline double pearson_p_value(double r, std::size_t n) {
    if (n < 3) throw std::invalid_argument("pearson_p_value: need n >= 3");
    const double r2 = std::clamp(r * r, 0.0, 1.0);
    if (r2 >= 1.0) return 0.0;
    const double df = static_cast<double>(n - 2);
    const double t = r * std::sqrt(df / (1.0 - r2));
    return t_two_sided_p(t, df);
}

inline void require_aligned(const WeeklySeries& a, const WeeklySeries& b) {
    if (a.start != b.start || a.size() != b.size())
        throw alignment_error("series not aligned");
}

/// Correlation per lag; the cell at lag L pairs tweets[t] with sales[t+L],
/// so positive lags look at sales after the tweets. Cells without 3 usable
/// pairs, or with a constant window, are absent.
inline std::map<int, std::optional<LagStat>> lagged_correlation(const WeeklySeries& tweets,
                                                                const WeeklySeries& sales,
                                                                int min_lag = -4,
                                                                int max_lag = 4) {
    require_aligned(tweets, sales);
    if (min_lag > max_lag) throw std::invalid_argument("lagged_correlation: empty lag range");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(tweets.size());
    std::map<int, std::optional<LagStat>> out;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
        std::vector<double> xs, ys;
        for (std::ptrdiff_t t = std::max<std::ptrdiff_t>(0, -lag);
             t < std::min<std::ptrdiff_t>(n, n - lag); ++t) {
            const auto& x = tweets.values[static_cast<std::size_t>(t)];
            const auto& y = sales.values[static_cast<std::size_t>(t + lag)];
            if (x && y) {
                xs.push_back(*x);
                ys.push_back(*y);
            }
        }
        if (xs.size() < 3) {
            out[lag] = std::nullopt;
            continue;
        }
        try {
            LagStat stat;
            stat.r = pearson(xs, ys);
            stat.n = xs.size();
            stat.p = pearson_p_value(stat.r, stat.n);
            out[lag] = stat;
        } catch (const degenerate_error&) {
            out[lag] = std::nullopt;
        }
    }
    return out;
}

struct CorrelationRow {
    std::string filter;
    std::map<int, std::optional<LagStat>> cells;
    std::vector<int> moderate_lags;  // |r| >= kModerateR
    bool degenerate = false;         // constant tweet series, no usable cells
};

struct CorrelationMatrix {
    std::vector<CorrelationRow> rows;
    std::size_t n_weeks = 0;
    int min_lag = -4;
    int max_lag = 4;
};

/// One row per (filter description, tweet series), all against the same
/// sales series. Row order follows the input.
inline CorrelationMatrix correlation_table(
    const std::vector<std::pair<std::string, WeeklySeries>>& tweet_rows,
    const WeeklySeries& sales, int min_lag = -4, int max_lag = 4) {
    CorrelationMatrix table;
    table.n_weeks = sales.size();
    table.min_lag = min_lag;
    table.max_lag = max_lag;
    for (const auto& [name, series] : tweet_rows) {
        CorrelationRow row;
        row.filter = name;
        row.cells = lagged_correlation(series, sales, min_lag, max_lag);
        bool any = false;
        for (const auto& [lag, cell] : row.cells)
            if (cell) {
                any = true;
                if (std::fabs(cell->r) >= kModerateR) row.moderate_lags.push_back(lag);
            }
        row.degenerate = !any;
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// CSV in the report shape: filter, one r column per lag, pair count, and a
/// flags column listing moderate lags (or "degenerate").
inline void write_correlation_csv(std::ostream& os, const CorrelationMatrix& table,
                                  const std::string& comment = {}) {
    if (!comment.empty()) os << "# " << comment << '\n';
    std::vector<std::string> header{"filter"};
    for (int lag = table.min_lag; lag <= table.max_lag; ++lag)
        header.push_back("lag_" + std::to_string(lag));
    header.push_back("n");
    header.push_back("flags");
    write_csv_row(os, header);
    for (const auto& row : table.rows) {
        std::vector<std::string> fields{row.filter};
        std::size_t n_pairs = 0;
        for (int lag = table.min_lag; lag <= table.max_lag; ++lag) {
            const auto& cell = row.cells.at(lag);
            fields.push_back(cell ? format_num(cell->r) : "");
            if (cell) n_pairs = std::max(n_pairs, cell->n);
        }
        fields.push_back(row.degenerate ? "" : std::to_string(n_pairs));
        std::string flags;
        if (row.degenerate) {
            flags = "degenerate";
        } else {
            for (int lag : row.moderate_lags) {
                if (!flags.empty()) flags += ';';
                flags += "moderate@" + std::to_string(lag);
            }
        }
        fields.push_back(flags);
        write_csv_row(os, fields);
    }
}

} // namespace signallab::tsa
