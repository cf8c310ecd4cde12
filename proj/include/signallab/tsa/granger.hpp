#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "signallab/core/csv.hpp"
#include "signallab/core/error.hpp"
#include "signallab/core/format.hpp"
#include "signallab/core/series.hpp"
#include "signallab/tsa/correlation.hpp"
#include "signallab/tsa/dist.hpp"
#include "signallab/tsa/ols.hpp"
#include "signallab/tsa/stationarity.hpp"

namespace signallab::tsa {

struct GrangerResult {
    int lags = 0;
    double F = 0.0;
    double p_value = 1.0;
    std::size_t n_obs = 0;  // effective observations after lag trimming
    double rss_restricted = 0.0;
    double rss_unrestricted = 0.0;
    bool degenerate = false;  // perfect unrestricted fit
};

namespace detail {

/// Longest stretch of weeks where both series are present, as value pairs.
inline std::pair<std::vector<double>, std::vector<double>> longest_joint_run(
    const WeeklySeries& x, const WeeklySeries& y) {
    std::size_t best_first = 0, best_len = 0, first = 0, len = 0;
    for (std::size_t k = 0; k <= x.size(); ++k) {
        const bool present = k < x.size() && x.values[k] && y.values[k];
        if (present) {
            if (len == 0) first = k;
            ++len;
            if (len > best_len) {
                best_len = len;
                best_first = first;
            }
        } else {
            len = 0;
        }
    }
    std::vector<double> xs(best_len), ys(best_len);
    for (std::size_t i = 0; i < best_len; ++i) {
        xs[i] = *x.values[best_first + i];
        ys[i] = *y.values[best_first + i];
    }
    return {std::move(xs), std::move(ys)};
}

} // namespace detail

/// Does x Granger-cause y at lag depth k? Compares y regressed on its own
/// k lags against the same regression extended with k lags of x:
///   F = ((RSS_r − RSS_u)/k) / (RSS_u/(n_eff − 2k − 1))
/// A perfect unrestricted fit reports p = 0 with the degenerate flag set.
inline GrangerResult granger_test(const WeeklySeries& x, const WeeklySeries& y, int k,
                                  std::string* warning = nullptr) {
    if (k < 1) throw std::invalid_argument("granger_test: lags must be positive");
    require_aligned(x, y);
    if (warning) warning->clear();
    auto [xs, ys] = detail::longest_joint_run(x, y);
    if (x.size() > 0 && static_cast<double>(xs.size()) < 0.8 * static_cast<double>(x.size()) &&
        warning)
        *warning = "granger: using longest joint run of " + std::to_string(xs.size()) + " of " +
                   std::to_string(x.size()) + " weeks";

    const std::size_t uk = static_cast<std::size_t>(k);
    if (xs.size() < uk + 2 * uk + 1 + 5) throw std::invalid_argument("granger_test: too few observations");
    const std::size_t n_eff = xs.size() - uk;

    std::vector<double> target(ys.begin() + static_cast<std::ptrdiff_t>(uk), ys.end());
    std::vector<std::vector<double>> restricted, unrestricted;
    for (std::size_t t = uk; t < ys.size(); ++t) {
        std::vector<double> row{1.0};
        for (std::size_t i = 1; i <= uk; ++i) row.push_back(ys[t - i]);
        restricted.push_back(row);
        for (std::size_t i = 1; i <= uk; ++i) row.push_back(xs[t - i]);
        unrestricted.push_back(std::move(row));
    }

    const OlsFit fit_r = ols_fit(target, restricted);
    const OlsFit fit_u = ols_fit(target, unrestricted);

    GrangerResult res;
    res.lags = k;
    res.n_obs = n_eff;
    res.rss_restricted = fit_r.rss;
    res.rss_unrestricted = std::min(fit_u.rss, fit_r.rss);
    const double df_denom = static_cast<double>(n_eff - 2 * uk - 1);
    if (res.rss_unrestricted <= 0.0) {
        res.degenerate = true;
        res.F = std::numeric_limits<double>::infinity();
        res.p_value = 0.0;
        return res;
    }
    res.F = std::max(0.0, (res.rss_restricted - res.rss_unrestricted) / static_cast<double>(k) /
                              (res.rss_unrestricted / df_denom));
    res.p_value = f_sf(res.F, static_cast<double>(k), df_denom);
    return res;
}

struct GrangerSweepCell {
    int k = 0;
    std::optional<GrangerResult> result;
    std::string error;  // set when this depth could not be tested
};

/// Runs granger_test at every depth in [k_min, k_max], optionally on
/// first-differenced series. Failures are recorded and the sweep continues.
inline std::vector<GrangerSweepCell> granger_sweep(const WeeklySeries& x, const WeeklySeries& y,
                                                   int k_min, int k_max,
                                                   bool difference_first = false) {
    std::vector<GrangerSweepCell> cells;
    if (k_min > k_max) return cells;
    WeeklySeries xs = x, ys = y;
    if (difference_first) {
        xs = difference(xs);
        ys = difference(ys);
    }
    for (int k = k_min; k <= k_max; ++k) {
        GrangerSweepCell cell;
        cell.k = k;
        try {
            cell.result = granger_test(xs, ys, k);
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

/// CSV columns k,F,p,n_eff,flag; flag holds "significant" (p < 0.05),
/// "degenerate", or the per-depth error message.
inline void write_granger_csv(std::ostream& os, const std::vector<GrangerSweepCell>& cells,
                              const std::string& comment = {}) {
    if (!comment.empty()) os << "# " << comment << '\n';
    write_csv_row(os, {"k", "F", "p", "n_eff", "flag"});
    for (const auto& cell : cells) {
        std::vector<std::string> fields{std::to_string(cell.k)};
        if (cell.result) {
            const auto& r = *cell.result;
            fields.push_back(format_num(r.F));
            fields.push_back(format_num(r.p_value));
            fields.push_back(std::to_string(r.n_obs));
            if (r.degenerate)
                fields.push_back("degenerate");
            else if (r.p_value < 0.05)
                fields.push_back("significant");
            else
                fields.push_back("");
        } else {
            fields.push_back("");
            fields.push_back("");
            fields.push_back("");
            fields.push_back("error: " + cell.error);
        }
        write_csv_row(os, fields);
    }
}

} // namespace signallab::tsa
