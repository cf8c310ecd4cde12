#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "signallab/core/error.hpp"
#include "signallab/core/format.hpp"
#include "signallab/core/series.hpp"
#include "signallab/tsa/correlation.hpp"
#include "signallab/tsa/ols.hpp"

namespace signallab::tsa {

/// First-order difference, anchored at the later week: out[k] = s[k+1] − s[k].
/// A missing value knocks out both adjacent differences.
inline WeeklySeries difference(const WeeklySeries& s) {
    if (s.size() < 2) throw std::invalid_argument("difference: need at least 2 weeks");
    WeeklySeries out;
    out.start = s.start + 1;
    out.label = s.label.empty() ? std::string{} : s.label + "_diff";
    out.values.resize(s.size() - 1);
    for (std::size_t k = 0; k + 1 < s.size(); ++k)
        if (s.values[k] && s.values[k + 1]) out.values[k] = *s.values[k + 1] - *s.values[k];
    return out;
}

/// Weekly ratio num/den. A zero denominator makes the week missing; a
/// numerator above the denominator means the numerator was never a subset
/// of the denominator's tweets, which is a caller error.
inline WeeklySeries fraction_series(const WeeklySeries& num, const WeeklySeries& den) {
    require_aligned(num, den);
    WeeklySeries out;
    out.start = num.start;
    out.label = num.label.empty() ? std::string{} : num.label + "_fraction";
    out.values.resize(num.size());
    for (std::size_t k = 0; k < num.size(); ++k) {
        if (!num.values[k] || !den.values[k]) continue;
        const double n = *num.values[k];
        const double d = *den.values[k];
        if (n > d)
            throw std::invalid_argument("fraction_series: numerator exceeds denominator at week " +
                                        format_date(num.week_at(k).monday()));
        if (d != 0.0) out.values[k] = n / d;
    }
    return out;
}

/// Large-sample Dickey-Fuller critical values, constant-no-trend case.
constexpr double kAdfCrit1pct = -3.43;
constexpr double kAdfCrit5pct = -2.86;
constexpr double kAdfCrit10pct = -2.57;

struct AdfResult {
    double statistic = 0.0;
    int lag_order = 0;
    std::size_t n_obs = 0;  // effective regression observations
    bool reject_1pct = false;
    bool reject_5pct = false;
    bool reject_10pct = false;
};

/// Augmented Dickey-Fuller with constant, no trend:
///   Δy_t = α + β·y_{t−1} + Σ_{i=1..p} γ_i·Δy_{t−i} + ε
/// The statistic is β divided by its standard error, compared against the
/// tabulated critical values. Runs on the longest contiguous non-missing
/// stretch; *warning is set when that stretch covers < 80% of the series.
inline AdfResult adf_test(const WeeklySeries& s, int p = 1, std::string* warning = nullptr) {
    if (p < 0) throw std::invalid_argument("adf_test: negative lag order");
    if (warning) warning->clear();
    const std::vector<double> y = longest_run_values(s);
    if (y.size() < static_cast<std::size_t>(p) + 10)
        throw std::invalid_argument("adf_test: too few contiguous observations");
    if (s.size() > 0 && static_cast<double>(y.size()) < 0.8 * static_cast<double>(s.size()) && warning)
        *warning = "adf: using longest run of " + std::to_string(y.size()) + " of " +
                   std::to_string(s.size()) + " weeks";

    bool constant = true;
    for (double v : y)
        if (v != y.front()) {
            constant = false;
            break;
        }
    if (constant) throw degenerate_error("degenerate series");

    std::vector<double> target;
    std::vector<std::vector<double>> design;
    for (std::size_t t = static_cast<std::size_t>(p) + 1; t < y.size(); ++t) {
        target.push_back(y[t] - y[t - 1]);
        std::vector<double> row{1.0, y[t - 1]};
        for (int i = 1; i <= p; ++i) {
            const std::size_t u = t - static_cast<std::size_t>(i);
            row.push_back(y[u] - y[u - 1]);
        }
        design.push_back(std::move(row));
    }

    const OlsFit fit = ols_fit(target, design);
    if (fit.std_errors[1] == 0.0) throw degenerate_error("degenerate series");
    AdfResult res;
    res.statistic = fit.coefficients[1] / fit.std_errors[1];
    res.lag_order = p;
    res.n_obs = target.size();
    res.reject_1pct = res.statistic < kAdfCrit1pct;
    res.reject_5pct = res.statistic < kAdfCrit5pct;
    res.reject_10pct = res.statistic < kAdfCrit10pct;
    return res;
}

} // namespace signallab::tsa
