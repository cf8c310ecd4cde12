#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "signallab/core/error.hpp"

namespace signallab::tsa {

struct OlsFit {
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    double rss = 0.0;
    std::size_t n = 0;  // observations
    std::size_t k = 0;  // regressors including intercept
};

/// Least squares via Householder QR; X is row-major, one row per
/// observation. Near-zero R diagonal (1e-10 relative) is treated as rank
/// deficiency rather than letting coefficients blow up.
inline OlsFit ols_fit(const std::vector<double>& y, const std::vector<std::vector<double>>& X) {
    const std::size_t n = X.size();
    if (n == 0) throw std::invalid_argument("ols_fit: empty design matrix");
    const std::size_t k = X[0].size();
    if (k == 0) throw std::invalid_argument("ols_fit: no regressors");
    if (y.size() != n) throw std::invalid_argument("ols_fit: y length mismatch");
    for (const auto& row : X)
        if (row.size() != k) throw std::invalid_argument("ols_fit: ragged design matrix");
    if (n <= k) throw std::invalid_argument("ols_fit: need more observations than regressors");

    // Column-major copy; the factorization overwrites it with the
    // Householder vectors and the strict upper part of R.
    std::vector<double> a(n * k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) a[i + j * n] = X[i][j];
    std::vector<double> b = y;
    std::vector<double> rdiag(k, 0.0);

    for (std::size_t j = 0; j < k; ++j) {
        double nrm = 0.0;
        for (std::size_t i = j; i < n; ++i) nrm = std::hypot(nrm, a[i + j * n]);
        if (nrm != 0.0) {
            if (a[j + j * n] < 0.0) nrm = -nrm;
            for (std::size_t i = j; i < n; ++i) a[i + j * n] /= nrm;
            a[j + j * n] += 1.0;
            for (std::size_t jj = j + 1; jj < k; ++jj) {
                double s = 0.0;
                for (std::size_t i = j; i < n; ++i) s += a[i + j * n] * a[i + jj * n];
                s = -s / a[j + j * n];
                for (std::size_t i = j; i < n; ++i) a[i + jj * n] += s * a[i + j * n];
            }
            double s = 0.0;
            for (std::size_t i = j; i < n; ++i) s += a[i + j * n] * b[i];
            s = -s / a[j + j * n];
            for (std::size_t i = j; i < n; ++i) b[i] += s * a[i + j * n];
        }
        rdiag[j] = -nrm;
    }

    double max_diag = 0.0;
    for (double d : rdiag) max_diag = std::max(max_diag, std::fabs(d));
    if (max_diag == 0.0) throw degenerate_error("rank-deficient design matrix");
    for (double d : rdiag)
        if (std::fabs(d) < 1e-10 * max_diag) throw degenerate_error("rank-deficient design matrix");

    OlsFit fit;
    fit.n = n;
    fit.k = k;
    fit.coefficients.assign(k, 0.0);
    for (std::size_t jr = k; jr-- > 0;) {
        double s = b[jr];
        for (std::size_t jj = jr + 1; jj < k; ++jj) s -= a[jr + jj * n] * fit.coefficients[jj];
        fit.coefficients[jr] = s / rdiag[jr];
    }
    for (std::size_t i = k; i < n; ++i) fit.rss += b[i] * b[i];

    // Invert R (strict upper part lives in a, diagonal in rdiag), then
    // diag((X'X)^{-1}) = rows of R^{-1} squared and summed.
    std::vector<double> inv(k * k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        inv[j + j * k] = 1.0 / rdiag[j];
        for (std::size_t i = j; i-- > 0;) {
            double s = 0.0;
            for (std::size_t m = i + 1; m <= j; ++m) s += a[i + m * n] * inv[m + j * k];
            inv[i + j * k] = -s / rdiag[i];
        }
    }
    const double sigma2 = fit.rss / static_cast<double>(n - k);
    fit.std_errors.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t m = j; m < k; ++m) s += inv[j + m * k] * inv[j + m * k];
        fit.std_errors[j] = std::sqrt(sigma2 * s);
    }
    return fit;
}

} // namespace signallab::tsa
