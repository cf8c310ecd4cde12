// Shared test fixtures and independent oracles. Everything here is written
// against the definitions directly (naive formulas, numeric integration),
// not against the library code, so the two sides can disagree.
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "signallab/core/date.hpp"
#include "signallab/core/series.hpp"

namespace testutil {

// ------------------------------------------------------------- fixtures --

inline signallab::Week monday(const char* iso_date) {
    return signallab::Week::of_date(signallab::parse_date(iso_date));
}

/// Series of fully observed values starting at the given Monday.
inline signallab::WeeklySeries make_series(const std::vector<double>& values,
                                           const char* start = "2012-01-02",
                                           std::string label = "test") {
    signallab::WeeklySeries s;
    s.start = monday(start);
    s.label = std::move(label);
    for (double v : values) s.values.emplace_back(v);
    return s;
}

inline signallab::WeeklySeries make_series_opt(const std::vector<std::optional<double>>& values,
                                               const char* start = "2012-01-02",
                                               std::string label = "test") {
    signallab::WeeklySeries s;
    s.start = monday(start);
    s.label = std::move(label);
    s.values = values;
    return s;
}

// -------------------------------------------------------------- oracles --

/// Product-moment correlation straight from the definition.
inline double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

/// Least squares via explicit normal equations X'X b = X'y, solved by
/// Gaussian elimination with partial pivoting. Returns (coefficients, rss).
inline std::pair<std::vector<double>, double> oracle_ols(const std::vector<double>& y,
                                                         const std::vector<std::vector<double>>& X) {
    const std::size_t n = y.size();
    const std::size_t k = X.front().size();
    std::vector<std::vector<double>> A(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t r = 0; r < n; ++r) A[i][j] += X[r][i] * X[r][j];
        for (std::size_t r = 0; r < n; ++r) A[i][k] += X[r][i] * y[r];
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[pivot][col])) pivot = r;
        std::swap(A[col], A[pivot]);
        if (std::fabs(A[col][col]) < 1e-12) throw std::runtime_error("oracle_ols: singular");
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c <= k; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<double> beta(k);
    for (std::size_t i = 0; i < k; ++i) beta[i] = A[i][k] / A[i][i];
    double rss = 0;
    for (std::size_t r = 0; r < n; ++r) {
        double fit = 0;
        for (std::size_t i = 0; i < k; ++i) fit += X[r][i] * beta[i];
        rss += (y[r] - fit) * (y[r] - fit);
    }
    return {beta, rss};
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    if (a >= b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

/// Student-t upper tail probability by numeric integration of the density:
/// the head on [t, T] directly, the tail on [T, inf) via x = 1/y.
inline double oracle_t_sf(double t, double nu) {
    if (t < 0) return 1.0 - oracle_t_sf(-t, nu);
    const double lc =
        std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * M_PI);
    const auto pdf = [&](double x) { return std::exp(lc - 0.5 * (nu + 1.0) * std::log1p(x * x / nu)); };
    const double T = std::max(t, 1.0) * 3.0 + 40.0;
    const double head = integrate(pdf, t, T);
    // transformed tail integrand: exp(lc) nu^((nu+1)/2) y^(nu-1) (1+nu y^2)^(-(nu+1)/2)
    const auto tail_pdf = [&](double y) {
        if (y <= 0.0) return nu == 1.0 ? std::exp(lc) : 0.0;
        return std::exp(lc + 0.5 * (nu + 1.0) * std::log(nu) + (nu - 1.0) * std::log(y) -
                        0.5 * (nu + 1.0) * std::log1p(nu * y * y));
    };
    const double tail = integrate(tail_pdf, 0.0, 1.0 / T, 1e-14);
    return head + tail;
}

/// F upper tail probability, same two-piece scheme. Requires d2 >= 2 so the
/// transformed tail integrand stays bounded at zero.
inline double oracle_f_sf(double f, double d1, double d2) {
    if (f <= 0) return 1.0;
    const double lk = std::lgamma(0.5 * (d1 + d2)) - std::lgamma(0.5 * d1) -
                      std::lgamma(0.5 * d2) + 0.5 * d1 * (std::log(d1) - std::log(d2));
    const auto pdf = [&](double x) {
        return std::exp(lk + (0.5 * d1 - 1.0) * std::log(x) -
                        0.5 * (d1 + d2) * std::log1p(d1 * x / d2));
    };
    const double T = std::max(3.0 * f, 50.0);
    const double head = integrate(pdf, f, T);
    // transformed: exp(lk) d2^((d1+d2)/2) y^(d2/2-1) (d2 y + d1)^(-(d1+d2)/2)
    const auto tail_pdf = [&](double y) {
        if (y <= 0.0)
            return d2 == 2.0 ? std::exp(lk + 0.5 * (d1 + d2) * (std::log(d2) - std::log(d1))) : 0.0;
        return std::exp(lk + 0.5 * (d1 + d2) * std::log(d2) + (0.5 * d2 - 1.0) * std::log(y) -
                        0.5 * (d1 + d2) * std::log(d2 * y + d1));
    };
    const double tail = integrate(tail_pdf, 0.0, 1.0 / T, 1e-14);
    return head + tail;
}

inline double rel_err(double got, double want) {
    if (want == 0.0) return std::fabs(got);
    return std::fabs(got - want) / std::fabs(want);
}

// ---------------------------------------------------- subprocess helpers --

struct CmdResult {
    int code = -1;
    std::string output;  // stdout and stderr combined
};

inline CmdResult run_cmd(const std::string& cmd) {
    CmdResult res;
    FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed: " + cmd);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) res.output.append(buf, n);
    const int status = pclose(pipe);
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

inline std::string cli_path() {
    const char* env = std::getenv("SIGNALLAB_CLI");
    if (!env || !*env) throw std::runtime_error("SIGNALLAB_CLI not set");
    return env;
}

class TempDir {
public:
    TempDir() {
        char tmpl[] = "/tmp/siglab_test_XXXXXX";
        if (!mkdtemp(tmpl)) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::string& path() const { return path_; }
    std::string operator/(const std::string& name) const { return path_ + "/" + name; }

private:
    std::string path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

} // namespace testutil
