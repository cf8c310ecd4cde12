#pragma once

#include <cmath>
#include <stdexcept>

namespace signallab::tsa {

namespace detail {

/// Continued fraction for the regularized incomplete beta, evaluated with
/// the modified Lentz method. Converges fast for x < (a+1)/(a+b+2).
inline double ibeta_cf(double a, double b, double x) {
    constexpr double eps = 1e-15;
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace detail

inline double lbeta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

/// Regularized incomplete beta I_x(a, b).
inline double ibeta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ibeta: shape parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = a * std::log(x) + b * std::log1p(-x) - lbeta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(ln_front) * detail::ibeta_cf(a, b, x) / a;
    return 1.0 - std::exp(ln_front) * detail::ibeta_cf(b, a, 1.0 - x) / b;
}

/// Student-t survival function P(T > t) with nu degrees of freedom.
inline double t_sf(double t, double nu) {
    if (nu <= 0.0) throw std::invalid_argument("t_sf: degrees of freedom must be positive");
    if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
    const double tail = 0.5 * ibeta(nu / 2.0, 0.5, nu / (nu + t * t));
    return t >= 0.0 ? tail : 1.0 - tail;
}

inline double t_two_sided_p(double t, double nu) {
    if (nu <= 0.0) throw std::invalid_argument("t_two_sided_p: degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    return ibeta(nu / 2.0, 0.5, nu / (nu + t * t));
}

/// F-distribution survival function P(F > f) with (d1, d2) degrees of freedom.
inline double f_sf(double f, double d1, double d2) {
    if (d1 <= 0.0 || d2 <= 0.0) throw std::invalid_argument("f_sf: degrees of freedom must be positive");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return ibeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

} // namespace signallab::tsa
