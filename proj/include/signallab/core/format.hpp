#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace signallab {

/// Shortest %g rendering at the given significant-digit precision.
/// All report files use this so that reruns are byte-identical.
inline std::string format_num(double v, int digits = 6) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

} // namespace signallab
