#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace singarc {

/// Fixed 12-significant-digit text so repeated runs are byte-identical.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace singarc
