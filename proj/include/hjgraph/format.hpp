#pragma once

#include <cstdio>
#include <string>

namespace hjgraph {

/// Round-trippable decimal: 17 significant digits, '.' separator.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace hjgraph
