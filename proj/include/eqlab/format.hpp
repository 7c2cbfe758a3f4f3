#pragma once

#include <cstdio>
#include <string>

namespace eqlab {

// 17 significant digits: enough for an exact round trip of any double.
inline std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace eqlab
