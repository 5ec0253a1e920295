#pragma once

#include <cstdio>
#include <string>

namespace roadcross {

// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double value)
{
    char buf[40];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value)
            return buf;
    }
    return buf;
}

} // namespace roadcross
