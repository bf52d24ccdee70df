#include "gridrel/text.hpp"

#include <charconv>
#include <cmath>

namespace gridrel
{
    std::string format_number(double value)
    {
        if (std::isnan(value))
            return "nan";
        if (std::isinf(value))
            return value > 0 ? "inf" : "-inf";
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
        return std::string(buf, end);
    }
}
