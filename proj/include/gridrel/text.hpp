#pragma once

#include <string>

namespace gridrel
{
    // Shortest decimal text that round-trips to the same double. Used for every
    // number written to CSV so reports are byte-stable across runs.
    std::string format_number(double value);
}
