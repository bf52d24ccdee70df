#include "gridrel/rng.hpp"

#include <cmath>
#include <limits>

namespace gridrel
{
    std::uint64_t splitmix64(std::uint64_t x) noexcept
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream), engine_(splitmix64(seed) ^ splitmix64(~stream * 0xd1b54a32d192ed03ULL))
    {
    }

    double RngStream::uniform01()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double RngStream::exponential(double rate)
    {
        if (rate <= 0.0)
            return std::numeric_limits<double>::infinity();
        return -std::log1p(-uniform01()) / rate;
    }
}
