#pragma once

#include <cstdint>
#include <random>

namespace gridrel
{
    enum class StreamPurpose : std::uint8_t
    {
        Failure = 0,
        Repair = 1,
        Auxiliary = 2,
    };

    // Sub-stream identifier for a (node, purpose) pair.
    constexpr std::uint64_t stream_id(int node_id, StreamPurpose purpose) noexcept
    {
        return static_cast<std::uint64_t>(node_id) * 4u + static_cast<std::uint64_t>(purpose);
    }

    /// Seedable random stream keyed by (seed, stream_id).
    ///
    /// The engine is std::mt19937_64, whose output sequence is fixed by the
    /// standard. Its 64-bit seed is SplitMix64(seed) mixed with
    /// SplitMix64(stream_id), so distinct sub-streams start from unrelated
    /// states. Uniforms take the top 53 bits; exponentials use inversion rather
    /// than std::exponential_distribution, whose algorithm varies between
    /// standard libraries. Same (seed, stream_id, draw index) gives the same
    /// value on every conforming platform.
    class RngStream
    {
    public:
        RngStream(std::uint64_t seed, std::uint64_t stream);

        std::uint64_t seed() const noexcept { return seed_; }
        std::uint64_t stream() const noexcept { return stream_; }

        std::uint64_t next_u64() { return engine_(); }
        // Uniform on [0, 1).
        double uniform01();
        // Exp(rate) draw; +inf when rate == 0.
        double exponential(double rate);

    private:
        std::uint64_t seed_;
        std::uint64_t stream_;
        std::mt19937_64 engine_;
    };

    std::uint64_t splitmix64(std::uint64_t x) noexcept;
}
