#pragma once

#include "gridrel/model.hpp"
#include "gridrel/policy.hpp"
#include "gridrel/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gridrel
{
    // Exponential holding times, in seconds. Rates come from the profile's
    // per-hour values. Time to failure is +inf when lambda == 0.
    double sample_time_to_failure(const FailureProfile &profile, RngStream &rng);
    double sample_time_to_repair(const FailureProfile &profile, RngStream &rng);

    enum class Outcome : std::uint8_t
    {
        Success,
        Failure,
    };

    NodeStats record_attempt(NodeStats stats, Outcome outcome) noexcept;

    /// Up/down state of one node. Failure and repair events strictly alternate.
    struct NodeLifecycle
    {
        int node_id = 0;
        bool up = true;
        double next_transition_time = 0.0;
    };

    // Node starts up at `clock`; its first failure is drawn from `fail_rng`.
    NodeLifecycle start_lifecycle(int node_id, const FailureProfile &profile, double clock, RngStream &fail_rng);

    // Performs the pending transition and draws the next holding time.
    void advance_lifecycle(NodeLifecycle &life, const FailureProfile &profile, RngStream &fail_rng,
                           RngStream &repair_rng);

    /// Input for a long-run uptime simulation of a single node.
    struct UptimeRequest
    {
        FailureProfile profile{};
        std::uint64_t seed = 0;
        int node_id = 0;
        double horizon_s = 0.0;
        // When > 0, the residual holding time is discarded and redrawn every
        // restart_interval_s seconds. Memorylessness means this must not bias
        // the long-run availability.
        double restart_interval_s = 0.0;
    };

    struct UptimeSample
    {
        double up_time_s = 0.0;
        double horizon_s = 0.0;
        std::uint64_t failures = 0;
        std::uint64_t repairs = 0;
        // Alternation: failures - repairs is 0 (ended up) or 1 (ended down).
        bool ended_up = true;

        double availability() const noexcept { return horizon_s > 0.0 ? up_time_s / horizon_s : 1.0; }
    };

    UptimeSample simulate_uptime(const UptimeRequest &request);

    // Parallel (OpenMP) and serial batch drivers; results are identical since
    // every request owns its streams.
    std::vector<UptimeSample> simulate_uptime_batch(std::span<const UptimeRequest> requests);
    std::vector<UptimeSample> simulate_uptime_batch_serial(std::span<const UptimeRequest> requests);
}
