#include "gridrel/failure.hpp"

#include <algorithm>
#include <limits>

namespace gridrel
{
    double sample_time_to_failure(const FailureProfile &profile, RngStream &rng)
    {
        return rng.exponential(profile.lambda_per_sec());
    }

    double sample_time_to_repair(const FailureProfile &profile, RngStream &rng)
    {
        return rng.exponential(profile.mu_per_sec());
    }

    NodeStats record_attempt(NodeStats stats, Outcome outcome) noexcept
    {
        ++stats.attempts;
        if (outcome == Outcome::Success)
            ++stats.successes;
        return stats;
    }

    NodeLifecycle start_lifecycle(int node_id, const FailureProfile &profile, double clock, RngStream &fail_rng)
    {
        return NodeLifecycle{node_id, true, clock + sample_time_to_failure(profile, fail_rng)};
    }

    void advance_lifecycle(NodeLifecycle &life, const FailureProfile &profile, RngStream &fail_rng,
                           RngStream &repair_rng)
    {
        const double now = life.next_transition_time;
        life.up = !life.up;
        life.next_transition_time =
            now + (life.up ? sample_time_to_failure(profile, fail_rng) : sample_time_to_repair(profile, repair_rng));
    }

    UptimeSample simulate_uptime(const UptimeRequest &req)
    {
        RngStream fail_rng(req.seed, stream_id(req.node_id, StreamPurpose::Failure));
        RngStream repair_rng(req.seed, stream_id(req.node_id, StreamPurpose::Repair));

        UptimeSample out;
        out.horizon_s = req.horizon_s;

        const double horizon = req.horizon_s;
        const bool restarts = req.restart_interval_s > 0.0;
        double next_restart = restarts ? req.restart_interval_s : std::numeric_limits<double>::infinity();

        double t = 0.0;
        auto life = start_lifecycle(req.node_id, req.profile, t, fail_rng);
        while (t < horizon)
        {
            if (next_restart < std::min(life.next_transition_time, horizon))
            {
                if (life.up)
                    out.up_time_s += next_restart - t;
                t = next_restart;
                next_restart += req.restart_interval_s;
                life.next_transition_time =
                    t + (life.up ? sample_time_to_failure(req.profile, fail_rng)
                                 : sample_time_to_repair(req.profile, repair_rng));
                continue;
            }
            const double seg_end = std::min(life.next_transition_time, horizon);
            if (life.up)
                out.up_time_s += seg_end - t;
            t = seg_end;
            if (t >= horizon)
                break;
            if (life.up)
                ++out.failures;
            else
                ++out.repairs;
            advance_lifecycle(life, req.profile, fail_rng, repair_rng);
        }
        out.ended_up = life.up;
        return out;
    }

    std::vector<UptimeSample> simulate_uptime_batch(std::span<const UptimeRequest> requests)
    {
        std::vector<UptimeSample> out(requests.size());
        const auto n = static_cast<std::int64_t>(requests.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = simulate_uptime(requests[static_cast<std::size_t>(i)]);
        return out;
    }

    std::vector<UptimeSample> simulate_uptime_batch_serial(std::span<const UptimeRequest> requests)
    {
        std::vector<UptimeSample> out;
        out.reserve(requests.size());
        for (const auto &r : requests)
            out.push_back(simulate_uptime(r));
        return out;
    }
}
