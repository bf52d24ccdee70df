#pragma once

#include "gridrel/model.hpp"
#include "gridrel/perf.hpp"
#include "gridrel/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace gridrel
{
    /// N-policy comparison over a shared scenario. Replication k of every
    /// policy runs with seed base_seed + k, so arms see the same failure draws.
    struct ExperimentSpec
    {
        Scenario scenario;
        std::vector<PolicyId> policies;
        int replications = 1;
        std::uint64_t base_seed = 0;
    };

    // Throws std::invalid_argument on replications < 1 or empty/duplicate policies.
    void validate_experiment(const ExperimentSpec &spec);

    constexpr std::uint64_t replication_seed(std::uint64_t base_seed, int replication) noexcept
    {
        return base_seed + static_cast<std::uint64_t>(replication);
    }

    struct ReplicationResult
    {
        PolicyId policy = PolicyId::ReliabilityFirst;
        int replication = 0;
        std::uint64_t seed = 0;
        Metrics metrics;
    };

    struct NodeAggregate
    {
        int node_id = 0;
        std::uint64_t attempts = 0;
        std::uint64_t successes = 0;
        double raw_success_rate = 1.0;
        double observed_availability = 1.0; // mean over replications
    };

    struct PolicyAggregate
    {
        PolicyId policy = PolicyId::ReliabilityFirst;
        int replications = 0;
        std::size_t jobs_total = 0;
        std::size_t jobs_completed = 0;
        // Over every completed job of every replication.
        std::optional<double> mean_makespan_s;
        std::optional<double> min_makespan_s;
        std::optional<double> max_makespan_s;
        std::uint64_t total_task_failures = 0;
        std::vector<NodeAggregate> nodes;
    };

    struct ExperimentResults
    {
        // Policy-major, then replication order.
        std::vector<ReplicationResult> runs;
        std::vector<PolicyAggregate> aggregates;
        SelectionReport selection;
        // Exact CTMC expected reward rate of the whole fleet, when it fits the cap.
        std::optional<double> system_expected_reward_rate_mips;
    };

    // Replications run concurrently under OpenMP; results are merged in
    // (policy, replication) order and match run_experiment_serial exactly.
    ExperimentResults run_experiment(const ExperimentSpec &spec);
    ExperimentResults run_experiment_serial(const ExperimentSpec &spec);

    Scenario scenario_for_run(const Scenario &base, PolicyId policy, std::uint64_t seed);

    // Exact system reward rate via the CTMC when nodes.size() <= kMaxCtmcNodes.
    std::optional<double> fleet_expected_reward_rate(std::span<const GridNode> nodes);
}
