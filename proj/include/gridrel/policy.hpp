#pragma once

#include "gridrel/model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gridrel
{
    /// Empirical per-node task outcome counters. Updated only by the
    /// simulator (single writer); policies read snapshots.
    struct NodeStats
    {
        int node_id = 0;
        std::uint64_t attempts = 0;
        std::uint64_t successes = 0;

        friend bool operator==(const NodeStats &, const NodeStats &) = default;
    };

    // Raw: successes/attempts, 1.0 for an unprobed node.
    // Smoothed: (successes + 1) / (attempts + 2).
    double success_rate(const NodeStats &stats, SuccessRateMode mode) noexcept;
    double failure_rate(const NodeStats &stats, SuccessRateMode mode) noexcept;

    /// A ranking candidate: the node description plus its stats snapshot.
    struct NodeView
    {
        GridNode node;
        NodeStats stats;
    };

    inline constexpr double kDefaultEpsilon = 1e-9;

    // All rankings return a permutation of the candidate ids; the head is the
    // selected node. Each throws EmptyNodeSet on an empty candidate list.

    /// Highest success rate first. Nodes whose rate is within `epsilon` of the
    /// best remaining rate count as tied and are ordered by estimated execution
    /// time, then id. The order is built by repeated head selection, which
    /// keeps it total even though "within epsilon" is not transitive.
    std::vector<int> rank_reliability_first(std::span<const NodeView> nodes, double task_length_mi,
                                            SuccessRateMode mode = SuccessRateMode::Smoothed,
                                            double epsilon = kDefaultEpsilon);

    // Estimated execution time ascending, then id.
    std::vector<int> rank_min_time(std::span<const NodeView> nodes, double task_length_mi);

    // Total estimated cost (cost_per_sec x exec time) ascending, then mips
    // descending, then id.
    std::vector<int> rank_cost_aware(std::span<const NodeView> nodes, double task_length_mi);

    struct RankingOptions
    {
        SuccessRateMode mode = SuccessRateMode::Smoothed;
        double epsilon = kDefaultEpsilon;
    };

    std::vector<int> rank(PolicyId policy, std::span<const NodeView> nodes, double task_length_mi,
                          const RankingOptions &opts = {});

    /// Ids of the nodes whose predicted availability classifies at or above
    /// qos.min_level. `predicted_availability[i]` belongs to `nodes[i]`.
    /// Throws DomainError if the spans differ in length or a value is outside [0,1].
    std::vector<int> filter_by_qos(std::span<const GridNode> nodes, const QosRequirement &qos,
                                   std::span<const double> predicted_availability);
}
