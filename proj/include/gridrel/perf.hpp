#pragma once

#include "gridrel/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace gridrel
{
    struct TooManyNodes : std::length_error
    {
        using std::length_error::length_error;
    };
    struct SingularSystem : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    // lambda / mu, dimensionless.
    double failure_to_repair_ratio(const FailureProfile &profile) noexcept;
    // mu / (lambda + mu): long-run probability the node is up.
    double steady_state_availability(const FailureProfile &profile) noexcept;
    // Band lookup; throws DomainError outside [0, 1].
    ReliabilityLevel classify_reliability(double availability);

    /// Off-diagonal generator entries stored row-wise with a fixed stride of
    /// one slot per node (slot i is the transition that flips node i), plus
    /// the diagonal.
    struct SparseGenerator
    {
        std::size_t size = 0;
        int stride = 0;
        std::vector<std::uint32_t> target;
        std::vector<double> rate;
        std::vector<double> diagonal;

        // Q(from, to) including the diagonal.
        double at(std::size_t from, std::size_t to) const;
        // Row-major dense copy; intended for small models.
        std::vector<double> dense() const;
    };

    /// System CTMC over all up/down subsets of the fleet. State k is the
    /// bitmask of up nodes (bit i = nodes[i] up), so the all-up state is
    /// 2^N - 1. Rates are per second; rewards are MIPS.
    struct MarkovRewardModel
    {
        int node_count = 0;
        std::vector<std::uint32_t> states;
        SparseGenerator generator;
        std::vector<double> rewards;
        std::vector<double> steady_state;

        std::size_t size() const noexcept { return states.size(); }
    };

    inline constexpr int kMaxCtmcNodes = 16;
    // Largest state space solved by dense elimination; bigger models use
    // Gauss-Seidel sweeps on the sparse generator.
    inline constexpr std::size_t kDenseSolveLimit = 1024;
    inline constexpr double kResidualTolerance = 1e-10;

    /// Independent two-state nodes composed by superposition: node i fails at
    /// lambda_i from any state where it is up and is repaired at mu_i where it is
    /// down. reward(state) = sum over up nodes of mips_i * (1 - degradation_i).
    /// Throws TooManyNodes if nodes.size() > cap, DomainError if empty.
    MarkovRewardModel build_system_ctmc(std::span<const GridNode> nodes, int cap = kMaxCtmcNodes);
    // Single-threaded reference for the OpenMP construction above.
    MarkovRewardModel build_system_ctmc_serial(std::span<const GridNode> nodes, int cap = kMaxCtmcNodes);

    // ||pi Q||_inf.
    double residual_inf_norm(const SparseGenerator &q, std::span<const double> pi);
    double residual_inf_norm_serial(const SparseGenerator &q, std::span<const double> pi);

    /// Solves pi Q = 0, sum(pi) = 1, stores pi in model.steady_state and
    /// returns it. Throws SingularSystem if elimination degenerates or the
    /// residual bound kResidualTolerance is not met.
    std::vector<double> solve_steady_state(MarkovRewardModel &model);

    // sum_i pi_i r_i. Throws std::logic_error if steady_state is not populated.
    double expected_reward_rate(const MarkovRewardModel &model);

    struct SelectionRow
    {
        int node_id = 0;
        double mips = 0.0;
        double lambda_per_hour = 0.0;
        double mu_per_hour = 0.0;
        double failure_to_repair_ratio = 0.0;
        double availability = 0.0;
        ReliabilityLevel level = ReliabilityLevel::Poor;
        double expected_reward_rate_mips = 0.0;
    };

    struct SelectionReport
    {
        std::vector<SelectionRow> rows;
        int performance_pick = -1; // argmax mips, lowest id on ties
        int reliability_pick = -1; // argmin failure-to-repair ratio, lowest id on ties
    };

    SelectionReport selection_report(std::span<const GridNode> nodes);

    inline constexpr std::string_view kSelectionCsvHeader =
        "node_id,mips,lambda_per_hour,mu_per_hour,failure_to_repair_ratio,availability,reliability_level,"
        "expected_reward_rate_mips";

    void write_selection_csv(std::ostream &os, const SelectionReport &report);
}
