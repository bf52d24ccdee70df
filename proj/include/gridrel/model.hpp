#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gridrel
{
    // Error types shared across modules. Each maps onto one failure class
    // named in the public contracts (empty candidate set, bad domain, ...).
    struct EmptyNodeSet : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };
    struct DomainError : std::domain_error
    {
        using std::domain_error::domain_error;
    };

    inline constexpr double kSecondsPerHour = 3600.0;

    /// Exponential failure/repair profile of a node. Rates are per hour as
    /// given in scenario files; the simulator works in seconds.
    struct FailureProfile
    {
        double lambda_per_hour = 0.0;
        double mu_per_hour = 1.0;
        double degradation = 0.0;

        double lambda_per_sec() const noexcept { return lambda_per_hour / kSecondsPerHour; }
        double mu_per_sec() const noexcept { return mu_per_hour / kSecondsPerHour; }

        friend bool operator==(const FailureProfile &, const FailureProfile &) = default;
    };

    struct GridNode
    {
        int id = 0;
        double mips = 1.0;
        double cost_per_sec = 0.0;
        FailureProfile failure{};

        friend bool operator==(const GridNode &, const GridNode &) = default;
    };

    enum class TaskState : std::uint8_t
    {
        Pending,
        Running,
        Completed,
        Failed,
    };

    /// One grid thread. State changes go through the member functions so the
    /// Pending -> Running -> {Completed, Failed}, Failed -> Pending machine
    /// cannot be bypassed; illegal transitions throw std::logic_error.
    struct Task
    {
        int id = 0;
        int job_id = 0;
        double length_mi = 1.0;
        TaskState state = TaskState::Pending;
        int attempts = 0;

        void start();
        void complete();
        void fail();
        void requeue();
        // Whole-job restart (SPMD): any state except Running goes back to Pending.
        void reset_for_restart();

        friend bool operator==(const Task &, const Task &) = default;
    };

    enum class AppModel : std::uint8_t
    {
        MasterWorker,
        Spmd,
    };

    // Ordered so that a larger enumerator is a stronger guarantee.
    enum class ReliabilityLevel : std::uint8_t
    {
        Poor = 0,
        Low = 1,
        Medium = 2,
        Good = 3,
        High = 4,
    };

    /// Lower availability bound (inclusive) of each band; the upper bound is
    /// the next band's lower bound, and High includes 1.0.
    double band_lower_bound(ReliabilityLevel level) noexcept;

    struct QosRequirement
    {
        std::optional<double> deadline_s;
        std::optional<ReliabilityLevel> min_level;
        int max_retries = 3;

        friend bool operator==(const QosRequirement &, const QosRequirement &) = default;
    };

    struct Job
    {
        int id = 0;
        double arrival_s = 0.0;
        std::vector<Task> tasks;
        AppModel app_model = AppModel::MasterWorker;
        QosRequirement qos{};

        bool completed() const noexcept;

        friend bool operator==(const Job &, const Job &) = default;
    };

    enum class PolicyId : std::uint8_t
    {
        ReliabilityFirst,
        MinTime,
        CostAware,
    };

    enum class SuccessRateMode : std::uint8_t
    {
        Smoothed,
        Raw,
    };

    struct Scenario
    {
        std::vector<GridNode> nodes;
        std::vector<Job> jobs;
        PolicyId policy = PolicyId::ReliabilityFirst;
        std::uint64_t seed = 0;
        double horizon_s = 1.0e6;
        double epsilon = 1e-9;
        SuccessRateMode success_rate_mode = SuccessRateMode::Smoothed;

        friend bool operator==(const Scenario &, const Scenario &) = default;
    };

    // Seconds to execute length_mi on a node of the given speed.
    double estimated_exec_time(double length_mi, double mips) noexcept;
    double estimated_exec_time(const Task &task, const GridNode &node) noexcept;

    /// Every violated scenario invariant, one human-readable line each.
    /// An empty result means the scenario is valid.
    std::vector<std::string> validate_scenario(const Scenario &scenario);

    // String forms used in scenario files and reports.
    std::string_view to_string(PolicyId id) noexcept;
    std::string_view to_string(ReliabilityLevel level) noexcept;
    std::string_view to_string(AppModel model) noexcept;
    std::string_view to_string(SuccessRateMode mode) noexcept;
    std::string_view to_string(TaskState state) noexcept;

    std::optional<PolicyId> parse_policy(std::string_view name) noexcept;
    std::optional<ReliabilityLevel> parse_reliability_level(std::string_view name) noexcept;
    std::optional<AppModel> parse_app_model(std::string_view name) noexcept;
    std::optional<SuccessRateMode> parse_success_rate_mode(std::string_view name) noexcept;

    inline constexpr PolicyId kAllPolicies[] = {PolicyId::ReliabilityFirst, PolicyId::MinTime, PolicyId::CostAware};
}
