#include "gridrel/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace gridrel
{
    namespace
    {
        [[noreturn]] void bad_transition(const Task &t, std::string_view to)
        {
            std::ostringstream os;
            os << "task " << t.job_id << "/" << t.id << ": illegal transition " << to_string(t.state) << " -> " << to;
            throw std::logic_error(os.str());
        }
    }

    void Task::start()
    {
        if (state != TaskState::Pending)
            bad_transition(*this, "running");
        state = TaskState::Running;
        ++attempts;
    }

    void Task::complete()
    {
        if (state != TaskState::Running)
            bad_transition(*this, "completed");
        state = TaskState::Completed;
    }

    void Task::fail()
    {
        if (state != TaskState::Running)
            bad_transition(*this, "failed");
        state = TaskState::Failed;
    }

    void Task::requeue()
    {
        if (state != TaskState::Failed)
            bad_transition(*this, "pending");
        state = TaskState::Pending;
    }

    void Task::reset_for_restart()
    {
        if (state == TaskState::Running)
            bad_transition(*this, "pending (restart)");
        state = TaskState::Pending;
    }

    bool Job::completed() const noexcept
    {
        if (tasks.empty())
            return false;
        for (const auto &t : tasks)
            if (t.state != TaskState::Completed)
                return false;
        return true;
    }

    double band_lower_bound(ReliabilityLevel level) noexcept
    {
        switch (level)
        {
        case ReliabilityLevel::High:
            return 0.90;
        case ReliabilityLevel::Good:
            return 0.80;
        case ReliabilityLevel::Medium:
            return 0.70;
        case ReliabilityLevel::Low:
            return 0.60;
        case ReliabilityLevel::Poor:
            return 0.0;
        }
        return 0.0;
    }

    double estimated_exec_time(double length_mi, double mips) noexcept
    {
        return length_mi / mips;
    }

    double estimated_exec_time(const Task &task, const GridNode &node) noexcept
    {
        return estimated_exec_time(task.length_mi, node.mips);
    }

    std::vector<std::string> validate_scenario(const Scenario &s)
    {
        std::vector<std::string> out;
        auto add = [&out](auto &&...parts)
        {
            std::ostringstream os;
            (os << ... << parts);
            out.push_back(os.str());
        };

        if (s.nodes.empty())
            add("fleet is empty: at least one node is required");

        std::set<int> seen;
        for (const auto &n : s.nodes)
        {
            if (!seen.insert(n.id).second)
                add("duplicate node id ", n.id);
            if (!(n.mips > 0.0) || !std::isfinite(n.mips))
                add("node ", n.id, ": mips must be > 0");
            if (!(n.cost_per_sec >= 0.0) || !std::isfinite(n.cost_per_sec))
                add("node ", n.id, ": cost_per_sec must be >= 0");
            const auto &f = n.failure;
            if (!(f.lambda_per_hour >= 0.0) || !std::isfinite(f.lambda_per_hour))
                add("node ", n.id, ": lambda_per_hour must be >= 0");
            if (!(f.mu_per_hour > 0.0) || !std::isfinite(f.mu_per_hour))
                add("node ", n.id, ": mu_per_hour must be > 0");
            if (!(f.degradation >= 0.0 && f.degradation < 1.0))
                add("node ", n.id, ": degradation must be in [0, 1)");
        }
        if (!seen.empty() && (*seen.begin() != 0 || *seen.rbegin() != static_cast<int>(seen.size()) - 1))
            add("node ids must be contiguous from 0");

        if (s.jobs.empty())
            add("workload is empty: at least one job is required");

        std::set<int> job_ids;
        for (const auto &j : s.jobs)
        {
            if (!job_ids.insert(j.id).second)
                add("duplicate job id ", j.id);
            if (!(j.arrival_s >= 0.0) || !std::isfinite(j.arrival_s))
                add("job ", j.id, ": arrival_s must be >= 0");
            if (j.tasks.empty())
                add("job ", j.id, ": must contain at least one task");
            for (const auto &t : j.tasks)
            {
                if (!(t.length_mi > 0.0) || !std::isfinite(t.length_mi))
                    add("job ", j.id, " task ", t.id, ": length_mi must be > 0");
                if (t.job_id != j.id)
                    add("job ", j.id, " task ", t.id, ": job_id mismatch (", t.job_id, ")");
            }
            if (j.qos.deadline_s && !(*j.qos.deadline_s > 0.0))
                add("job ", j.id, ": deadline_s must be > 0");
            if (j.qos.max_retries < 0)
                add("job ", j.id, ": max_retries must be >= 0");
        }

        if (!(s.horizon_s > 0.0))
            add("horizon_s must be > 0");
        if (!(s.epsilon >= 0.0))
            add("epsilon must be >= 0");
        return out;
    }

    std::string_view to_string(PolicyId id) noexcept
    {
        switch (id)
        {
        case PolicyId::ReliabilityFirst:
            return "reliability_first";
        case PolicyId::MinTime:
            return "min_time";
        case PolicyId::CostAware:
            return "cost_aware";
        }
        return "?";
    }

    std::string_view to_string(ReliabilityLevel level) noexcept
    {
        switch (level)
        {
        case ReliabilityLevel::High:
            return "high";
        case ReliabilityLevel::Good:
            return "good";
        case ReliabilityLevel::Medium:
            return "medium";
        case ReliabilityLevel::Low:
            return "low";
        case ReliabilityLevel::Poor:
            return "poor";
        }
        return "?";
    }

    std::string_view to_string(AppModel model) noexcept
    {
        return model == AppModel::Spmd ? "spmd" : "master_worker";
    }

    std::string_view to_string(SuccessRateMode mode) noexcept
    {
        return mode == SuccessRateMode::Raw ? "raw" : "smoothed";
    }

    std::string_view to_string(TaskState state) noexcept
    {
        switch (state)
        {
        case TaskState::Pending:
            return "pending";
        case TaskState::Running:
            return "running";
        case TaskState::Completed:
            return "completed";
        case TaskState::Failed:
            return "failed";
        }
        return "?";
    }

    std::optional<PolicyId> parse_policy(std::string_view name) noexcept
    {
        for (auto p : kAllPolicies)
            if (to_string(p) == name)
                return p;
        return std::nullopt;
    }

    std::optional<ReliabilityLevel> parse_reliability_level(std::string_view name) noexcept
    {
        for (auto l : {ReliabilityLevel::High, ReliabilityLevel::Good, ReliabilityLevel::Medium, ReliabilityLevel::Low,
                       ReliabilityLevel::Poor})
            if (to_string(l) == name)
                return l;
        return std::nullopt;
    }

    std::optional<AppModel> parse_app_model(std::string_view name) noexcept
    {
        if (name == "master_worker")
            return AppModel::MasterWorker;
        if (name == "spmd")
            return AppModel::Spmd;
        return std::nullopt;
    }

    std::optional<SuccessRateMode> parse_success_rate_mode(std::string_view name) noexcept
    {
        if (name == "smoothed")
            return SuccessRateMode::Smoothed;
        if (name == "raw")
            return SuccessRateMode::Raw;
        return std::nullopt;
    }
}
