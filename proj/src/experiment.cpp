#include "gridrel/experiment.hpp"

#include <algorithm>
#include <exception>
#include <set>

namespace gridrel
{
    void validate_experiment(const ExperimentSpec &spec)
    {
        if (spec.replications < 1)
            throw std::invalid_argument("replications must be >= 1");
        if (spec.policies.empty())
            throw std::invalid_argument("at least one policy is required");
        std::set<PolicyId> seen;
        for (auto p : spec.policies)
            if (!seen.insert(p).second)
                throw std::invalid_argument("policy listed twice: " + std::string(to_string(p)));
    }

    Scenario scenario_for_run(const Scenario &base, PolicyId policy, std::uint64_t seed)
    {
        Scenario s = base;
        s.policy = policy;
        s.seed = seed;
        return s;
    }

    std::optional<double> fleet_expected_reward_rate(std::span<const GridNode> nodes)
    {
        if (nodes.empty() || nodes.size() > static_cast<std::size_t>(kMaxCtmcNodes))
            return std::nullopt;
        auto model = build_system_ctmc(nodes);
        solve_steady_state(model);
        return expected_reward_rate(model);
    }

    namespace
    {
        std::vector<ReplicationResult> plan(const ExperimentSpec &spec)
        {
            std::vector<ReplicationResult> runs;
            for (auto p : spec.policies)
                for (int k = 0; k < spec.replications; ++k)
                    runs.push_back(ReplicationResult{p, k, replication_seed(spec.base_seed, k), {}});
            return runs;
        }

        void execute(const Scenario &base, ReplicationResult &r)
        {
            r.metrics = run(scenario_for_run(base, r.policy, r.seed));
        }

        ExperimentResults summarise(const ExperimentSpec &spec, std::vector<ReplicationResult> runs)
        {
            ExperimentResults out;
            const std::size_t node_count = spec.scenario.nodes.size();
            for (auto p : spec.policies)
            {
                PolicyAggregate agg;
                agg.policy = p;
                agg.nodes.resize(node_count);
                for (std::size_t i = 0; i < node_count; ++i)
                {
                    agg.nodes[i].node_id = static_cast<int>(i);
                    agg.nodes[i].observed_availability = 0.0;
                }
                double sum = 0.0;
                for (const auto &r : runs)
                {
                    if (r.policy != p)
                        continue;
                    ++agg.replications;
                    agg.total_task_failures += r.metrics.total_task_failures;
                    for (const auto &j : r.metrics.jobs)
                    {
                        ++agg.jobs_total;
                        if (!j.makespan_s)
                            continue;
                        ++agg.jobs_completed;
                        const double m = *j.makespan_s;
                        sum += m;
                        agg.min_makespan_s = agg.min_makespan_s ? std::min(*agg.min_makespan_s, m) : m;
                        agg.max_makespan_s = agg.max_makespan_s ? std::max(*agg.max_makespan_s, m) : m;
                    }
                    for (const auto &n : r.metrics.nodes)
                    {
                        auto &a = agg.nodes[static_cast<std::size_t>(n.node_id)];
                        a.attempts += n.attempts;
                        a.successes += n.successes;
                        a.observed_availability += n.observed_availability;
                    }
                }
                if (agg.jobs_completed > 0)
                    agg.mean_makespan_s = sum / static_cast<double>(agg.jobs_completed);
                for (auto &a : agg.nodes)
                {
                    a.raw_success_rate = a.attempts == 0 ? 1.0
                                                         : static_cast<double>(a.successes) /
                                                               static_cast<double>(a.attempts);
                    if (agg.replications > 0)
                        a.observed_availability /= agg.replications;
                }
                out.aggregates.push_back(std::move(agg));
            }
            out.runs = std::move(runs);
            out.selection = selection_report(spec.scenario.nodes);
            out.system_expected_reward_rate_mips = fleet_expected_reward_rate(spec.scenario.nodes);
            return out;
        }
    }

    ExperimentResults run_experiment(const ExperimentSpec &spec)
    {
        validate_experiment(spec);
        auto runs = plan(spec);
        std::vector<std::exception_ptr> errors(runs.size());
        const auto n = static_cast<std::int64_t>(runs.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < n; ++i)
        {
            const auto k = static_cast<std::size_t>(i);
            try
            {
                execute(spec.scenario, runs[k]);
            }
            catch (...)
            {
                errors[k] = std::current_exception();
            }
        }
        for (const auto &e : errors)
            if (e)
                std::rethrow_exception(e);
        return summarise(spec, std::move(runs));
    }

    ExperimentResults run_experiment_serial(const ExperimentSpec &spec)
    {
        validate_experiment(spec);
        auto runs = plan(spec);
        for (auto &r : runs)
            execute(spec.scenario, r);
        return summarise(spec, std::move(runs));
    }
}
