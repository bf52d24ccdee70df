#include "gridrel/policy.hpp"

#include "gridrel/perf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gridrel
{
    double success_rate(const NodeStats &stats, SuccessRateMode mode) noexcept
    {
        const auto a = static_cast<double>(stats.attempts);
        const auto s = static_cast<double>(stats.successes);
        if (mode == SuccessRateMode::Smoothed)
            return (s + 1.0) / (a + 2.0);
        return stats.attempts == 0 ? 1.0 : s / a;
    }

    double failure_rate(const NodeStats &stats, SuccessRateMode mode) noexcept
    {
        return 1.0 - success_rate(stats, mode);
    }

    namespace
    {
        void require_nonempty(std::span<const NodeView> nodes)
        {
            if (nodes.empty())
                throw EmptyNodeSet("no candidate nodes to rank");
        }

        std::vector<int> ids_in_order(std::span<const NodeView> nodes, const std::vector<std::size_t> &order)
        {
            std::vector<int> out;
            out.reserve(order.size());
            for (auto i : order)
                out.push_back(nodes[i].node.id);
            return out;
        }
    }

    std::vector<int> rank_reliability_first(std::span<const NodeView> nodes, double task_length_mi,
                                            SuccessRateMode mode, double epsilon)
    {
        require_nonempty(nodes);
        const std::size_t n = nodes.size();
        std::vector<double> rate(n), time(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            rate[i] = success_rate(nodes[i].stats, mode);
            time[i] = estimated_exec_time(task_length_mi, nodes[i].node.mips);
        }

        std::vector<std::size_t> remaining(n);
        std::iota(remaining.begin(), remaining.end(), 0);
        std::vector<std::size_t> order;
        order.reserve(n);
        while (!remaining.empty())
        {
            double best_rate = rate[remaining.front()];
            for (auto i : remaining)
                best_rate = std::max(best_rate, rate[i]);

            auto head = remaining.end();
            for (auto it = remaining.begin(); it != remaining.end(); ++it)
            {
                const auto i = *it;
                if (best_rate - rate[i] > epsilon)
                    continue;
                if (head == remaining.end())
                {
                    head = it;
                    continue;
                }
                const auto h = *head;
                if (time[i] < time[h] || (time[i] == time[h] && nodes[i].node.id < nodes[h].node.id))
                    head = it;
            }
            order.push_back(*head);
            remaining.erase(head);
        }
        return ids_in_order(nodes, order);
    }

    std::vector<int> rank_min_time(std::span<const NodeView> nodes, double task_length_mi)
    {
        require_nonempty(nodes);
        std::vector<std::size_t> order(nodes.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b)
                  {
                      const double ta = estimated_exec_time(task_length_mi, nodes[a].node.mips);
                      const double tb = estimated_exec_time(task_length_mi, nodes[b].node.mips);
                      if (ta != tb)
                          return ta < tb;
                      return nodes[a].node.id < nodes[b].node.id;
                  });
        return ids_in_order(nodes, order);
    }

    std::vector<int> rank_cost_aware(std::span<const NodeView> nodes, double task_length_mi)
    {
        require_nonempty(nodes);
        auto cost = [&](std::size_t i)
        { return (nodes[i].node.cost_per_sec * task_length_mi) / nodes[i].node.mips; };

        std::vector<std::size_t> order(nodes.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b)
                  {
                      const double ca = cost(a), cb = cost(b);
                      if (ca != cb)
                          return ca < cb;
                      if (nodes[a].node.mips != nodes[b].node.mips)
                          return nodes[a].node.mips > nodes[b].node.mips;
                      return nodes[a].node.id < nodes[b].node.id;
                  });
        return ids_in_order(nodes, order);
    }

    std::vector<int> rank(PolicyId policy, std::span<const NodeView> nodes, double task_length_mi,
                          const RankingOptions &opts)
    {
        switch (policy)
        {
        case PolicyId::ReliabilityFirst:
            return rank_reliability_first(nodes, task_length_mi, opts.mode, opts.epsilon);
        case PolicyId::MinTime:
            return rank_min_time(nodes, task_length_mi);
        case PolicyId::CostAware:
            return rank_cost_aware(nodes, task_length_mi);
        }
        throw std::invalid_argument("unknown policy");
    }

    std::vector<int> filter_by_qos(std::span<const GridNode> nodes, const QosRequirement &qos,
                                   std::span<const double> predicted_availability)
    {
        if (nodes.size() != predicted_availability.size())
            throw DomainError("filter_by_qos: one availability value per node is required");
        std::vector<int> kept;
        kept.reserve(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            const auto level = classify_reliability(predicted_availability[i]);
            if (!qos.min_level || level >= *qos.min_level)
                kept.push_back(nodes[i].id);
        }
        return kept;
    }
}
