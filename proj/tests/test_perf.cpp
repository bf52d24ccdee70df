#include "gridrel/perf.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <random>
#include <sstream>

using namespace gridrel;
using gridrel::testing::make_node;

namespace
{
    std::vector<GridNode> random_fleet(std::mt19937_64 &gen, int n)
    {
        std::uniform_real_distribution<double> rate(0.01, 10.0), mips(50.0, 1000.0), deg(0.0, 0.5);
        std::vector<GridNode> out;
        for (int i = 0; i < n; ++i)
            out.push_back(make_node(i, mips(gen), rate(gen), rate(gen), 0.0, deg(gen)));
        return out;
    }

    // pi(state) = prod_i (A_i if up else 1 - A_i).
    std::vector<double> product_form(const std::vector<GridNode> &nodes)
    {
        const std::size_t n = std::size_t{1} << nodes.size();
        std::vector<double> pi(n, 1.0);
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t i = 0; i < nodes.size(); ++i)
            {
                const double a = steady_state_availability(nodes[i].failure);
                pi[s] *= (s >> i & 1) ? a : 1.0 - a;
            }
        return pi;
    }
}

TEST(FailureToRepairRatio, Examples)
{
    EXPECT_DOUBLE_EQ(failure_to_repair_ratio({0.1, 1.0, 0.0}), 0.1);
    EXPECT_DOUBLE_EQ(failure_to_repair_ratio({0.0, 3.0, 0.0}), 0.0);
}

TEST(FailureToRepairRatio, RankingMatchesIndependentRecompute)
{
    std::mt19937_64 gen(8);
    auto fleet = random_fleet(gen, 8);
    std::vector<int> by_ratio(8), by_recompute(8);
    for (int i = 0; i < 8; ++i)
        by_ratio[i] = by_recompute[i] = i;
    std::sort(by_ratio.begin(), by_ratio.end(),
              [&](int a, int b) { return failure_to_repair_ratio(fleet[a].failure) < failure_to_repair_ratio(fleet[b].failure); });
    std::sort(by_recompute.begin(), by_recompute.end(),
              [&](int a, int b)
              {
                  // Cross-multiplied to avoid sharing the division path.
                  return fleet[a].failure.lambda_per_hour * fleet[b].failure.mu_per_hour <
                         fleet[b].failure.lambda_per_hour * fleet[a].failure.mu_per_hour;
              });
    EXPECT_EQ(by_ratio, by_recompute);
}

TEST(SteadyStateAvailability, Examples)
{
    EXPECT_DOUBLE_EQ(steady_state_availability({0.0, 2.0, 0.0}), 1.0);
    EXPECT_DOUBLE_EQ(steady_state_availability({1.5, 1.5, 0.0}), 0.5);
    EXPECT_NEAR(steady_state_availability({0.1, 0.9, 0.0}), 0.9, 1e-15);
}

TEST(SteadyStateAvailability, TimesOnePlusRatioIsOne)
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> rate(0.0, 100.0);
    for (int i = 0; i < 10000; ++i)
    {
        const FailureProfile p{rate(gen), rate(gen) + 1e-6, 0.0};
        EXPECT_NEAR(steady_state_availability(p) * (1.0 + failure_to_repair_ratio(p)), 1.0, 1e-12);
    }
}

TEST(ClassifyReliability, Examples)
{
    EXPECT_EQ(classify_reliability(0.95), ReliabilityLevel::High);
    EXPECT_EQ(classify_reliability(0.80), ReliabilityLevel::Good);
    EXPECT_EQ(classify_reliability(0.59), ReliabilityLevel::Poor);
    EXPECT_EQ(classify_reliability(0.90), ReliabilityLevel::High);
    EXPECT_EQ(classify_reliability(1.0), ReliabilityLevel::High);
    EXPECT_EQ(classify_reliability(0.0), ReliabilityLevel::Poor);
    EXPECT_EQ(classify_reliability(0.60), ReliabilityLevel::Low);
    EXPECT_EQ(classify_reliability(0.70), ReliabilityLevel::Medium);
    EXPECT_EQ(classify_reliability(0.6999999), ReliabilityLevel::Low);
}

TEST(ClassifyReliability, OutsideUnitIntervalThrows)
{
    EXPECT_THROW(classify_reliability(-0.01), DomainError);
    EXPECT_THROW(classify_reliability(1.0001), DomainError);
    EXPECT_THROW(classify_reliability(std::nan("")), DomainError);
}

TEST(ClassifyReliability, TotalAndMonotone)
{
    ReliabilityLevel prev = ReliabilityLevel::Poor;
    for (int i = 0; i <= 100000; ++i)
    {
        const double a = i / 100000.0;
        const auto level = classify_reliability(a);
        EXPECT_GE(level, prev);
        EXPECT_GE(a, band_lower_bound(level));
        prev = level;
    }
}

TEST(BuildSystemCtmc, SingleNode)
{
    const std::vector<GridNode> fleet{make_node(0, 100.0, 0.5, 2.0)};
    const auto m = build_system_ctmc(fleet);
    ASSERT_EQ(m.size(), 2u);
    const double l = 0.5 / 3600.0, u = 2.0 / 3600.0;
    // State 1 = up, state 0 = down.
    EXPECT_DOUBLE_EQ(m.generator.at(1, 1), -l);
    EXPECT_DOUBLE_EQ(m.generator.at(1, 0), l);
    EXPECT_DOUBLE_EQ(m.generator.at(0, 1), u);
    EXPECT_DOUBLE_EQ(m.generator.at(0, 0), -u);
    EXPECT_DOUBLE_EQ(m.rewards[1], 100.0);
    EXPECT_DOUBLE_EQ(m.rewards[0], 0.0);
}

TEST(BuildSystemCtmc, TwoIdenticalNodesAllUpOutflow)
{
    const std::vector<GridNode> fleet{make_node(0, 100.0, 0.3, 2.0), make_node(1, 100.0, 0.3, 2.0)};
    const auto m = build_system_ctmc(fleet);
    ASSERT_EQ(m.size(), 4u);
    EXPECT_DOUBLE_EQ(m.generator.at(3, 3), -2.0 * 0.3 / 3600.0);
}

TEST(BuildSystemCtmc, MatchesBruteForceEnumeration)
{
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto fleet = random_fleet(gen, 3);
        const auto m = build_system_ctmc(fleet);
        const auto dense = m.generator.dense();
        const std::size_t n = 8;
        for (std::size_t s = 0; s < n; ++s)
        {
            double row = 0.0;
            double expected_reward = 0.0;
            for (std::size_t t = 0; t < n; ++t)
            {
                double expected = 0.0;
                const auto diff = s ^ t;
                if (std::popcount(diff) == 1)
                {
                    const auto i = static_cast<std::size_t>(std::countr_zero(diff));
                    expected = (s & diff) ? fleet[i].failure.lambda_per_hour / 3600.0
                                          : fleet[i].failure.mu_per_hour / 3600.0;
                }
                if (s != t)
                {
                    EXPECT_DOUBLE_EQ(dense[s * n + t], expected);
                    EXPECT_GE(dense[s * n + t], 0.0);
                }
                row += dense[s * n + t];
            }
            EXPECT_NEAR(row, 0.0, 1e-15);
            for (std::size_t i = 0; i < 3; ++i)
                if (s >> i & 1)
                    expected_reward += fleet[i].mips * (1.0 - fleet[i].failure.degradation);
            EXPECT_NEAR(m.rewards[s], expected_reward, 1e-9);
        }
    }
}

TEST(BuildSystemCtmc, CapEnforced)
{
    std::mt19937_64 gen(1);
    EXPECT_THROW(build_system_ctmc(random_fleet(gen, 17)), TooManyNodes);
    EXPECT_THROW(build_system_ctmc(random_fleet(gen, 5), 4), TooManyNodes);
    EXPECT_THROW(build_system_ctmc(std::vector<GridNode>{}), DomainError);
    EXPECT_THROW(build_system_ctmc(random_fleet(gen, 2), 17), std::invalid_argument);
}

TEST(SolveSteadyState, SingleNodeAnalytic)
{
    const std::vector<GridNode> fleet{make_node(0, 100.0, 0.4, 1.6)};
    auto m = build_system_ctmc(fleet);
    const auto pi = solve_steady_state(m);
    EXPECT_NEAR(pi[1], 1.6 / 2.0, 1e-12);
    EXPECT_NEAR(pi[0], 0.4 / 2.0, 1e-12);
    EXPECT_EQ(m.steady_state, pi);
}

TEST(SolveSteadyState, ProductFormForSmallFleets)
{
    std::mt19937_64 gen(4);
    for (int n = 1; n <= 4; ++n)
        for (int trial = 0; trial < 10; ++trial)
        {
            const auto fleet = random_fleet(gen, n);
            auto m = build_system_ctmc(fleet);
            const auto pi = solve_steady_state(m);
            const auto oracle = product_form(fleet);
            for (std::size_t s = 0; s < pi.size(); ++s)
                EXPECT_NEAR(pi[s], oracle[s], 1e-9);
            EXPECT_LT(residual_inf_norm(m.generator, pi), kResidualTolerance);
        }
}

TEST(SolveSteadyState, IterativePathForLargeFleets)
{
    std::mt19937_64 gen(12);
    const auto fleet = random_fleet(gen, 12); // 4096 states, above the dense limit
    auto m = build_system_ctmc(fleet);
    ASSERT_GT(m.size(), kDenseSolveLimit);
    const auto pi = solve_steady_state(m);
    const auto oracle = product_form(fleet);
    for (std::size_t s = 0; s < pi.size(); ++s)
        ASSERT_NEAR(pi[s], oracle[s], 1e-9);
    EXPECT_LT(residual_inf_norm(m.generator, pi), kResidualTolerance);
}

TEST(SolveSteadyState, NoFailuresConcentratesOnAllUp)
{
    for (int n : {1, 3, 11})
    {
        std::vector<GridNode> fleet;
        for (int i = 0; i < n; ++i)
            fleet.push_back(make_node(i, 10.0, 0.0, 1.0));
        auto m = build_system_ctmc(fleet);
        const auto pi = solve_steady_state(m);
        EXPECT_NEAR(pi.back(), 1.0, 1e-12);
        EXPECT_NEAR(expected_reward_rate(m), 10.0 * n, 1e-9);
    }
}

TEST(SolveSteadyState, ProbabilitiesAreValid)
{
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 20; ++trial)
    {
        auto m = build_system_ctmc(random_fleet(gen, 1 + trial % 6));
        const auto pi = solve_steady_state(m);
        double sum = 0.0;
        for (double v : pi)
        {
            EXPECT_GE(v, 0.0);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(ExpectedRewardRate, SingleNode)
{
    const std::vector<GridNode> fleet{make_node(0, 100.0, 0.1, 0.9)};
    auto m = build_system_ctmc(fleet);
    solve_steady_state(m);
    EXPECT_NEAR(expected_reward_rate(m), 90.0, 1e-9);
}

TEST(ExpectedRewardRate, ConstantRewardIsReturnedAsIs)
{
    std::mt19937_64 gen(2);
    auto m = build_system_ctmc(random_fleet(gen, 3));
    solve_steady_state(m);
    std::fill(m.rewards.begin(), m.rewards.end(), 42.5);
    EXPECT_NEAR(expected_reward_rate(m), 42.5, 1e-12);
}

TEST(ExpectedRewardRate, AdditiveUnderProductForm)
{
    std::mt19937_64 gen(6);
    for (int n = 1; n <= 4; ++n)
    {
        const auto fleet = random_fleet(gen, n);
        auto m = build_system_ctmc(fleet);
        solve_steady_state(m);
        double expected = 0.0;
        for (const auto &node : fleet)
            expected += steady_state_availability(node.failure) * node.mips * (1.0 - node.failure.degradation);
        EXPECT_NEAR(expected_reward_rate(m), expected, 1e-9);
    }
}

TEST(ExpectedRewardRate, RequiresSolvedModel)
{
    std::mt19937_64 gen(2);
    const auto m = build_system_ctmc(random_fleet(gen, 2));
    EXPECT_THROW(expected_reward_rate(m), std::logic_error);
}

TEST(SelectionReport, PicksAndRowOrder)
{
    std::vector<GridNode> fleet{make_node(3, 500.0, 0.2, 1.0), make_node(1, 900.0, 0.5, 1.0),
                                make_node(2, 300.0, 0.01, 1.0)};
    const auto rep = selection_report(fleet);
    ASSERT_EQ(rep.rows.size(), 3u);
    EXPECT_EQ(rep.rows[0].node_id, 1);
    EXPECT_EQ(rep.rows[2].node_id, 3);
    EXPECT_EQ(rep.performance_pick, 1);
    EXPECT_EQ(rep.reliability_pick, 2);
}

TEST(SelectionReport, SingleNodeAndTies)
{
    const auto single = selection_report(std::vector<GridNode>{make_node(0, 10.0, 1.0, 1.0)});
    EXPECT_EQ(single.performance_pick, 0);
    EXPECT_EQ(single.reliability_pick, 0);

    const auto tied = selection_report(
        std::vector<GridNode>{make_node(4, 200.0, 0.1, 1.0), make_node(2, 200.0, 0.1, 1.0)});
    EXPECT_EQ(tied.performance_pick, 2);
    EXPECT_EQ(tied.reliability_pick, 2);
    EXPECT_THROW(selection_report(std::vector<GridNode>{}), DomainError);
}

TEST(SelectionReport, CsvHeaderAndRow)
{
    const auto rep = selection_report(std::vector<GridNode>{make_node(0, 100.0, 0.1, 0.9, 0.0, 0.5)});
    std::ostringstream os;
    write_selection_csv(os, rep);
    EXPECT_EQ(os.str(), "node_id,mips,lambda_per_hour,mu_per_hour,failure_to_repair_ratio,availability,"
                        "reliability_level,expected_reward_rate_mips\n"
                        "0,100,0.1,0.9,0.11111111111111112,0.9,high,45\n");
}
