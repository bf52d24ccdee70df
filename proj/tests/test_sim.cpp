#include "gridrel/failure.hpp"
#include "gridrel/sim.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace gridrel;
using gridrel::testing::make_job;
using gridrel::testing::make_node;
using gridrel::testing::make_scenario;

namespace
{
    Scenario random_scenario(std::mt19937_64 &gen, bool failures)
    {
        std::uniform_real_distribution<double> mips(50.0, 1000.0), len(100.0, 5000.0), arrival(0.0, 100.0);
        std::uniform_real_distribution<double> lambda(0.0, 2000.0), mu(500.0, 20000.0);
        const int n_nodes = 1 + static_cast<int>(gen() % 6);
        const int n_jobs = 1 + static_cast<int>(gen() % 5);
        std::vector<GridNode> nodes;
        for (int i = 0; i < n_nodes; ++i)
            nodes.push_back(make_node(i, mips(gen), failures ? lambda(gen) : 0.0, mu(gen), (gen() % 5) * 0.1));
        std::vector<Job> jobs;
        for (int j = 0; j < n_jobs; ++j)
        {
            std::vector<double> lengths(1 + gen() % 6);
            for (auto &l : lengths)
                l = len(gen);
            QosRequirement q;
            q.max_retries = static_cast<int>(gen() % 6);
            if (gen() % 3 == 0)
                q.deadline_s = 50.0;
            jobs.push_back(make_job(j, lengths, arrival(gen), gen() % 3 == 0 ? AppModel::Spmd : AppModel::MasterWorker, q));
        }
        auto s = make_scenario(nodes, jobs, kAllPolicies[gen() % 3], gen());
        s.horizon_s = 1.0e5;
        return s;
    }

    std::size_t dispatch_count(const EventLog &log, int job, int task)
    {
        return static_cast<std::size_t>(std::count_if(log.dispatches.begin(), log.dispatches.end(),
                                                       [&](const DispatchRecord &d)
                                                       { return d.job_id == job && d.task_id == task; }));
    }

    // Node 1 is fast but fails within ~0.1 s; node 0 is slow and never fails.
    Scenario flaky_pair(AppModel model, int max_retries)
    {
        QosRequirement q;
        q.max_retries = max_retries;
        return make_scenario({make_node(0, 100.0), make_node(1, 1000.0, 36000.0, 3600.0)},
                             {make_job(0, {1000.0, 1000.0}, 0.0, model, q)}, PolicyId::MinTime, 5);
    }
}

TEST(Run, SingleNodeRunsTasksSequentially)
{
    auto s = make_scenario({make_node(0, 500.0)}, {make_job(0, {1000, 1000, 1000, 1000})});
    const auto m = run(s);
    ASSERT_EQ(m.jobs.size(), 1u);
    EXPECT_EQ(m.jobs[0].outcome, JobOutcome::Completed);
    EXPECT_DOUBLE_EQ(*m.jobs[0].makespan_s, 8.0);
    EXPECT_DOUBLE_EQ(m.nodes[0].busy_time_s, 8.0);
}

TEST(Run, TwoIdenticalNodesSplitTheWork)
{
    auto s = make_scenario({make_node(0, 500.0), make_node(1, 500.0)}, {make_job(0, {1000, 1000, 1000, 1000})});
    const auto m = run(s);
    EXPECT_DOUBLE_EQ(*m.jobs[0].makespan_s, 4.0);
    EXPECT_EQ(m.nodes[0].successes, 2u);
    EXPECT_EQ(m.nodes[1].successes, 2u);
}

TEST(Run, SameScenarioSameMetrics)
{
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto s = random_scenario(gen, true);
        EventLog a, b;
        EXPECT_EQ(run(s, &a), run(s, &b));
        EXPECT_EQ(a.events, b.events);
        EXPECT_EQ(a.dispatches, b.dispatches);
    }
}

TEST(Run, HandEnumeratedTrace)
{
    // n0 = 500 MIPS, n1 = 250 MIPS, three 1000 MI tasks, min_time.
    //   t=0  arrival; task0 -> n0 (done t=2), task1 -> n1 (done t=4)
    //   t=2  task0 completes on n0; task2 -> n0 (done t=4)
    //   t=4  task1 completes on n1 (scheduled earlier, lower sequence)
    //   t=4  task2 completes on n0
    auto s = make_scenario({make_node(0, 500.0), make_node(1, 250.0)}, {make_job(0, {1000, 1000, 1000})});
    EventLog log;
    const auto m = run(s, &log);
    const std::vector<EventRecord> expected{
        {0.0, EventKind::JobArrival, -1, 0, -1},
        {2.0, EventKind::TaskComplete, 0, 0, 0},
        {4.0, EventKind::TaskComplete, 1, 0, 1},
        {4.0, EventKind::TaskComplete, 0, 0, 2},
    };
    EXPECT_EQ(log.events, expected);
    const std::vector<DispatchRecord> dispatches{
        {0.0, 0, 0, 0, 1, 1},
        {0.0, 1, 0, 1, 1, 1},
        {2.0, 0, 0, 2, 1, 2},
    };
    EXPECT_EQ(log.dispatches, dispatches);
    EXPECT_EQ(m.event_count, 4u);
    EXPECT_DOUBLE_EQ(*m.jobs[0].makespan_s, 4.0);

    std::ostringstream os;
    write_event_log(os, log);
    EXPECT_EQ(os.str(), "0\tjob_arrival\t-1\t0\t-1\n2\ttask_complete\t0\t0\t0\n"
                        "4\ttask_complete\t1\t0\t1\n4\ttask_complete\t0\t0\t2\n");
}

TEST(Dispatch, ReliabilityFirstPicksHigherRate)
{
    std::vector<NodeView> free{{make_node(0, 1000.0), {0, 2, 1}}, {make_node(1, 100.0), {1, 10, 9}}};
    const Task t{0, 0, 1000.0};
    RankingOptions raw{SuccessRateMode::Raw, 1e-9};
    EXPECT_EQ(dispatch(t, free, PolicyId::ReliabilityFirst, {}, raw), 1);
}

TEST(Dispatch, MinTimePicksFasterNode)
{
    std::vector<NodeView> free{{make_node(0, 100.0), {0, 0, 0}}, {make_node(1, 300.0), {1, 0, 0}}};
    EXPECT_EQ(dispatch(Task{0, 0, 500.0}, free, PolicyId::MinTime, {}), 1);
}

TEST(Dispatch, NoFreeNodeThrows)
{
    std::vector<NodeView> none;
    EXPECT_THROW(dispatch(Task{0, 0, 1.0}, none, PolicyId::MinTime, {}), EmptyNodeSet);
    EXPECT_FALSE(try_dispatch(Task{0, 0, 1.0}, none, PolicyId::MinTime, {}));
}

TEST(Dispatch, QosFilterAppliesBeforeRanking)
{
    // Node 0 availability 0.5 (poor), node 1 availability 0.99 (high).
    std::vector<NodeView> free{{make_node(0, 1000.0, 1.0, 1.0), {0, 0, 0}},
                               {make_node(1, 10.0, 0.01, 0.99), {1, 0, 0}}};
    QosRequirement q;
    q.min_level = ReliabilityLevel::Good;
    EXPECT_EQ(dispatch(Task{0, 0, 100.0}, free, PolicyId::MinTime, q), 1);
    EXPECT_EQ(dispatch(Task{0, 0, 100.0}, free, PolicyId::MinTime, {}), 0);
}

TEST(OnNodeFail, IdleNodeOnlySchedulesRepair)
{
    // Node 1 fails quickly but never receives work: the job is tiny and node 0 is faster.
    auto s = make_scenario({make_node(0, 1000.0), make_node(1, 1.0, 3600.0, 3600.0)},
                           {make_job(0, {1.0}, 5.0)});
    EventLog log;
    const auto m = run(s, &log);
    ASSERT_GE(m.nodes[1].node_failures, 1u);
    EXPECT_EQ(m.nodes[1].attempts, 0u);
    EXPECT_EQ(m.total_task_failures, 0u);
    bool saw_fail = false;
    for (const auto &e : log.events)
    {
        if (e.kind == EventKind::NodeFail)
        {
            EXPECT_EQ(e.node_id, 1);
            EXPECT_EQ(e.task_id, -1);
            saw_fail = true;
        }
        if (e.kind == EventKind::NodeRepair)
            EXPECT_TRUE(saw_fail);
    }
}

TEST(OnNodeFail, MasterWorkerRetriesOnlyTheKilledTask)
{
    RngStream probe(5, stream_id(1, StreamPurpose::Failure));
    ASSERT_LT(sample_time_to_failure(FailureProfile{36000.0, 3600.0, 0.0}, probe), 1.0);

    EventLog log;
    const auto m = run(flaky_pair(AppModel::MasterWorker, 1000), &log);
    EXPECT_EQ(m.jobs[0].outcome, JobOutcome::Completed);
    EXPECT_EQ(m.jobs[0].restarts, 0);
    EXPECT_GE(m.total_task_failures, 1u);
    EXPECT_EQ(dispatch_count(log, 0, 1), 1u);
    EXPECT_GE(dispatch_count(log, 0, 0), 2u);
}

TEST(OnNodeFail, SpmdRestartsTheWholeJob)
{
    EventLog log;
    const auto m = run(flaky_pair(AppModel::Spmd, 2), &log);
    EXPECT_GE(m.jobs[0].restarts, 1);
    EXPECT_GE(dispatch_count(log, 0, 1), 2u);
    // Node 1 kills whichever task it holds, so the job runs out of retries.
    EXPECT_EQ(m.jobs[0].outcome, JobOutcome::RetriesExhausted);
    EXPECT_LE(m.jobs[0].max_task_attempts, 3);
    EXPECT_FALSE(m.jobs[0].makespan_s);
}

TEST(OnNodeFail, RetriesExhaustedWithZeroRetries)
{
    QosRequirement q;
    q.max_retries = 0;
    auto s = make_scenario({make_node(0, 1.0, 36000.0, 3600.0)}, {make_job(0, {1000.0}, 0.0, AppModel::MasterWorker, q)});
    const auto m = run(s);
    EXPECT_EQ(m.jobs[0].outcome, JobOutcome::RetriesExhausted);
    EXPECT_EQ(m.jobs[0].max_task_attempts, 1);
    EXPECT_FALSE(m.mean_job_makespan);
}

TEST(OnTaskComplete, MakespanMeasuredFromArrival)
{
    auto s = make_scenario({make_node(0, 100.0)}, {make_job(0, {250.0}, 5.0)});
    const auto m = run(s);
    EXPECT_DOUBLE_EQ(*m.jobs[0].finish_s, 7.5);
    EXPECT_DOUBLE_EQ(*m.jobs[0].makespan_s, 2.5);
}

TEST(OnTaskComplete, QueueIsFifo)
{
    auto s = make_scenario({make_node(0, 100.0)},
                           {make_job(0, {1000.0}, 0.0), make_job(1, {500.0}, 1.0), make_job(2, {100.0}, 2.0)});
    const auto m = run(s);
    EXPECT_DOUBLE_EQ(*m.jobs[0].makespan_s, 10.0);
    EXPECT_DOUBLE_EQ(*m.jobs[1].makespan_s, 14.0);
    EXPECT_DOUBLE_EQ(*m.jobs[2].makespan_s, 14.0);
}

TEST(OnTaskComplete, DeadlineReportedNotEnforced)
{
    QosRequirement tight;
    tight.deadline_s = 1.0;
    QosRequirement loose;
    loose.deadline_s = 100.0;
    auto s = make_scenario({make_node(0, 100.0)}, {make_job(0, {1000.0}, 0.0, AppModel::MasterWorker, tight),
                                                   make_job(1, {1000.0}, 0.0, AppModel::MasterWorker, loose)});
    const auto m = run(s);
    EXPECT_EQ(m.jobs[0].outcome, JobOutcome::Completed);
    EXPECT_FALSE(m.jobs[0].deadline_met);
    EXPECT_TRUE(m.jobs[1].deadline_met);
}

TEST(Run, HorizonExhaustedIsRecordedNotThrown)
{
    auto s = make_scenario({make_node(0, 1.0)}, {make_job(0, {1000.0}), make_job(1, {1.0}, 2000.0)});
    s.horizon_s = 100.0;
    const auto m = run(s);
    EXPECT_TRUE(m.horizon_reached);
    EXPECT_DOUBLE_EQ(m.end_time_s, 100.0);
    EXPECT_EQ(m.jobs[0].outcome, JobOutcome::HorizonExhausted);
    EXPECT_EQ(m.jobs[1].outcome, JobOutcome::HorizonExhausted);
    EXPECT_DOUBLE_EQ(m.nodes[0].busy_time_s, 100.0);
}

TEST(Run, UnsatisfiableQosThrowsEmptyNodeSet)
{
    QosRequirement q;
    q.min_level = ReliabilityLevel::High;
    auto s = make_scenario({make_node(0, 100.0, 1.0, 1.0)}, {make_job(0, {10.0}, 0.0, AppModel::MasterWorker, q)});
    EXPECT_THROW(run(s), EmptyNodeSet);
}

TEST(Run, InvalidScenarioThrows)
{
    auto s = make_scenario({make_node(0, 0.0)}, {make_job(0, {10.0})});
    EXPECT_THROW(run(s), std::invalid_argument);
}

TEST(Run, InvariantsHoldOnRandomScenarios)
{
    std::mt19937_64 gen(4242);
    for (int trial = 0; trial < 150; ++trial)
    {
        const auto s = random_scenario(gen, true);
        EventLog log;
        const auto m = run(s, &log);

        ASSERT_EQ(m.jobs.size(), s.jobs.size());
        for (std::size_t j = 0; j < m.jobs.size(); ++j)
        {
            const auto &jm = m.jobs[j];
            EXPECT_LE(jm.max_task_attempts, s.jobs[j].qos.max_retries + 1);
            if (jm.outcome == JobOutcome::Completed)
            {
                const auto completes = std::count_if(log.events.begin(), log.events.end(),
                                                     [&](const EventRecord &e)
                                                     { return e.kind == EventKind::TaskComplete && e.job_id == jm.job_id; });
                // SPMD restarts may re-run tasks that had already completed.
                EXPECT_GE(static_cast<std::size_t>(completes), s.jobs[j].tasks.size());
                EXPECT_TRUE(jm.makespan_s && *jm.makespan_s > 0.0);
            }
            if (!m.horizon_reached)
                EXPECT_NE(jm.outcome, JobOutcome::HorizonExhausted);
        }

        const auto folded = fold_stats(log.events, s.nodes.size());
        std::uint64_t failures = 0;
        for (const auto &nm : m.nodes)
        {
            const auto &f = folded[static_cast<std::size_t>(nm.node_id)];
            EXPECT_EQ(nm.attempts, f.attempts);
            EXPECT_EQ(nm.successes, f.successes);
            EXPECT_EQ(nm.attempts, nm.successes + nm.failures);
            EXPECT_GE(nm.observed_availability, 0.0);
            EXPECT_LE(nm.observed_availability, 1.0);
            EXPECT_LE(nm.busy_time_s, m.end_time_s + 1e-9);
            failures += nm.failures;
        }
        EXPECT_EQ(failures, m.total_task_failures);

        // Events come out in time order.
        for (std::size_t i = 1; i < log.events.size(); ++i)
            EXPECT_LE(log.events[i - 1].time, log.events[i].time);
    }
}

TEST(Run, FailureFreeReliabilityFirstMatchesMinTime)
{
    std::mt19937_64 gen(606);
    for (int trial = 0; trial < 100; ++trial)
    {
        auto s = random_scenario(gen, false);
        // Raw rates are exactly 1.0 for every node when nothing fails; a wide
        // epsilon gives the same tie under smoothing.
        for (auto [mode, eps] : {std::pair{SuccessRateMode::Raw, 1e-9}, std::pair{SuccessRateMode::Smoothed, 1.0}})
        {
            s.success_rate_mode = mode;
            s.epsilon = eps;
            s.policy = PolicyId::ReliabilityFirst;
            EventLog rf_log, mt_log;
            const auto rf = run(s, &rf_log);
            s.policy = PolicyId::MinTime;
            const auto mt = run(s, &mt_log);
            EXPECT_EQ(rf_log.dispatches, mt_log.dispatches);
            EXPECT_EQ(rf, mt);
        }
    }
}

TEST(Run, StatsSuccessIncrementsOncePerCompletion)
{
    auto s = make_scenario({make_node(0, 300.0), make_node(1, 200.0), make_node(2, 100.0)},
                           {make_job(0, {100, 200, 300, 400, 500}), make_job(1, {1000, 50}, 3.0)},
                           PolicyId::CostAware);
    EventLog log;
    const auto m = run(s, &log);
    std::uint64_t successes = 0;
    for (const auto &n : m.nodes)
        successes += n.successes;
    EXPECT_EQ(successes, 7u);
    const auto folded = fold_stats(log.events, 3);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_EQ(folded[i].successes, m.nodes[i].successes);
}
