// Serial reference vs OpenMP kernel, pairwise.

#include "gridrel/experiment.hpp"
#include "gridrel/failure.hpp"
#include "gridrel/perf.hpp"

#include <benchmark/benchmark.h>

using namespace gridrel;

namespace
{
    std::vector<GridNode> fleet(int n)
    {
        std::vector<GridNode> nodes;
        for (int i = 0; i < n; ++i)
            nodes.push_back(GridNode{i, 100.0 + 50.0 * i, 0.0, FailureProfile{0.05 * (i + 1), 1.0 + 0.1 * i, 0.05}});
        return nodes;
    }

    ExperimentSpec experiment(int replications)
    {
        Scenario s;
        s.nodes = fleet(6);
        s.nodes[5].failure = FailureProfile{3600.0, 7200.0, 0.0};
        for (int j = 0; j < 30; ++j)
        {
            Job job;
            job.id = j;
            job.arrival_s = 20.0 * j;
            for (int t = 0; t < 4; ++t)
                job.tasks.push_back(Task{t, j, 5000.0 + 1000.0 * t});
            s.jobs.push_back(job);
        }
        return {s, {PolicyId::MinTime, PolicyId::ReliabilityFirst}, replications, 1};
    }

    std::vector<UptimeRequest> uptime_requests(int n)
    {
        std::vector<UptimeRequest> reqs;
        for (int i = 0; i < n; ++i)
            reqs.push_back(UptimeRequest{FailureProfile{0.5, 2.0, 0.0}, 7, i, 1.0e4 * kSecondsPerHour});
        return reqs;
    }
}

static void BM_ExperimentSerial(benchmark::State &state)
{
    const auto spec = experiment(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(run_experiment_serial(spec));
}
static void BM_ExperimentParallel(benchmark::State &state)
{
    const auto spec = experiment(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(run_experiment(spec));
}
BENCHMARK(BM_ExperimentSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_CtmcBuildSerial(benchmark::State &state)
{
    const auto nodes = fleet(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_system_ctmc_serial(nodes));
}
static void BM_CtmcBuildParallel(benchmark::State &state)
{
    const auto nodes = fleet(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_system_ctmc(nodes));
}
BENCHMARK(BM_CtmcBuildSerial)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CtmcBuildParallel)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_ResidualSerial(benchmark::State &state)
{
    const auto model = build_system_ctmc(fleet(static_cast<int>(state.range(0))));
    const std::vector<double> pi(model.size(), 1.0 / static_cast<double>(model.size()));
    for (auto _ : state)
        benchmark::DoNotOptimize(residual_inf_norm_serial(model.generator, pi));
}
static void BM_ResidualParallel(benchmark::State &state)
{
    const auto model = build_system_ctmc(fleet(static_cast<int>(state.range(0))));
    const std::vector<double> pi(model.size(), 1.0 / static_cast<double>(model.size()));
    for (auto _ : state)
        benchmark::DoNotOptimize(residual_inf_norm(model.generator, pi));
}
BENCHMARK(BM_ResidualSerial)->Arg(16)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ResidualParallel)->Arg(16)->Unit(benchmark::kMicrosecond);

static void BM_UptimeBatchSerial(benchmark::State &state)
{
    const auto reqs = uptime_requests(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_uptime_batch_serial(reqs));
}
static void BM_UptimeBatchParallel(benchmark::State &state)
{
    const auto reqs = uptime_requests(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_uptime_batch(reqs));
}
BENCHMARK(BM_UptimeBatchSerial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UptimeBatchParallel)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
