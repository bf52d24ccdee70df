#pragma once

#include "gridrel/model.hpp"
#include "gridrel/policy.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace gridrel
{
    enum class EventKind : std::uint8_t
    {
        JobArrival,
        TaskComplete,
        NodeFail,
        NodeRepair,
    };

    std::string_view to_string(EventKind kind) noexcept;

    // Scheduled event. Processing order is (time, sequence); sequence is
    // assigned at insertion so equal-time events replay in insertion order.
    struct SimEvent
    {
        double time = 0.0;
        std::uint64_t sequence = 0;
        EventKind kind = EventKind::JobArrival;
        int node_id = -1;
        int job_id = -1;
        int task_id = -1;
        // Run token of the node when a TaskComplete was scheduled; a mismatch
        // means the task was killed or aborted and the event is stale.
        std::uint64_t token = 0;
    };

    /// One processed event. For NodeFail the task fields name the killed task
    /// (-1 when the node was idle).
    struct EventRecord
    {
        double time = 0.0;
        EventKind kind = EventKind::JobArrival;
        int node_id = -1;
        int job_id = -1;
        int task_id = -1;

        friend bool operator==(const EventRecord &, const EventRecord &) = default;
    };

    struct DispatchRecord
    {
        double time = 0.0;
        int node_id = -1;
        int job_id = -1;
        int task_id = -1;
        int attempt = 0;
        // Number of EventRecords logged before this dispatch was made.
        std::size_t events_before = 0;

        friend bool operator==(const DispatchRecord &, const DispatchRecord &) = default;
    };

    struct EventLog
    {
        std::vector<EventRecord> events;
        std::vector<DispatchRecord> dispatches;
    };

    // time<TAB>kind<TAB>node_id<TAB>job_id<TAB>task_id, one line per event.
    void write_event_log(std::ostream &os, const EventLog &log);

    enum class JobOutcome : std::uint8_t
    {
        Completed,
        RetriesExhausted,
        HorizonExhausted,
    };

    std::string_view to_string(JobOutcome outcome) noexcept;

    struct JobMetrics
    {
        int job_id = 0;
        double arrival_s = 0.0;
        JobOutcome outcome = JobOutcome::HorizonExhausted;
        std::optional<double> finish_s;
        std::optional<double> makespan_s;
        std::optional<double> deadline_s;
        bool deadline_met = false;
        int restarts = 0;
        int max_task_attempts = 0;

        friend bool operator==(const JobMetrics &, const JobMetrics &) = default;
    };

    struct NodeMetrics
    {
        int node_id = 0;
        std::uint64_t attempts = 0;
        std::uint64_t successes = 0;
        std::uint64_t failures = 0;
        std::uint64_t node_failures = 0;
        double busy_time_s = 0.0;
        double up_time_s = 0.0;
        double observed_availability = 1.0;

        friend bool operator==(const NodeMetrics &, const NodeMetrics &) = default;
    };

    struct Metrics
    {
        std::vector<JobMetrics> jobs;
        std::optional<double> mean_job_makespan; // over completed jobs
        std::uint64_t total_task_failures = 0;
        std::vector<NodeMetrics> nodes;
        std::uint64_t event_count = 0;
        double end_time_s = 0.0;
        bool horizon_reached = false;

        friend bool operator==(const Metrics &, const Metrics &) = default;
    };

    /// Policy head among `free_nodes` after QoS filtering on each node's
    /// analytic availability; nullopt when nothing is eligible.
    std::optional<int> try_dispatch(const Task &task, std::span<const NodeView> free_nodes, PolicyId policy,
                                    const QosRequirement &qos, const RankingOptions &opts = {});
    // As above, throwing EmptyNodeSet when nothing is eligible.
    int dispatch(const Task &task, std::span<const NodeView> free_nodes, PolicyId policy, const QosRequirement &qos,
                 const RankingOptions &opts = {});

    /// Runs the scenario to completion of every job or to the horizon.
    ///
    /// One task per node; pending tasks wait in a global FIFO and are
    /// dispatched whenever a node frees up or is repaired. A node failure kills
    /// its task (no checkpointing). MasterWorker jobs retry only the killed
    /// task; SPMD jobs abort and restart every task. Retried work goes to the
    /// front of the queue. A job whose tasks would exceed qos.max_retries
    /// retries is reported as RetriesExhausted.
    ///
    /// Throws std::invalid_argument for an invalid scenario and EmptyNodeSet if
    /// a job's QoS level excludes every node. The result is a pure function of
    /// the scenario.
    Metrics run(const Scenario &scenario, EventLog *log = nullptr);

    // Per-node stats rebuilt by folding the event log through record_attempt.
    std::vector<NodeStats> fold_stats(std::span<const EventRecord> events, std::size_t node_count);
}
