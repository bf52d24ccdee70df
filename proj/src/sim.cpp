#include "gridrel/sim.hpp"

#include "gridrel/failure.hpp"
#include "gridrel/perf.hpp"
#include "gridrel/text.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

namespace gridrel
{
    std::string_view to_string(EventKind kind) noexcept
    {
        switch (kind)
        {
        case EventKind::JobArrival:
            return "job_arrival";
        case EventKind::TaskComplete:
            return "task_complete";
        case EventKind::NodeFail:
            return "node_fail";
        case EventKind::NodeRepair:
            return "node_repair";
        }
        return "?";
    }

    std::string_view to_string(JobOutcome outcome) noexcept
    {
        switch (outcome)
        {
        case JobOutcome::Completed:
            return "completed";
        case JobOutcome::RetriesExhausted:
            return "retries_exhausted";
        case JobOutcome::HorizonExhausted:
            return "horizon_exhausted";
        }
        return "?";
    }

    void write_event_log(std::ostream &os, const EventLog &log)
    {
        for (const auto &e : log.events)
            os << format_number(e.time) << '\t' << to_string(e.kind) << '\t' << e.node_id << '\t' << e.job_id << '\t'
               << e.task_id << '\n';
    }

    std::vector<NodeStats> fold_stats(std::span<const EventRecord> events, std::size_t node_count)
    {
        std::vector<NodeStats> stats(node_count);
        for (std::size_t i = 0; i < node_count; ++i)
            stats[i].node_id = static_cast<int>(i);
        for (const auto &e : events)
        {
            if (e.kind == EventKind::TaskComplete)
                stats[static_cast<std::size_t>(e.node_id)] =
                    record_attempt(stats[static_cast<std::size_t>(e.node_id)], Outcome::Success);
            else if (e.kind == EventKind::NodeFail && e.task_id >= 0)
                stats[static_cast<std::size_t>(e.node_id)] =
                    record_attempt(stats[static_cast<std::size_t>(e.node_id)], Outcome::Failure);
        }
        return stats;
    }

    std::optional<int> try_dispatch(const Task &task, std::span<const NodeView> free_nodes, PolicyId policy,
                                    const QosRequirement &qos, const RankingOptions &opts)
    {
        if (free_nodes.empty())
            return std::nullopt;
        std::vector<NodeView> eligible;
        eligible.reserve(free_nodes.size());
        for (const auto &v : free_nodes)
        {
            if (qos.min_level && classify_reliability(steady_state_availability(v.node.failure)) < *qos.min_level)
                continue;
            eligible.push_back(v);
        }
        if (eligible.empty())
            return std::nullopt;
        return rank(policy, eligible, task.length_mi, opts).front();
    }

    int dispatch(const Task &task, std::span<const NodeView> free_nodes, PolicyId policy, const QosRequirement &qos,
                 const RankingOptions &opts)
    {
        if (auto id = try_dispatch(task, free_nodes, policy, qos, opts))
            return *id;
        std::ostringstream os;
        os << "no eligible free node for task " << task.job_id << "/" << task.id;
        throw EmptyNodeSet(os.str());
    }

    namespace
    {
        struct EventAfter
        {
            bool operator()(const SimEvent &a, const SimEvent &b) const noexcept
            {
                if (a.time != b.time)
                    return a.time > b.time;
                return a.sequence > b.sequence;
            }
        };

        struct TaskRef
        {
            std::size_t job = 0;
            std::size_t task = 0;
        };

        struct NodeState
        {
            NodeLifecycle life;
            RngStream fail_rng;
            RngStream repair_rng;
            bool busy = false;
            TaskRef running{};
            std::uint64_t token = 0;
            double busy_since = 0.0;
            double up_since = 0.0;
        };

        struct JobState
        {
            bool arrived = false;
            bool finished = false;
            std::size_t completed_tasks = 0;
            JobMetrics metrics;
        };

        class Simulator
        {
        public:
            Simulator(const Scenario &s, EventLog *log) : scenario_(s), log_(log), jobs_(s.jobs)
            {
                opts_.mode = s.success_rate_mode;
                opts_.epsilon = s.epsilon;

                nodes_.reserve(s.nodes.size());
                stats_.resize(s.nodes.size());
                metrics_.nodes.resize(s.nodes.size());
                for (const auto &n : s.nodes)
                {
                    const auto i = static_cast<std::size_t>(n.id);
                    RngStream fail(s.seed, stream_id(n.id, StreamPurpose::Failure));
                    RngStream repair(s.seed, stream_id(n.id, StreamPurpose::Repair));
                    nodes_.push_back(NodeState{NodeLifecycle{}, fail, repair});
                    stats_[i].node_id = n.id;
                    metrics_.nodes[i].node_id = n.id;
                }
                // Index nodes by id; validation guarantees ids are 0..N-1.
                std::vector<GridNode> by_id(s.nodes.size());
                for (const auto &n : s.nodes)
                    by_id[static_cast<std::size_t>(n.id)] = n;
                fleet_ = std::move(by_id);

                job_state_.resize(jobs_.size());
                for (std::size_t j = 0; j < jobs_.size(); ++j)
                {
                    auto &m = job_state_[j].metrics;
                    m.job_id = jobs_[j].id;
                    m.arrival_s = jobs_[j].arrival_s;
                    m.deadline_s = jobs_[j].qos.deadline_s;
                }
            }

            Metrics run()
            {
                for (std::size_t i = 0; i < nodes_.size(); ++i)
                {
                    auto &n = nodes_[i];
                    n.life = start_lifecycle(static_cast<int>(i), fleet_[i].failure, 0.0, n.fail_rng);
                    if (std::isfinite(n.life.next_transition_time))
                        schedule(n.life.next_transition_time, EventKind::NodeFail, static_cast<int>(i));
                }
                for (std::size_t j = 0; j < jobs_.size(); ++j)
                    schedule(jobs_[j].arrival_s, EventKind::JobArrival, -1, static_cast<int>(j));

                while (finished_jobs_ < jobs_.size() && !queue_.empty())
                {
                    const SimEvent ev = queue_.top();
                    if (ev.time > scenario_.horizon_s)
                    {
                        clock_ = scenario_.horizon_s;
                        metrics_.horizon_reached = true;
                        break;
                    }
                    queue_.pop();
                    if (ev.kind == EventKind::TaskComplete &&
                        nodes_[static_cast<std::size_t>(ev.node_id)].token != ev.token)
                        continue;
                    clock_ = ev.time;
                    ++metrics_.event_count;
                    handle(ev);
                    dispatch_pending();
                }
                return finish();
            }

        private:
            void schedule(double time, EventKind kind, int node, int job = -1, int task = -1, std::uint64_t token = 0)
            {
                queue_.push(SimEvent{time, next_seq_++, kind, node, job, task, token});
            }

            void log_event(EventKind kind, int node, int job, int task)
            {
                if (log_)
                    log_->events.push_back(EventRecord{clock_, kind, node, job, task});
            }

            Task &task_at(TaskRef r) { return jobs_[r.job].tasks[r.task]; }

            void handle(const SimEvent &ev)
            {
                switch (ev.kind)
                {
                case EventKind::JobArrival:
                    on_job_arrival(static_cast<std::size_t>(ev.job_id));
                    break;
                case EventKind::TaskComplete:
                    on_task_complete(static_cast<std::size_t>(ev.node_id));
                    break;
                case EventKind::NodeFail:
                    on_node_fail(static_cast<std::size_t>(ev.node_id));
                    break;
                case EventKind::NodeRepair:
                    on_node_repair(static_cast<std::size_t>(ev.node_id));
                    break;
                }
            }

            void on_job_arrival(std::size_t j)
            {
                log_event(EventKind::JobArrival, -1, jobs_[j].id, -1);
                job_state_[j].arrived = true;
                for (std::size_t t = 0; t < jobs_[j].tasks.size(); ++t)
                    pending_.push_back(TaskRef{j, t});
            }

            void on_task_complete(std::size_t node)
            {
                auto &n = nodes_[node];
                const TaskRef ref = n.running;
                auto &task = task_at(ref);
                log_event(EventKind::TaskComplete, static_cast<int>(node), jobs_[ref.job].id, task.id);

                task.complete();
                stats_[node] = record_attempt(stats_[node], Outcome::Success);
                release(node);

                auto &js = job_state_[ref.job];
                if (++js.completed_tasks == jobs_[ref.job].tasks.size())
                {
                    js.metrics.outcome = JobOutcome::Completed;
                    js.metrics.finish_s = clock_;
                    js.metrics.makespan_s = clock_ - jobs_[ref.job].arrival_s;
                    const auto &dl = jobs_[ref.job].qos.deadline_s;
                    js.metrics.deadline_met = !dl || *js.metrics.makespan_s <= *dl;
                    mark_finished(ref.job);
                }
            }

            void on_node_fail(std::size_t node)
            {
                auto &n = nodes_[node];
                metrics_.nodes[node].up_time_s += clock_ - n.up_since;
                ++metrics_.nodes[node].node_failures;

                const bool had_task = n.busy;
                const TaskRef ref = n.running;
                log_event(EventKind::NodeFail, static_cast<int>(node), had_task ? jobs_[ref.job].id : -1,
                          had_task ? task_at(ref).id : -1);

                advance_lifecycle(n.life, fleet_[node].failure, n.fail_rng, n.repair_rng);
                schedule(n.life.next_transition_time, EventKind::NodeRepair, static_cast<int>(node));

                if (!had_task)
                    return;
                task_at(ref).fail();
                stats_[node] = record_attempt(stats_[node], Outcome::Failure);
                ++metrics_.total_task_failures;
                release(node);

                auto &job = jobs_[ref.job];
                if (job.app_model == AppModel::MasterWorker)
                {
                    auto &task = job.tasks[ref.task];
                    if (task.attempts <= job.qos.max_retries)
                    {
                        task.requeue();
                        pending_.push_front(ref);
                    }
                    else
                    {
                        fail_job(ref.job);
                    }
                    return;
                }

                // SPMD: the whole job restarts.
                abort_running(ref.job);
                drop_pending(ref.job);
                int max_attempts = 0;
                for (const auto &t : job.tasks)
                    max_attempts = std::max(max_attempts, t.attempts);
                if (max_attempts > job.qos.max_retries)
                {
                    fail_job(ref.job);
                    return;
                }
                for (auto &t : job.tasks)
                    t.reset_for_restart();
                job_state_[ref.job].completed_tasks = 0;
                ++job_state_[ref.job].metrics.restarts;
                for (std::size_t t = job.tasks.size(); t-- > 0;)
                    pending_.push_front(TaskRef{ref.job, t});
            }

            void on_node_repair(std::size_t node)
            {
                auto &n = nodes_[node];
                log_event(EventKind::NodeRepair, static_cast<int>(node), -1, -1);
                n.up_since = clock_;
                advance_lifecycle(n.life, fleet_[node].failure, n.fail_rng, n.repair_rng);
                if (std::isfinite(n.life.next_transition_time))
                    schedule(n.life.next_transition_time, EventKind::NodeFail, static_cast<int>(node));
            }

            // Frees the node and invalidates any in-flight completion event.
            void release(std::size_t node)
            {
                auto &n = nodes_[node];
                metrics_.nodes[node].busy_time_s += clock_ - n.busy_since;
                n.busy = false;
                ++n.token;
            }

            void abort_running(std::size_t job)
            {
                for (std::size_t i = 0; i < nodes_.size(); ++i)
                {
                    auto &n = nodes_[i];
                    if (n.busy && n.running.job == job)
                    {
                        task_at(n.running).fail();
                        release(i);
                    }
                }
            }

            void drop_pending(std::size_t job)
            {
                std::erase_if(pending_, [job](const TaskRef &r) { return r.job == job; });
            }

            void fail_job(std::size_t job)
            {
                abort_running(job);
                drop_pending(job);
                auto &m = job_state_[job].metrics;
                m.outcome = JobOutcome::RetriesExhausted;
                m.finish_s = clock_;
                m.deadline_met = false;
                mark_finished(job);
            }

            void mark_finished(std::size_t job)
            {
                job_state_[job].finished = true;
                ++finished_jobs_;
            }

            void dispatch_pending()
            {
                if (pending_.empty())
                    return;
                std::vector<std::size_t> free;
                for (std::size_t i = 0; i < nodes_.size(); ++i)
                    if (nodes_[i].life.up && !nodes_[i].busy)
                        free.push_back(i);

                std::vector<NodeView> views;
                for (auto it = pending_.begin(); it != pending_.end() && !free.empty();)
                {
                    const TaskRef ref = *it;
                    auto &task = task_at(ref);
                    views.clear();
                    for (auto i : free)
                        views.push_back(NodeView{fleet_[i], stats_[i]});
                    const auto choice =
                        try_dispatch(task, views, scenario_.policy, jobs_[ref.job].qos, opts_);
                    if (!choice)
                    {
                        ++it;
                        continue;
                    }
                    const auto node = static_cast<std::size_t>(*choice);
                    start(ref, node);
                    it = pending_.erase(it);
                    std::erase(free, node);
                }
            }

            void start(TaskRef ref, std::size_t node)
            {
                auto &task = task_at(ref);
                task.start();
                auto &n = nodes_[node];
                n.busy = true;
                n.running = ref;
                n.busy_since = clock_;
                ++n.token;
                if (log_)
                    log_->dispatches.push_back(DispatchRecord{clock_, static_cast<int>(node), jobs_[ref.job].id,
                                                              task.id, task.attempts, log_->events.size()});
                schedule(clock_ + estimated_exec_time(task, fleet_[node]), EventKind::TaskComplete,
                         static_cast<int>(node), jobs_[ref.job].id, task.id, n.token);
            }

            Metrics finish()
            {
                const double end = clock_;
                metrics_.end_time_s = end;
                for (std::size_t i = 0; i < nodes_.size(); ++i)
                {
                    auto &n = nodes_[i];
                    auto &nm = metrics_.nodes[i];
                    if (n.life.up)
                        nm.up_time_s += end - n.up_since;
                    if (n.busy)
                        nm.busy_time_s += end - n.busy_since;
                    nm.attempts = stats_[i].attempts;
                    nm.successes = stats_[i].successes;
                    nm.failures = stats_[i].attempts - stats_[i].successes;
                    nm.observed_availability = end > 0.0 ? std::clamp(nm.up_time_s / end, 0.0, 1.0) : 1.0;
                }

                double sum = 0.0;
                std::size_t done = 0;
                for (std::size_t j = 0; j < jobs_.size(); ++j)
                {
                    auto &m = job_state_[j].metrics;
                    for (const auto &t : jobs_[j].tasks)
                        m.max_task_attempts = std::max(m.max_task_attempts, t.attempts);
                    if (m.outcome == JobOutcome::Completed)
                    {
                        sum += *m.makespan_s;
                        ++done;
                    }
                    metrics_.jobs.push_back(m);
                }
                if (done > 0)
                    metrics_.mean_job_makespan = sum / static_cast<double>(done);
                return std::move(metrics_);
            }

            const Scenario &scenario_;
            EventLog *log_;
            RankingOptions opts_;
            std::vector<GridNode> fleet_;
            std::vector<Job> jobs_;
            std::vector<NodeState> nodes_;
            std::vector<NodeStats> stats_;
            std::vector<JobState> job_state_;
            std::deque<TaskRef> pending_;
            std::priority_queue<SimEvent, std::vector<SimEvent>, EventAfter> queue_;
            std::uint64_t next_seq_ = 0;
            std::size_t finished_jobs_ = 0;
            double clock_ = 0.0;
            Metrics metrics_;
        };
    }

    Metrics run(const Scenario &scenario, EventLog *log)
    {
        const auto violations = validate_scenario(scenario);
        if (!violations.empty())
        {
            std::ostringstream os;
            os << "invalid scenario:";
            for (const auto &v : violations)
                os << "\n  " << v;
            throw std::invalid_argument(os.str());
        }

        std::vector<double> availability;
        for (const auto &n : scenario.nodes)
            availability.push_back(steady_state_availability(n.failure));
        for (const auto &job : scenario.jobs)
        {
            if (filter_by_qos(scenario.nodes, job.qos, availability).empty())
            {
                std::ostringstream os;
                os << "job " << job.id << ": no node meets reliability level " << to_string(*job.qos.min_level);
                throw EmptyNodeSet(os.str());
            }
        }

        if (log)
        {
            log->events.clear();
            log->dispatches.clear();
        }
        return Simulator(scenario, log).run();
    }
}
