#include "gridrel/report.hpp"

#include "gridrel/scenario_io.hpp"
#include "gridrel/text.hpp"

#include <fstream>
#include <sstream>
#include <system_error>
#include <utility>
#include <vector>

namespace gridrel
{
    namespace
    {
        std::string opt_number(const std::optional<double> &v)
        {
            return v ? format_number(*v) : std::string("n/a");
        }
    }

    std::string makespans_csv(const ExperimentResults &results)
    {
        std::ostringstream os;
        os << kMakespansCsvHeader << '\n';
        for (const auto &r : results.runs)
            for (const auto &j : r.metrics.jobs)
                os << to_string(r.policy) << ',' << r.replication << ',' << r.seed << ',' << j.job_id << ','
                   << (j.makespan_s ? format_number(*j.makespan_s) : std::string()) << ','
                   << (j.deadline_met ? "true" : "false") << '\n';
        return os.str();
    }

    std::string nodes_csv(const ExperimentResults &results)
    {
        std::ostringstream os;
        os << kNodesCsvHeader << '\n';
        for (const auto &a : results.aggregates)
            for (const auto &n : a.nodes)
                os << to_string(a.policy) << ',' << n.node_id << ',' << n.attempts << ',' << n.successes << ','
                   << format_number(n.raw_success_rate) << ',' << format_number(n.observed_availability) << '\n';
        return os.str();
    }

    std::string reliability_csv(const ExperimentResults &results)
    {
        std::ostringstream os;
        write_selection_csv(os, results.selection);
        return os.str();
    }

    std::string summary_text(const ExperimentResults &results)
    {
        std::ostringstream os;
        for (const auto &a : results.aggregates)
        {
            os << "policy " << to_string(a.policy) << '\n'
               << "  replications:        " << a.replications << '\n'
               << "  jobs completed:      " << a.jobs_completed << " / " << a.jobs_total << '\n'
               << "  mean makespan (s):   " << opt_number(a.mean_makespan_s) << '\n'
               << "  min makespan (s):    " << opt_number(a.min_makespan_s) << '\n'
               << "  max makespan (s):    " << opt_number(a.max_makespan_s) << '\n'
               << "  task failures:       " << a.total_task_failures << '\n'
               << "  node success rates: ";
            for (const auto &n : a.nodes)
                os << ' ' << n.node_id << '=' << format_number(n.raw_success_rate);
            os << '\n';
        }
        if (results.system_expected_reward_rate_mips)
            os << "system expected reward rate (MIPS): " << format_number(*results.system_expected_reward_rate_mips)
               << '\n';
        os << "performance_pick: node " << results.selection.performance_pick << '\n'
           << "reliability_pick: node " << results.selection.reliability_pick << '\n';
        return os.str();
    }

    std::string run_summary(const Scenario &scenario, const Metrics &m)
    {
        std::ostringstream os;
        os << "policy " << to_string(scenario.policy) << ", seed " << scenario.seed << '\n'
           << "  events processed:    " << m.event_count << '\n'
           << "  end time (s):        " << format_number(m.end_time_s) << (m.horizon_reached ? " (horizon)" : "")
           << '\n'
           << "  mean makespan (s):   " << opt_number(m.mean_job_makespan) << '\n'
           << "  task failures:       " << m.total_task_failures << '\n';
        for (const auto &j : m.jobs)
        {
            os << "  job " << j.job_id << ": " << to_string(j.outcome);
            if (j.makespan_s)
                os << ", makespan " << format_number(*j.makespan_s) << " s";
            if (j.deadline_s)
                os << ", deadline " << (j.deadline_met ? "met" : "missed");
            if (j.restarts > 0)
                os << ", restarts " << j.restarts;
            os << '\n';
        }
        for (const auto &n : m.nodes)
            os << "  node " << n.node_id << ": attempts " << n.attempts << ", successes " << n.successes
               << ", busy " << format_number(n.busy_time_s) << " s, availability "
               << format_number(n.observed_availability) << '\n';
        return os.str();
    }

    void emit_reports(const ExperimentResults &results, const std::filesystem::path &out_dir)
    {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec || !fs::is_directory(out_dir))
            throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

        const std::pair<const char *, std::string> files[] = {
            {"makespans.csv", makespans_csv(results)},
            {"nodes.csv", nodes_csv(results)},
            {"reliability.csv", reliability_csv(results)},
            {"summary.txt", summary_text(results)},
        };

        std::vector<fs::path> temps;
        auto cleanup = [&temps]
        {
            std::error_code ignored;
            for (const auto &t : temps)
                fs::remove(t, ignored);
        };

        for (const auto &[name, body] : files)
        {
            const auto tmp = out_dir / (std::string(".") + name + ".tmp");
            temps.push_back(tmp);
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << body;
            out.close();
            if (!out)
            {
                cleanup();
                throw IoError("cannot write " + tmp.string());
            }
        }
        for (std::size_t i = 0; i < temps.size(); ++i)
        {
            fs::rename(temps[i], out_dir / files[i].first, ec);
            if (ec)
            {
                cleanup();
                throw IoError("cannot rename " + temps[i].string() + ": " + ec.message());
            }
        }
    }
}
