// gridrel: reliability-aware grid scheduling simulator.
//
//   gridrel run <scenario.json> [--event-log FILE]
//   gridrel compare <scenario.json> --policies a,b --replications N --seed S --out DIR
//   gridrel analyze <scenario.json>
//
// Exit codes: 0 success, 2 parse/validation error, 3 I/O error.

#include "gridrel/experiment.hpp"
#include "gridrel/report.hpp"
#include "gridrel/scenario_io.hpp"
#include "gridrel/sim.hpp"
#include "gridrel/text.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    constexpr int kExitOk = 0;
    constexpr int kExitFailure = 1;
    constexpr int kExitParse = 2;
    constexpr int kExitIo = 3;

    std::vector<gridrel::PolicyId> parse_policy_list(const std::string &csv)
    {
        std::vector<gridrel::PolicyId> out;
        std::stringstream ss(csv);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            auto p = gridrel::parse_policy(item);
            if (!p)
                throw gridrel::ParseError("--policies: unknown policy \"" + item +
                                          "\" (expected one of: reliability_first, min_time, cost_aware)");
            out.push_back(*p);
        }
        return out;
    }

    int cmd_run(const std::string &path, const std::string &event_log)
    {
        const auto scenario = gridrel::load_scenario(path);
        gridrel::EventLog log;
        const auto metrics = gridrel::run(scenario, event_log.empty() ? nullptr : &log);
        if (!event_log.empty())
        {
            std::ofstream out(event_log, std::ios::binary | std::ios::trunc);
            gridrel::write_event_log(out, log);
            out.close();
            if (!out)
                throw gridrel::IoError("cannot write event log " + event_log);
        }
        std::cout << gridrel::run_summary(scenario, metrics);
        return kExitOk;
    }

    int cmd_compare(const std::string &path, const std::string &policies, int replications,
                    std::optional<std::uint64_t> seed, const std::string &out_dir)
    {
        gridrel::ExperimentSpec spec;
        spec.scenario = gridrel::load_scenario(path);
        spec.policies = parse_policy_list(policies);
        spec.replications = replications;
        spec.base_seed = seed.value_or(spec.scenario.seed);
        try
        {
            gridrel::validate_experiment(spec);
        }
        catch (const std::invalid_argument &e)
        {
            throw gridrel::ParseError(e.what());
        }
        const auto results = gridrel::run_experiment(spec);
        gridrel::emit_reports(results, out_dir);
        std::cout << gridrel::summary_text(results);
        return kExitOk;
    }

    int cmd_analyze(const std::string &path)
    {
        const auto scenario = gridrel::load_scenario(path);
        const auto report = gridrel::selection_report(scenario.nodes);
        gridrel::write_selection_csv(std::cout, report);
        if (auto r = gridrel::fleet_expected_reward_rate(scenario.nodes))
            std::cout << "system expected reward rate (MIPS): " << gridrel::format_number(*r) << '\n';
        std::cout << "performance_pick: node " << report.performance_pick << '\n'
                  << "reliability_pick: node " << report.reliability_pick << '\n';
        return kExitOk;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Reliability-aware grid scheduling simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string event_log;
    std::string policies = "min_time,reliability_first";
    int replications = 1;
    std::optional<std::uint64_t> seed;
    std::string out_dir;

    auto *run = app.add_subcommand("run", "Run one simulation and print a summary");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--event-log", event_log, "Write the tab-separated event log to FILE");

    auto *compare = app.add_subcommand("compare", "Compare policies over seeded replications");
    compare->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    compare->add_option("--policies", policies, "Comma-separated policy names")->capture_default_str();
    compare->add_option("--replications", replications, "Replications per policy")->capture_default_str();
    compare->add_option("--seed", seed, "Base seed (default: the scenario seed)");
    compare->add_option("--out", out_dir, "Output directory")->required();

    auto *analyze = app.add_subcommand("analyze", "Per-node reliability analysis, no simulation");
    analyze->add_option("scenario", scenario_path, "Scenario JSON file")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return kExitParse;
    }

    try
    {
        if (*run)
            return cmd_run(scenario_path, event_log);
        if (*compare)
            return cmd_compare(scenario_path, policies, replications, seed, out_dir);
        return cmd_analyze(scenario_path);
    }
    catch (const gridrel::ParseError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    }
    catch (const gridrel::ValidationError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    }
    catch (const gridrel::EmptyNodeSet &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    }
    catch (const gridrel::IoError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}
