#pragma once

#include "gridrel/experiment.hpp"
#include "gridrel/sim.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace gridrel
{
    inline constexpr std::string_view kMakespansCsvHeader = "policy,replication,seed,job_id,makespan_s,deadline_met";
    inline constexpr std::string_view kNodesCsvHeader =
        "policy,node_id,attempts,successes,raw_success_rate,observed_availability";

    // Report bodies. An unfinished job has an empty makespan_s field.
    std::string makespans_csv(const ExperimentResults &results);
    std::string nodes_csv(const ExperimentResults &results);
    std::string reliability_csv(const ExperimentResults &results);
    std::string summary_text(const ExperimentResults &results);

    // Plain-text summary of one simulation run.
    std::string run_summary(const Scenario &scenario, const Metrics &metrics);

    /// Writes makespans.csv, nodes.csv, reliability.csv and summary.txt into
    /// out_dir. Each file is written under a temporary name first and renamed
    /// once all four are complete. Throws IoError if the directory cannot be
    /// created or a file cannot be written.
    void emit_reports(const ExperimentResults &results, const std::filesystem::path &out_dir);
}
