#pragma once

#include "gridrel/model.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gridrel
{
    struct ParseError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct ValidationError : std::runtime_error
    {
        explicit ValidationError(std::vector<std::string> v);
        std::vector<std::string> violations;
    };

    struct IoError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    /// Scenario JSON:
    ///
    ///   {
    ///     "nodes":  [{"id": 0, "mips": 500, "cost_per_sec": 0.01,
    ///                 "lambda_per_hour": 0.1, "mu_per_hour": 1.0, "degradation": 0.0}],
    ///     "jobs":   [{"id": 0, "arrival_s": 0, "app_model": "master_worker",
    ///                 "tasks": [{"length_mi": 1000}],
    ///                 "qos": {"deadline_s": 60, "min_level": "medium", "max_retries": 3}}],
    ///     "policy": "reliability_first", "seed": 42, "horizon_s": 100000,
    ///     "options": {"epsilon": 1e-9, "success_rate_mode": "smoothed"}
    ///   }
    ///
    /// Only "nodes", "nodes[].mips", "jobs" and "jobs[].tasks" are required.
    /// Unknown keys are rejected. Syntax errors report line and column, field
    /// errors report the field path; the scenario is then validated and every
    /// violation is listed in one ValidationError.
    Scenario parse_scenario(std::string_view text, std::string_view source = "<input>");
    Scenario load_scenario(const std::filesystem::path &path);

    // Canonical JSON with every field written out; parse_scenario(dump_scenario(s)) == s.
    std::string dump_scenario(const Scenario &scenario);

    inline constexpr double kDefaultHorizonSeconds = 1.0e9;
}
