#pragma once

// Config-driven experiment runner. A config names an experiment kind, its
// parameters, a seed and an output prefix; a run writes
// <prefix>.config.json, <prefix>.summary.json and <prefix>.data.csv.

#include "expwalk/report.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace expwalk {

struct ExperimentConfig {
    std::string kind;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::string output = "expwalk";

    /// Top-level keys: kind, params, seed, output; anything else is rejected.
    static ExperimentConfig from_json(const nlohmann::json& j);
    /// A JSON document, or lines of `key = value` where kind/seed/output are
    /// top-level and every other key is a parameter (values parsed as JSON
    /// when possible, else taken as strings).
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    nlohmann::json to_json() const;
};

const std::vector<std::string>& experiment_kinds();

/// Parameter defaults for a kind; null marks a required parameter.
nlohmann::json default_params(const std::string& kind);

/// Defaults overlaid with the given parameters; unknown or missing
/// required keys raise a DomainError.
nlohmann::json resolve_params(const std::string& kind, const nlohmann::json& params);

struct RunArtifacts {
    nlohmann::json config;   // resolved
    nlohmann::json summary = nlohmann::json::object();
    CsvTable data;
    int status = 0;          // 0 ok, 2 validation, 3 numerical
};

/// Runs in memory. Errors are recorded in summary["error"] and the status;
/// whatever was computed before the failure is kept.
RunArtifacts run_in_memory(const ExperimentConfig& cfg);

/// run_in_memory plus the three output files; returns the exit status.
int run(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace expwalk
