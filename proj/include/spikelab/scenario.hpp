#pragma once

#include <string>
#include <vector>

#include "spikelab/models.hpp"

namespace spikelab::scenario {

/// One CLI invocation: a command, a model, command-specific options and an
/// output directory. Round-trips through JSON identically; unknown fields
/// are rejected.
struct Scenario {
    std::string name;
    std::string command; // core | spectrum | thresholds | phase-diagram |
                         // simulate | continue | atlas | overlay | verify
    models::ModelSpec model;
    bool has_model = false;
    nlohmann::json options = nlohmann::json::object();
    std::string out = "out";

    nlohmann::json to_json() const;
    static Scenario from_json(const nlohmann::json& j);
};

struct RunResult {
    int exit_code = 0; // 0 ok, 2 config, 3 solver, 4 regime mismatch
    std::vector<std::string> outputs; // files written (relative to out)
    std::string error_kind, error_message;
};

/// Executes a scenario, writing artifacts and a manifest.json under
/// scenario.out. Deterministic: rerunning reproduces byte-identical CSVs.
RunResult run(const Scenario& s);

/// Maps an error kind to the CLI exit code.
int exit_code_for(const std::string& kind);

} // namespace spikelab::scenario
