#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

namespace thermo {

// One experiment: a command, its map or system, parameters with defaults
// filled in, and the seed for stochastic commands.  Thread count and output
// path are run settings and are not part of the reproducible config.
struct ExperimentConfig {
    std::string command;
    nlohmann::json map;
    nlohmann::json params = nlohmann::json::object();
    std::optional<std::uint64_t> seed;
    int threads = 0;  // 0 means THERMO_THREADS or machine parallelism
    std::string output;

    nlohmann::json to_json() const;
    // Validates the command, rejects unknown fields and fills defaults.
    static ExperimentConfig from_json(const nlohmann::json& j);
};

struct Artifact {
    std::string text;
    std::string content_sha256;
};

Artifact run_experiment(const ExperimentConfig& config);

// JSON text with numbers in 17 significant digits and sorted keys.
std::string dump_json(const nlohmann::json& j);

std::string sha256_hex(const std::string& data);

// Exit codes: 0 success, 2 validation error, 3 budget or convergence error.
int run_cli(int argc, char** argv);

}  // namespace thermo
