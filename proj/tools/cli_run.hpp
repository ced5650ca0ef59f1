#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cli_config.hpp"

namespace fpp::cli {

struct OutputRecord {
    std::string file;
    std::string digest;  // fnv1a64 hex of the file bytes
};

struct RunManifest {
    std::string tool = "fpp";
    std::string version;
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> config;
    double wall_time_s = 0.0;
    std::vector<OutputRecord> outputs;

    std::string to_json() const;
};

// Executes the subcommand, writes its data files plus run_manifest.json under
// config.out, and returns the manifest. Identical configs produce
// byte-identical data files for any worker count.
RunManifest run(const ExperimentConfig& config);

// FNV-1a 64-bit content digest (reproducibility fingerprint, not a
// cryptographic hash).
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace fpp::cli
