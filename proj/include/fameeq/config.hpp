// SPDX-License-Identifier: Apache-2.0
//
// YAML configuration files. Every SimConfig field is addressable; unknown
// keys are rejected. See configs/*.yaml and the README for the schema.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fameeq/simkit.hpp"

namespace fameeq {

/// Variance-law check: random Rayleigh instances, analytic NPI variance
/// versus Monte-Carlo MSE of the unbiased estimate.
struct MseCheckConfig {
    std::size_t instances = 20;
    std::size_t antennas = 32;
    std::size_t users = 4;
    std::size_t draws = 100000;
    double snr_db = 0.0;
    std::vector<int> bits{1, 2, 3};
    double tolerance = 0.03;
    std::uint64_t seed = 1;
};

/// Brute-force optimum versus FL-MMSE and FAME-FBS objectives.
struct OracleGapConfig {
    std::size_t instances = 50;
    std::size_t antennas = 4;
    std::size_t users = 2;
    int bits = 1;
    double snr_db = 10.0;
    FbsSchedule fbs;
    std::uint64_t seed = 1;
};

struct FileConfig {
    SimConfig sim;
    MseCheckConfig mse_check;
    OracleGapConfig oracle_gap;
    bool has_sim = false;  // an `equalizers` or `snr_db` key was present
};

/// Throws ConfigError whose message starts with "<source>:<line>: ".
FileConfig parse_config(const std::string& text, const std::string& source = "<config>");
FileConfig load_config(const std::string& path);

/// Default FBS schedule from the command line form "NAME,bits".
EqualizerSpec parse_equalizer_flag(const std::string& flag);

}  // namespace fameeq
