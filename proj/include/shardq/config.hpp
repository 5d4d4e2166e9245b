#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "shardq/cutting.hpp"

namespace shardq {

struct PipelineConfig {
    int n_addr = 2;
    int n_data = 1;
    int max_cuts = -1;  // -1: default to n_data
    std::string mode = "analytic";  // analytic | sampled
    long long shots = 10000;
    std::uint64_t seed = 1234;
    double noise_p = 0.0;
    std::string backend = "statevector";  // statevector | mps
    int chi_max = 64;
    double svd_cutoff = 1e-12;
    std::string strategy = "gate_cut";  // gate_cut | pauli_table
    bool aqc_enabled = false;
    double epsilon = 1e-3;
    std::string distance_mode = "virtual_abs";  // virtual_abs | physical_shortest_path
    std::string shot_allocation = "uniform";    // uniform | importance
    int parallelism = 1;
    double virtual_shots = 1e6;
    int qubit_cap = 24;
    std::string input_path;
    std::string output_dir = ".";
    std::string coupling_map_path;

    int effective_max_cuts() const { return max_cuts < 0 ? n_data : max_cuts; }
    CutStrategy cut_strategy() const;
    DistanceMode dist_mode() const;
    void validate() const;
};

// Flat key=value text document; unknown keys are rejected so config echoes
// stay replayable.
PipelineConfig config_from_text(const std::string& text);
std::string config_to_text(const PipelineConfig& config);
PipelineConfig load_config_file(const std::string& path);
void save_config_file(const std::string& path, const PipelineConfig& config);

}  // namespace shardq
