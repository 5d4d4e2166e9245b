#pragma once

#include <string>
#include <vector>

#include "shardq/aqc.hpp"
#include "shardq/config.hpp"
#include "shardq/cutting.hpp"
#include "shardq/encoder.hpp"
#include "shardq/knitting.hpp"
#include "shardq/pgm.hpp"

namespace shardq {

// Stage-tagged failure: the exit code identifies the pipeline stage family.
struct StageError : std::runtime_error {
    int exit_code;
    StageError(int code, const std::string& stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), exit_code(code) {}
};

inline constexpr int kExitConfig = 2;
inline constexpr int kExitEncode = 3;
inline constexpr int kExitCut = 4;
inline constexpr int kExitExecute = 5;
inline constexpr int kExitReconstruct = 6;
inline constexpr int kExitDecode = 7;
inline constexpr int kExitVerify = 8;

struct BenchRecord {
    int cut_count = 0;
    std::string strategy;
    long long subexperiment_count = 1;
    long long shots = 0;
    double rmse = 0.0;
    double rvf = 1.0;
    double wall_time_s = 0.0;
};

std::string bench_csv_header();
std::string bench_csv_row(const BenchRecord& r);

struct PipelineOutput {
    std::vector<double> decoded;
    BenchRecord record;
    KnitResult knit;
    CutPlan plan;
    std::vector<CutCandidate> candidates;
    std::vector<JobResult> results;
    AnglePayload payload;
    double aqc_infidelity = 0.0;
    std::vector<OptimizerTracePoint> aqc_trace;
    std::vector<std::string> warnings;
};

// encode -> sparse_cut_select -> (optional aqc) -> materialize -> run ->
// reconstruct -> decode.
PipelineOutput run_pipeline(const PipelineConfig& config,
                            const std::vector<double>& data);

// Reference path with no cutting machinery: direct simulation plus decode,
// honoring mode/noise/backend.
std::vector<double> run_direct(const PipelineConfig& config,
                               const std::vector<double>& data);

struct ImageOutput {
    PgmImage reconstructed;
    BenchRecord record;
    int padded_values = 0;
};

ImageOutput run_image(const PipelineConfig& config, const PgmImage& input);

struct AblationRow {
    int cut_count = 0;
    std::string strategy;
    long long subexperiments = 1;
    long long shots_per_job = 0;
    int seeds = 0;
    double rmse_mean = 0.0;
    double rmse_std = 0.0;
    double uncut_rmse_mean = 0.0;
    double uncut_rmse_std = 0.0;
    int wins = 0;  // seeds where the cut pipeline beat the uncut baseline
    double improvement_rel_mean = 0.0;
    double wall_time_s = 0.0;
};

std::string ablation_csv_header();
std::string ablation_csv_row(const AblationRow& r);

// Per cut count: noisy cut pipeline vs noisy uncut baseline over `seeds`
// seeds, plus a repeat-normalized wall-time measurement (median of 3) of the
// materialize/run/reconstruct stage.
std::vector<AblationRow> run_ablation(const PipelineConfig& config,
                                      const std::vector<double>& data,
                                      const std::vector<int>& cut_range,
                                      int seeds);

double rmse(const std::vector<double>& a, const std::vector<double>& b);
double pearson(const std::vector<double>& a, const std::vector<double>& b);

std::string data_to_csv(const std::vector<double>& data);
std::vector<double> data_from_csv(const std::string& text);

std::string counts_to_text(const CountsTable& counts);

}  // namespace shardq
