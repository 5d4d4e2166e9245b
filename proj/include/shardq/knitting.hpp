#pragma once

#include <map>
#include <string>
#include <vector>

#include "shardq/circuit.hpp"
#include "shardq/cutting.hpp"
#include "shardq/statevector.hpp"
#include "shardq/types.hpp"

namespace shardq {

struct Subexperiment {
    std::string job_label;
    std::vector<int> setting_ids;            // per cut
    std::vector<Circuit> fragment_circuits;  // spliced, global clbit indices
    int n_obs_bits = 0;
    int n_qpd_bits = 0;
};

// One signed post-processing row: reads the job's counts, weights them by the
// coefficient and by the parity of the masked qpd bits.
struct KnitEntry {
    std::string job_label;
    double coefficient = 1.0;
    std::string parity_mask;  // over qpd bits; '1' marks signing bits
};

struct MaterializedCuts {
    std::vector<Subexperiment> subexperiments;  // 6^M for CX/CZ cuts
    std::vector<KnitEntry> entries;             // 6^M gate_cut, 8^M pauli_table
    int n_obs_bits = 0;
};

MaterializedCuts materialize_subexperiments(const Circuit& circuit,
                                            const CutPlan& plan);

struct JobResult {
    std::string job_label;
    double shots = 0;                      // virtual budget in analytic mode
    std::map<std::string, double> counts;  // key: obs bits ++ qpd bits
};

struct RunMode {
    enum Kind { Analytic, Sampled } kind = Analytic;
    long long shots = 10000;         // per subexperiment, sampled mode
    std::uint64_t seed = 0;
    double noise_p = 0.0;            // depolarizing trajectory noise, sampled mode
    double virtual_shots = 1e6;      // analytic scale
    bool use_mps = false;            // MPS backend for mid-measurement-free fragments
    int chi_max = 64;
    double svd_cutoff = 1e-12;

    static RunMode analytic(double virtual_shots = 1e6) {
        RunMode m;
        m.kind = Analytic;
        m.virtual_shots = virtual_shots;
        return m;
    }
    static RunMode sampled(long long shots, std::uint64_t seed, double noise_p = 0.0) {
        RunMode m;
        m.kind = Sampled;
        m.shots = shots;
        m.seed = seed;
        m.noise_p = noise_p;
        return m;
    }
};

// Independent execution of every subexperiment; results are ordered by job
// label no matter how many workers run. shot_weights, when given, splits the
// total sampled budget (shots * #jobs) proportionally instead of uniformly.
std::vector<JobResult> run_subexperiments(const std::vector<Subexperiment>& subs,
                                          const RunMode& mode, int parallelism = 1,
                                          const SimLimits& limits = {},
                                          const std::vector<double>* shot_weights = nullptr);

// Per-job sum of |coefficient| over the entries reading each job, in
// subexperiment order: the importance weights for shot allocation.
std::vector<double> job_importance_weights(const MaterializedCuts& mats);

int parity(const std::string& bits);  // (-1)^{number of '1's}; "" -> +1

struct QuasiDistribution {
    std::map<std::string, double> values;  // keys carry the reversed bit order
    int n_obs_bits = 0;
};

struct KnitResult {
    QuasiDistribution quasi;  // pre-clamp
    CountsTable counts;       // clamped, rounded half-up
};

KnitResult reconstruct_global_counts(const std::vector<JobResult>& results,
                                     const std::vector<KnitEntry>& entries,
                                     int n_obs_bits);

// Expectation of a tensor product of Z/I factors over the observable bits,
// e.g. "ZIZ". Clamping never touches this path.
double knit_expectation(const std::vector<JobResult>& results,
                        const std::vector<KnitEntry>& entries,
                        const std::string& observable);

// JSON round-trip for a result batch.
std::string job_results_to_json(const std::vector<JobResult>& results);
std::vector<JobResult> job_results_from_json(const std::string& text);
std::string quasi_to_csv(const QuasiDistribution& quasi);

}  // namespace shardq
