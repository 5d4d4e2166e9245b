#pragma once

#include <vector>

#include "shardq/circuit.hpp"
#include "shardq/cutting.hpp"
#include "shardq/mps.hpp"
#include "shardq/types.hpp"

namespace shardq {

// Nearest-neighbor two-qubit block: Ry,Rz on each qubit, a CX, Ry,Rz on each
// qubit again - 8 parameters. Parameter order per block:
// [pre_lo_ry, pre_lo_rz, pre_hi_ry, pre_hi_rz,
//  post_lo_ry, post_lo_rz, post_hi_ry, post_hi_rz]
struct AnsatzBlock {
    int q_lo = 0;
    int q_hi = 1;
    bool control_lo = true;  // CX direction
};

struct Ansatz {
    int num_qubits = 0;
    std::vector<AnsatzBlock> blocks;
    std::vector<double> theta0;

    std::size_t parameter_count() const { return blocks.size() * 8; }
    Circuit to_circuit(const std::vector<double>& theta) const;
};

struct PrefixSplit {
    Circuit c1;        // prefix including cut gates
    Circuit c1_trunc;  // prefix minus cut gates
    std::vector<GateOp> cut_gates;
    Circuit c2;        // suffix
};

// Prefix boundary sits just after the last cut gate; concatenating
// c1_trunc ++ cut_gates ++ c2 reassembles the original op order whenever the
// cut gates close the prefix (always true for a single cut).
PrefixSplit split_prefix_suffix(const Circuit& circuit, const CutPlan& plan);

// Constructive ansatz over C1_trunc: every gate is absorbed into a block and
// the returned theta0 reproduces the truncated prefix up to global phase
// (verified to 1e-9). refine_rounds appends identity CX-pair blocks per
// adjacent pair to give the optimizer headroom.
Ansatz build_ansatz(const Circuit& c1_trunc, int refine_rounds = 1);

double infidelity(const Ansatz& ansatz, const std::vector<double>& theta,
                  const MpsState& target);
std::vector<double> infidelity_gradient(const Ansatz& ansatz,
                                        const std::vector<double>& theta,
                                        const MpsState& target);
std::vector<double> finite_difference_gradient(const Ansatz& ansatz,
                                               const std::vector<double>& theta,
                                               const MpsState& target,
                                               double h = 1e-5);

struct OptimizerTracePoint {
    int iteration;
    double loss;
    double step;
};

struct CompilationResult {
    std::vector<double> optimized_parameters;
    double final_infidelity = 1.0;
    int iterations = 0;
    Circuit compiled_circuit;  // C2 * cut_gates * ansatz(theta*)
    std::vector<int> cut_indices_in_compiled;
    std::vector<OptimizerTracePoint> trace;
};

struct OptimizeOptions {
    double epsilon = 1e-3;
    int max_iters = 500;
    double initial_step = 0.1;
    double armijo_c = 1e-4;
    double shrink = 0.5;
};

CompilationResult optimize(const Ansatz& ansatz, const MpsState& target,
                           const PrefixSplit& split, const OptimizeOptions& opts);

Circuit assemble_compiled(const Ansatz& ansatz, const std::vector<double>& theta,
                          const PrefixSplit& split);

std::string trace_to_csv(const std::vector<OptimizerTracePoint>& trace);

}  // namespace shardq
