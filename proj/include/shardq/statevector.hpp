#pragma once

#include <map>
#include <string>

#include "shardq/circuit.hpp"
#include "shardq/types.hpp"

namespace shardq {

struct StateVector {
    int num_qubits = 0;
    Vector amplitudes;

    static StateVector zero(int num_qubits);
    double norm() const { return amplitudes.norm(); }
    cxd amplitude(const std::string& bits) const;
};

void apply_gate(StateVector& state, const GateOp& op);

struct CountsTable {
    long long shots = 0;
    std::map<std::string, long long> counts;
    std::string bit_order = "clbit0_left";

    long long total() const {
        long long t = 0;
        for (const auto& [k, v] : counts) t += v;
        return t;
    }
};

using Distribution = std::map<std::string, double>;  // clbit string -> probability

struct SimLimits {
    int max_qubits = 24;
    int max_mid_measures = 16;
};

// Pure unitary evolution from |0...0>; rejects MeasureZ/PrepareState ops.
StateVector simulate_statevector(const Circuit& c, const SimLimits& limits = {});

// Exact joint distribution over the classical register. Mid-circuit MeasureZ
// collapses per the Born rule (branching over both outcomes); PrepareState
// resets the qubit. Trailing measurements are read out without branching.
Distribution simulate_distribution(const Circuit& c, const SimLimits& limits = {});

// Multinomial draw from simulate_distribution; deterministic in the seed.
CountsTable sample_counts(const Circuit& c, long long shots, std::uint64_t seed,
                          const SimLimits& limits = {});

CountsTable sample_from_distribution(const Distribution& dist, int num_clbits,
                                     long long shots, Rng& rng);

std::string reverse_key(const std::string& key);

}  // namespace shardq
