#pragma once

#include "shardq/circuit.hpp"
#include "shardq/statevector.hpp"
#include "shardq/types.hpp"

namespace shardq {

// One depolarizing trajectory: after each two-qubit gate, with probability p a
// uniformly random non-identity two-qubit Pauli is inserted (15 choices).
Circuit apply_depolarizing_noise(const Circuit& c, double p, Rng& rng);

// Shot-sampled counts under trajectory noise. Shots sharing an insertion
// pattern reuse one exact simulation, so the cost stays proportional to the
// number of distinct corrupted patterns plus one clean run.
CountsTable sample_counts_noisy(const Circuit& c, double p, long long shots,
                                std::uint64_t seed, const SimLimits& limits = {});

}  // namespace shardq
