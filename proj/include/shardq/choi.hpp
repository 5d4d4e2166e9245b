#pragma once

#include "shardq/cutting.hpp"
#include "shardq/types.hpp"

namespace shardq {

// Choi matrix sum_{ab} |a><b| (x) E(|a><b|) of the channel rho -> U rho U^dg.
Matrix choi_of_unitary(const Matrix& u);

// Choi matrix of the weighted channel sum described by a cut expansion on
// num_slots qubits. MeasureZ ops become signed (parity-masked) or unsigned
// projective sums, PrepareState becomes a reset, keep_gate appends the cut
// gate (CX over slots 0,1) after the splice.
Matrix choi_of_expansion(const CutExpansion& expansion);

// Hermitian-preserving map applied to one operator: used by both the oracle
// and the conformance report.
Matrix apply_term_channel(const CutSetting& setting, unsigned parity_mask,
                          int num_slots, const Matrix& rho);

double choi_distance(const Matrix& a, const Matrix& b);

}  // namespace shardq
