#pragma once

#include <array>
#include <vector>

#include "shardq/circuit.hpp"
#include "shardq/statevector.hpp"
#include "shardq/types.hpp"

namespace shardq {

// Chain of rank-3 site tensors stored as one (left x right) matrix per
// physical value. Boundary bonds have dimension 1.
// Mixed canonical gauge: sites left of `center` are left-orthonormal, sites
// right of it right-orthonormal, so two-site updates see the physical Schmidt
// spectrum and truncation stays locally optimal.
struct MpsState {
    int num_qubits = 0;
    std::vector<std::array<Matrix, 2>> sites;
    int center = 0;
    int chi_max = 64;
    double svd_cutoff = 1e-12;
    double discarded_weight = 0.0;  // cumulative truncated singular weight
    int max_bond_reached = 1;

    std::vector<int> bond_dims() const;
    int max_bond() const;
};

MpsState mps_from_zero(int num_qubits, int chi_max = 64, double svd_cutoff = 1e-12);

// Single-qubit gates contract locally; adjacent two-qubit gates contract,
// SVD-split, truncate and renormalize. Non-adjacent pairs are routed with
// SWAP chains and routed back.
void mps_apply(MpsState& state, const GateOp& op);

MpsState simulate_mps(const Circuit& circuit, int chi_max = 64,
                      double svd_cutoff = 1e-12);

cxd mps_amplitude(const MpsState& state, const std::string& basis_string);
cxd mps_overlap(const MpsState& a, const MpsState& b);  // <a|b>
double mps_fidelity(const MpsState& a, const MpsState& b);
double mps_fidelity(const MpsState& a, const StateVector& b);

StateVector mps_to_statevector(const MpsState& state);

// Left-canonical sweep followed by normalization.
void mps_canonicalize(MpsState& state);

double mps_norm(const MpsState& state);

// Debug dump of the bond-dimension profile.
std::string bond_profile_csv(const MpsState& state);

}  // namespace shardq
