#pragma once

#include <string>
#include <vector>

#include "shardq/circuit.hpp"
#include "shardq/types.hpp"

namespace shardq {

// Unitary (or projector, for measurement elements) of a single gate. Two-qubit
// matrices are 4x4 over |q0 q1> with q0 the most significant local bit.
Matrix gate_matrix(GateKind kind, double angle = 0.0);
Matrix gate_matrix(const GateOp& op);

Matrix pauli_matrix(char p);  // 'I','X','Y','Z'
Vector state_vector(StateLabel s);

// |a - lambda*b|_max minimized over a unit phase lambda; 0 means equal up to
// global phase.
double phase_distance(const Matrix& a, const Matrix& b);

Matrix kron(const Matrix& a, const Matrix& b);

struct CliffordRowCheck {
    std::string name;
    bool is_projective;  // row mixes unitaries with the Z-measurement element
    double error;        // phase_distance between the two sides
    bool pass;
};

// Checks every row of the Clifford decomposition table used by the cutting
// module: unitary rows up to global phase, projective rows as channel elements.
std::vector<CliffordRowCheck> verify_clifford_table(double tol = 1e-10);

}  // namespace shardq
