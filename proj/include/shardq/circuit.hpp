#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shardq/types.hpp"

namespace shardq {

enum class GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    Rx,
    Ry,
    Rz,
    CX,
    CZ,
    MeasureZ,
    PrepareState,
};

enum class StateLabel { Zero, One, Plus, Minus, PlusI, MinusI };

bool is_rotation(GateKind k);
bool is_two_qubit(GateKind k);
bool is_unitary_gate(GateKind k);
const char* gate_name(GateKind k);
const char* state_label_name(StateLabel s);

struct GateOp {
    GateKind kind;
    int q0 = 0;
    int q1 = -1;                 // second qubit for CX/CZ
    double angle = 0.0;          // rotation kinds only
    int clbit = -1;              // MeasureZ only
    StateLabel state = StateLabel::Zero;  // PrepareState only

    static GateOp h(int q) { return {GateKind::H, q}; }
    static GateOp x(int q) { return {GateKind::X, q}; }
    static GateOp y(int q) { return {GateKind::Y, q}; }
    static GateOp z(int q) { return {GateKind::Z, q}; }
    static GateOp s(int q) { return {GateKind::S, q}; }
    static GateOp sdg(int q) { return {GateKind::Sdg, q}; }
    static GateOp rx(int q, double a) { return {GateKind::Rx, q, -1, a}; }
    static GateOp ry(int q, double a) { return {GateKind::Ry, q, -1, a}; }
    static GateOp rz(int q, double a) { return {GateKind::Rz, q, -1, a}; }
    static GateOp cx(int control, int target) { return {GateKind::CX, control, target}; }
    static GateOp cz(int a, int b) { return {GateKind::CZ, a, b}; }
    static GateOp measure(int q, int clbit) {
        GateOp op{GateKind::MeasureZ, q};
        op.clbit = clbit;
        return op;
    }
    static GateOp prepare(int q, StateLabel s) {
        GateOp op{GateKind::PrepareState, q};
        op.state = s;
        return op;
    }
};

struct Circuit {
    int num_qubits = 0;
    int num_clbits = 0;
    std::vector<GateOp> ops;

    Circuit() = default;
    Circuit(int nq, int nc) : num_qubits(nq), num_clbits(nc) {}

    void add(GateOp op);
    int count(GateKind k) const;
    bool has_midcircuit_ops() const;  // MeasureZ/PrepareState before the last unitary
    Circuit without_measurements() const;
    std::vector<int> measured_clbit_of_qubit() const;
};

// Line-oriented text format, one op per line after a `qubits N clbits M` header.
// Angles print with 17 significant digits so the round-trip is bit exact.
std::string circuit_to_text(const Circuit& c);
Circuit circuit_from_text(const std::string& text);

}  // namespace shardq
