#include "shardq/circuit.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace shardq {

bool is_rotation(GateKind k) {
    return k == GateKind::Rx || k == GateKind::Ry || k == GateKind::Rz;
}

bool is_two_qubit(GateKind k) { return k == GateKind::CX || k == GateKind::CZ; }

bool is_unitary_gate(GateKind k) {
    return k != GateKind::MeasureZ && k != GateKind::PrepareState;
}

const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::S: return "S";
        case GateKind::Sdg: return "SDG";
        case GateKind::Rx: return "RX";
        case GateKind::Ry: return "RY";
        case GateKind::Rz: return "RZ";
        case GateKind::CX: return "CX";
        case GateKind::CZ: return "CZ";
        case GateKind::MeasureZ: return "MEASURE";
        case GateKind::PrepareState: return "PREPARE";
    }
    return "?";
}

const char* state_label_name(StateLabel s) {
    switch (s) {
        case StateLabel::Zero: return "zero";
        case StateLabel::One: return "one";
        case StateLabel::Plus: return "plus";
        case StateLabel::Minus: return "minus";
        case StateLabel::PlusI: return "plus_i";
        case StateLabel::MinusI: return "minus_i";
    }
    return "?";
}

void Circuit::add(GateOp op) {
    if (op.q0 < 0 || op.q0 >= num_qubits)
        throw std::invalid_argument("qubit index out of range");
    if (is_two_qubit(op.kind)) {
        if (op.q1 < 0 || op.q1 >= num_qubits)
            throw std::invalid_argument("qubit index out of range");
        if (op.q1 == op.q0)
            throw std::invalid_argument("two-qubit gate needs distinct qubits");
    }
    if (is_rotation(op.kind) && !std::isfinite(op.angle))
        throw std::invalid_argument("rotation angle must be finite");
    if (op.kind == GateKind::MeasureZ && (op.clbit < 0 || op.clbit >= num_clbits))
        throw std::invalid_argument("measure needs a valid clbit");
    ops.push_back(op);
}

int Circuit::count(GateKind k) const {
    int n = 0;
    for (const auto& op : ops)
        if (op.kind == k) ++n;
    return n;
}

bool Circuit::has_midcircuit_ops() const {
    bool seen_nonunitary = false;
    for (const auto& op : ops) {
        if (!is_unitary_gate(op.kind)) {
            seen_nonunitary = true;
        } else if (seen_nonunitary) {
            return true;
        }
    }
    // A measured qubit that is measured again also counts as mid-circuit.
    return false;
}

Circuit Circuit::without_measurements() const {
    Circuit c(num_qubits, num_clbits);
    for (const auto& op : ops)
        if (op.kind != GateKind::MeasureZ) c.ops.push_back(op);
    return c;
}

std::vector<int> Circuit::measured_clbit_of_qubit() const {
    std::vector<int> m(static_cast<std::size_t>(num_qubits), -1);
    for (const auto& op : ops)
        if (op.kind == GateKind::MeasureZ) m[static_cast<std::size_t>(op.q0)] = op.clbit;
    return m;
}

namespace {

std::string format_angle(double a) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", a);
    return buf;
}

StateLabel state_label_from_name(const std::string& s) {
    static const std::map<std::string, StateLabel> table = {
        {"zero", StateLabel::Zero},   {"one", StateLabel::One},
        {"plus", StateLabel::Plus},   {"minus", StateLabel::Minus},
        {"plus_i", StateLabel::PlusI}, {"minus_i", StateLabel::MinusI},
    };
    auto it = table.find(s);
    if (it == table.end()) throw std::invalid_argument("unknown state label: " + s);
    return it->second;
}

GateKind gate_kind_from_name(const std::string& s) {
    static const std::map<std::string, GateKind> table = {
        {"H", GateKind::H},   {"X", GateKind::X},     {"Y", GateKind::Y},
        {"Z", GateKind::Z},   {"S", GateKind::S},     {"SDG", GateKind::Sdg},
        {"RX", GateKind::Rx}, {"RY", GateKind::Ry},   {"RZ", GateKind::Rz},
        {"CX", GateKind::CX}, {"CZ", GateKind::CZ},   {"MEASURE", GateKind::MeasureZ},
        {"PREPARE", GateKind::PrepareState},
    };
    auto it = table.find(s);
    if (it == table.end()) throw std::invalid_argument("unknown gate: " + s);
    return it->second;
}

}  // namespace

std::string circuit_to_text(const Circuit& c) {
    std::ostringstream out;
    out << "qubits " << c.num_qubits << " clbits " << c.num_clbits << "\n";
    for (const auto& op : c.ops) {
        out << gate_name(op.kind) << ' ' << op.q0;
        if (is_two_qubit(op.kind)) out << ',' << op.q1;
        if (is_rotation(op.kind)) out << ' ' << format_angle(op.angle);
        if (op.kind == GateKind::MeasureZ) out << ' ' << op.clbit;
        if (op.kind == GateKind::PrepareState) out << ' ' << state_label_name(op.state);
        out << '\n';
    }
    return out.str();
}

Circuit circuit_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    if (!(in >> word) || word != "qubits")
        throw std::invalid_argument("circuit text must start with a qubits header");
    int nq = 0, nc = 0;
    if (!(in >> nq >> word >> nc) || word != "clbits")
        throw std::invalid_argument("malformed circuit header");
    Circuit c(nq, nc);
    std::string line;
    std::getline(in, line);  // rest of header line
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string name;
        if (!(ls >> name)) continue;
        GateKind kind = gate_kind_from_name(name);
        std::string qs;
        ls >> qs;
        GateOp op{kind, 0};
        auto comma = qs.find(',');
        if (comma != std::string::npos) {
            op.q0 = std::stoi(qs.substr(0, comma));
            op.q1 = std::stoi(qs.substr(comma + 1));
        } else {
            op.q0 = std::stoi(qs);
        }
        if (is_rotation(kind)) {
            ls >> op.angle;
        } else if (kind == GateKind::MeasureZ) {
            ls >> op.clbit;
        } else if (kind == GateKind::PrepareState) {
            std::string label;
            ls >> label;
            op.state = state_label_from_name(label);
        }
        c.add(op);
    }
    return c;
}

}  // namespace shardq
