#include "shardq/gates.hpp"

#include <cmath>

namespace shardq {

namespace {
const cxd kI(0.0, 1.0);

Matrix mat2(cxd a, cxd b, cxd c, cxd d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}
}  // namespace

Matrix pauli_matrix(char p) {
    switch (p) {
        case 'I': return Matrix::Identity(2, 2);
        case 'X': return mat2(0, 1, 1, 0);
        case 'Y': return mat2(0, -kI, kI, 0);
        case 'Z': return mat2(1, 0, 0, -1);
    }
    throw std::invalid_argument("unknown Pauli label");
}

Vector state_vector(StateLabel s) {
    Vector v(2);
    const double r = 1.0 / std::sqrt(2.0);
    switch (s) {
        case StateLabel::Zero: v << 1, 0; break;
        case StateLabel::One: v << 0, 1; break;
        case StateLabel::Plus: v << r, r; break;
        case StateLabel::Minus: v << r, -r; break;
        case StateLabel::PlusI: v << r, r * kI; break;
        case StateLabel::MinusI: v << r, -r * kI; break;
    }
    return v;
}

Matrix gate_matrix(GateKind kind, double angle) {
    const double r = 1.0 / std::sqrt(2.0);
    switch (kind) {
        case GateKind::H: return r * mat2(1, 1, 1, -1);
        case GateKind::X: return pauli_matrix('X');
        case GateKind::Y: return pauli_matrix('Y');
        case GateKind::Z: return pauli_matrix('Z');
        case GateKind::S: return mat2(1, 0, 0, kI);
        case GateKind::Sdg: return mat2(1, 0, 0, -kI);
        case GateKind::Rx: {
            double c = std::cos(angle / 2), s = std::sin(angle / 2);
            return mat2(c, -kI * s, -kI * s, c);
        }
        case GateKind::Ry: {
            double c = std::cos(angle / 2), s = std::sin(angle / 2);
            return mat2(c, -s, s, c);
        }
        case GateKind::Rz: {
            cxd e = std::exp(-kI * (angle / 2));
            return mat2(e, 0, 0, std::conj(e));
        }
        case GateKind::CX: {
            Matrix m = Matrix::Zero(4, 4);
            m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
            return m;
        }
        case GateKind::CZ: {
            Matrix m = Matrix::Identity(4, 4);
            m(3, 3) = -1;
            return m;
        }
        case GateKind::MeasureZ:
            // Z-measurement element P0 = |0><0|, used for channel checks.
            return mat2(1, 0, 0, 0);
        case GateKind::PrepareState:
            throw std::invalid_argument("PrepareState has no matrix");
    }
    throw std::invalid_argument("unknown gate kind");
}

Matrix gate_matrix(const GateOp& op) {
    if (is_rotation(op.kind)) return gate_matrix(op.kind, op.angle);
    return gate_matrix(op.kind);
}

double phase_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("shape mismatch");
    // Align phases on the largest entry of b, then compare.
    Eigen::Index i = 0, j = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < b.rows(); ++r)
        for (Eigen::Index c = 0; c < b.cols(); ++c)
            if (std::abs(b(r, c)) > best) {
                best = std::abs(b(r, c));
                i = r;
                j = c;
            }
    if (best < 1e-300) return a.cwiseAbs().maxCoeff();
    cxd lambda = a(i, j) / b(i, j);
    double mag = std::abs(lambda);
    if (mag < 1e-300) return (a - b).cwiseAbs().maxCoeff();
    lambda /= mag;  // unit phase only
    return (a - lambda * b).cwiseAbs().maxCoeff();
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

namespace {

Matrix product(const std::vector<Matrix>& factors) {
    Matrix m = Matrix::Identity(2, 2);
    for (const auto& f : factors) m = m * f;
    return m;
}

Matrix plane_reflection(char p, char q) {
    // (P+Q)/sqrt(2): the Hadamard-like involution for the R_{PQ} rows.
    return (pauli_matrix(p) + pauli_matrix(q)) / std::sqrt(2.0);
}

Matrix plus_projector(const Matrix& obs) {
    return (Matrix::Identity(2, 2) + obs) / 2.0;
}

}  // namespace

std::vector<CliffordRowCheck> verify_clifford_table(double tol) {
    const Matrix H = gate_matrix(GateKind::H);
    const Matrix S = gate_matrix(GateKind::S);
    const Matrix Sdg = gate_matrix(GateKind::Sdg);
    const Matrix Z = pauli_matrix('Z');
    const Matrix P0 = gate_matrix(GateKind::MeasureZ);

    struct Row {
        std::string name;
        Matrix lhs;
        std::vector<Matrix> rhs;
        bool projective;
    };
    const double q = -kPi / 2;  // the table's R_P rows are the -pi/2 rotations
    std::vector<Row> rows = {
        {"X", pauli_matrix('X'), {H, Z, H}, false},
        {"Y", pauli_matrix('Y'), {H, Z, H, Z}, false},
        {"Z", Z, {S, S}, false},
        {"R_X", gate_matrix(GateKind::Rx, q), {H, Sdg, H}, false},
        {"R_Y", gate_matrix(GateKind::Ry, q), {S, H, Sdg, H, Sdg}, false},
        {"R_Z", gate_matrix(GateKind::Rz, q), {Sdg}, false},
        {"R_YZ", plane_reflection('Y', 'Z'), {H, Sdg, H, Z}, false},
        {"R_ZX", plane_reflection('Z', 'X'), {Sdg, H, Sdg, H, Sdg}, false},
        {"R_XY", plane_reflection('X', 'Y'), {H, Z, H, Sdg}, false},
        {"PiX", plus_projector(pauli_matrix('X')),
         {S, H, S, H, P0, H, Sdg, H, Sdg}, true},
        {"PiY", plus_projector(pauli_matrix('Y')), {H, Sdg, H, P0, H, S, H}, true},
        {"PiZ", P0, {P0}, true},
        {"Pi_YZ", plus_projector(plane_reflection('Y', 'Z')),
         {S, H, S, H, P0, H, S, H, Sdg}, true},
        {"Pi_ZX", plus_projector(plane_reflection('Z', 'X')),
         {H, Sdg, H, P0, H, S, H, Z}, true},
        {"Pi_XY", plus_projector(plane_reflection('X', 'Y')), {P0, H, Z, H}, true},
    };

    std::vector<CliffordRowCheck> report;
    report.reserve(rows.size());
    for (const auto& row : rows) {
        Matrix rhs = product(row.rhs);
        double err;
        if (row.projective) {
            // Channel-element comparison: the Kraus element defined by the row
            // must match the projector up to phase.
            err = phase_distance(rhs, row.lhs);
        } else {
            err = phase_distance(row.lhs, rhs);
        }
        report.push_back({row.name, row.projective, err, err < tol});
    }
    return report;
}

}  // namespace shardq
