#include "shardq/mps.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "shardq/gates.hpp"

namespace shardq {

std::vector<int> MpsState::bond_dims() const {
    std::vector<int> dims;
    for (std::size_t i = 0; i + 1 < sites.size(); ++i)
        dims.push_back(static_cast<int>(sites[i][0].cols()));
    return dims;
}

int MpsState::max_bond() const {
    int m = 1;
    for (int d : bond_dims()) m = std::max(m, d);
    return m;
}

MpsState mps_from_zero(int num_qubits, int chi_max, double svd_cutoff) {
    if (num_qubits < 1) throw std::invalid_argument("need at least one qubit");
    MpsState s;
    s.num_qubits = num_qubits;
    s.chi_max = chi_max;
    s.svd_cutoff = svd_cutoff;
    for (int q = 0; q < num_qubits; ++q) {
        std::array<Matrix, 2> site;
        site[0] = Matrix::Ones(1, 1);
        site[1] = Matrix::Zero(1, 1);
        s.sites.push_back(site);
    }
    return s;
}

namespace {

void apply_1q(MpsState& s, int q, const Matrix& u) {
    // A unitary on one site preserves both orthonormality flavors, so the
    // canonical center is untouched.
    auto& site = s.sites[static_cast<std::size_t>(q)];
    std::array<Matrix, 2> next;
    for (int sp = 0; sp < 2; ++sp)
        next[static_cast<std::size_t>(sp)] =
            u(sp, 0) * site[0] + u(sp, 1) * site[1];
    site = next;
}

// Left-orthonormalize the center site, absorbing the remainder rightward.
void shift_center_right(MpsState& s) {
    const int c = s.center;
    auto& site = s.sites[static_cast<std::size_t>(c)];
    const Eigen::Index l = site[0].rows(), r = site[0].cols();
    Matrix stacked(2 * l, r);
    stacked.topRows(l) = site[0];
    stacked.bottomRows(l) = site[1];
    Eigen::HouseholderQR<Matrix> qr(stacked);
    const Eigen::Index k = std::min<Eigen::Index>(2 * l, r);
    Matrix q = qr.householderQ() * Matrix::Identity(2 * l, k);
    Matrix rest =
        qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
    site[0] = q.topRows(l);
    site[1] = q.bottomRows(l);
    auto& next = s.sites[static_cast<std::size_t>(c) + 1];
    next[0] = rest * next[0];
    next[1] = rest * next[1];
    s.center = c + 1;
}

// Right-orthonormalize the center site, absorbing the remainder leftward.
void shift_center_left(MpsState& s) {
    const int c = s.center;
    auto& site = s.sites[static_cast<std::size_t>(c)];
    const Eigen::Index l = site[0].rows(), r = site[0].cols();
    Matrix wide(l, 2 * r);
    wide.leftCols(r) = site[0];
    wide.rightCols(r) = site[1];
    Eigen::HouseholderQR<Matrix> qr(wide.adjoint());  // (2r x l)
    const Eigen::Index k = std::min<Eigen::Index>(2 * r, l);
    Matrix q = qr.householderQ() * Matrix::Identity(2 * r, k);
    Matrix rest =
        qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
    Matrix rows = q.adjoint();       // (k x 2r), orthonormal rows
    Matrix lfac = rest.adjoint();    // (l x k)
    site[0] = rows.leftCols(r);
    site[1] = rows.rightCols(r);
    auto& prev = s.sites[static_cast<std::size_t>(c) - 1];
    prev[0] = prev[0] * lfac;
    prev[1] = prev[1] * lfac;
    s.center = c - 1;
}

void move_center(MpsState& s, int target) {
    while (s.center < target) shift_center_right(s);
    while (s.center > target) shift_center_left(s);
}

// Two-site update at (q, q+1); u is 4x4 over |q q+1>. The center must sit on
// one of the two sites so the SVD sees the physical Schmidt spectrum.
void apply_2q_adjacent(MpsState& s, int q, const Matrix& u) {
    if (s.center < q || s.center > q + 1) move_center(s, q);
    auto& left = s.sites[static_cast<std::size_t>(q)];
    auto& right = s.sites[static_cast<std::size_t>(q) + 1];
    const Eigen::Index l = left[0].rows();
    const Eigen::Index r = right[0].cols();

    std::array<std::array<Matrix, 2>, 2> theta;
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2)
            theta[s1][s2] = left[static_cast<std::size_t>(s1)] *
                            right[static_cast<std::size_t>(s2)];

    Matrix big(2 * l, 2 * r);
    for (int t1 = 0; t1 < 2; ++t1)
        for (int t2 = 0; t2 < 2; ++t2) {
            Matrix acc = Matrix::Zero(l, r);
            for (int s1 = 0; s1 < 2; ++s1)
                for (int s2 = 0; s2 < 2; ++s2)
                    acc += u(2 * t1 + t2, 2 * s1 + s2) * theta[s1][s2];
            big.block(t1 * l, t2 * r, l, r) = acc;
        }

    Eigen::JacobiSVD<Matrix> svd(big, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::Index k = 0;
    while (k < sv.size() && sv(k) > s.svd_cutoff) ++k;
    k = std::min<Eigen::Index>(k, s.chi_max);
    if (k < 1) k = 1;
    // never split a degenerate pair across the truncation boundary
    while (k > 1 && k < sv.size() && std::abs(sv(k - 1) - sv(k)) < 1e-14) --k;

    double kept = 0.0, discarded = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        (i < k ? kept : discarded) += sv(i) * sv(i);
    s.discarded_weight += discarded;
    const double renorm = 1.0 / std::sqrt(kept);

    Matrix uu = svd.matrixU().leftCols(k);
    Matrix vv = svd.matrixV().leftCols(k).adjoint();
    Eigen::VectorXd kept_sv = sv.head(k) * renorm;

    for (int t1 = 0; t1 < 2; ++t1)
        left[static_cast<std::size_t>(t1)] = uu.block(t1 * l, 0, l, k);
    for (int t2 = 0; t2 < 2; ++t2) {
        Matrix block(k, r);
        for (Eigen::Index row = 0; row < k; ++row)
            block.row(row) = kept_sv(row) * vv.block(0, t2 * r, k, r).row(row);
        right[static_cast<std::size_t>(t2)] = block;
    }
    s.center = q + 1;
    s.max_bond_reached = std::max(s.max_bond_reached, static_cast<int>(k));
}

Matrix swap_matrix() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
    return m;
}

}  // namespace

void mps_apply(MpsState& s, const GateOp& op) {
    if (!is_unitary_gate(op.kind))
        throw std::invalid_argument("MPS backend handles unitary ops only");
    if (!is_two_qubit(op.kind)) {
        apply_1q(s, op.q0, gate_matrix(op));
        return;
    }
    int a = op.q0, b = op.q1;
    Matrix u = gate_matrix(op);
    if (a > b) {
        // express the gate with the lower site first
        Matrix sw = swap_matrix();
        u = sw * u * sw;
        std::swap(a, b);
    }
    // route b next to a, apply, route back
    for (int site = b - 1; site > a; --site)
        apply_2q_adjacent(s, site, swap_matrix());
    apply_2q_adjacent(s, a, u);
    for (int site = a + 1; site < b; ++site)
        apply_2q_adjacent(s, site, swap_matrix());
}

MpsState simulate_mps(const Circuit& circuit, int chi_max, double svd_cutoff) {
    MpsState s = mps_from_zero(circuit.num_qubits, chi_max, svd_cutoff);
    for (const auto& op : circuit.ops) {
        if (op.kind == GateKind::MeasureZ) continue;  // terminal readout only
        mps_apply(s, op);
    }
    return s;
}

cxd mps_amplitude(const MpsState& s, const std::string& basis_string) {
    if (static_cast<int>(basis_string.size()) != s.num_qubits)
        throw std::invalid_argument("basis string length mismatch");
    for (char c : basis_string)
        if (c != '0' && c != '1')
            throw std::invalid_argument("malformed basis string");
    Matrix acc = Matrix::Ones(1, 1);
    for (int q = 0; q < s.num_qubits; ++q) {
        int bit = basis_string[static_cast<std::size_t>(q)] - '0';
        acc = acc * s.sites[static_cast<std::size_t>(q)][static_cast<std::size_t>(bit)];
    }
    return acc(0, 0);
}

cxd mps_overlap(const MpsState& a, const MpsState& b) {
    if (a.num_qubits != b.num_qubits)
        throw std::invalid_argument("qubit count mismatch");
    Matrix env = Matrix::Ones(1, 1);
    for (int q = 0; q < a.num_qubits; ++q) {
        Matrix next = Matrix::Zero(a.sites[static_cast<std::size_t>(q)][0].cols(),
                                   b.sites[static_cast<std::size_t>(q)][0].cols());
        for (int sp = 0; sp < 2; ++sp)
            next += a.sites[static_cast<std::size_t>(q)][static_cast<std::size_t>(sp)]
                        .adjoint() *
                    env *
                    b.sites[static_cast<std::size_t>(q)][static_cast<std::size_t>(sp)];
        env = next;
    }
    return env(0, 0);
}

double mps_fidelity(const MpsState& a, const MpsState& b) {
    return std::norm(mps_overlap(a, b));
}

double mps_fidelity(const MpsState& a, const StateVector& b) {
    if (a.num_qubits != b.num_qubits)
        throw std::invalid_argument("qubit count mismatch");
    cxd acc = 0.0;
    for (Eigen::Index i = 0; i < b.amplitudes.size(); ++i) {
        std::string bits = bits_of_index(static_cast<std::size_t>(i), a.num_qubits);
        acc += std::conj(mps_amplitude(a, bits)) * b.amplitudes(i);
    }
    return std::norm(acc);
}

StateVector mps_to_statevector(const MpsState& s) {
    StateVector out;
    out.num_qubits = s.num_qubits;
    const Eigen::Index dim = Eigen::Index(1) << s.num_qubits;
    out.amplitudes = Vector::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        out.amplitudes(i) =
            mps_amplitude(s, bits_of_index(static_cast<std::size_t>(i), s.num_qubits));
    return out;
}

double mps_norm(const MpsState& s) { return std::sqrt(std::abs(mps_overlap(s, s))); }

void mps_canonicalize(MpsState& s) {
    move_center(s, s.num_qubits - 1);
    move_center(s, 0);
    auto& head = s.sites[0];
    double n = std::sqrt(head[0].squaredNorm() + head[1].squaredNorm());
    if (n > 0) {
        head[0] /= n;
        head[1] /= n;
    }
}

std::string bond_profile_csv(const MpsState& s) {
    std::ostringstream out;
    out << "bond,dimension\n";
    auto dims = s.bond_dims();
    for (std::size_t i = 0; i < dims.size(); ++i)
        out << i << ',' << dims[i] << '\n';
    return out.str();
}

}  // namespace shardq
