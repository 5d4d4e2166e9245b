#include "shardq/choi.hpp"

#include <cmath>

#include "shardq/gates.hpp"

namespace shardq {

namespace {

// Embed a 1- or 2-slot operator into the full 2^n space; slot 0 is the most
// significant local bit.
Matrix embed_1q(const Matrix& u, int slot, int num_slots) {
    Matrix out = Matrix::Identity(1, 1);
    for (int s = 0; s < num_slots; ++s)
        out = kron(out, s == slot ? u : Matrix::Identity(2, 2));
    return out;
}

Matrix embed_2q(const Matrix& u, int slot_a, int slot_b, int num_slots) {
    // Build via computational basis action.
    const int dim = 1 << num_slots;
    Matrix out = Matrix::Zero(dim, dim);
    for (int col = 0; col < dim; ++col) {
        int a = (col >> (num_slots - 1 - slot_a)) & 1;
        int b = (col >> (num_slots - 1 - slot_b)) & 1;
        int local = 2 * a + b;
        for (int row_local = 0; row_local < 4; ++row_local) {
            cxd amp = u(row_local, local);
            if (std::abs(amp) < 1e-300) continue;
            int ra = row_local >> 1, rb = row_local & 1;
            int row = col;
            row &= ~(1 << (num_slots - 1 - slot_a));
            row &= ~(1 << (num_slots - 1 - slot_b));
            row |= ra << (num_slots - 1 - slot_a);
            row |= rb << (num_slots - 1 - slot_b);
            out(row, col) += amp;
        }
    }
    return out;
}

Matrix projector(int slot, int outcome, int num_slots) {
    Matrix p = Matrix::Zero(2, 2);
    p(outcome, outcome) = 1.0;
    return embed_1q(p, slot, num_slots);
}

}  // namespace

Matrix apply_term_channel(const CutSetting& setting, unsigned parity_mask,
                          int num_slots, const Matrix& rho) {
    // Branch over measurement outcomes; each branch tracks its sign.
    struct Branch {
        Matrix rho;
        double sign;
    };
    std::vector<Branch> branches{{rho, 1.0}};
    auto apply_all = [&](const Matrix& full) {
        for (auto& br : branches) br.rho = full * br.rho * full.adjoint();
    };

    for (const auto& op : setting.ops) {
        if (op.kind == GateKind::MeasureZ) {
            bool signed_bit = (parity_mask >> op.clbit) & 1u;
            std::vector<Branch> next;
            for (const auto& br : branches) {
                for (int outcome : {0, 1}) {
                    Matrix p = projector(op.q0, outcome, num_slots);
                    Branch nb;
                    nb.rho = p * br.rho * p;
                    nb.sign = br.sign * ((signed_bit && outcome == 1) ? -1.0 : 1.0);
                    next.push_back(std::move(nb));
                }
            }
            branches = std::move(next);
        } else if (op.kind == GateKind::PrepareState) {
            Vector target = state_vector(op.state);
            std::vector<Branch> next;
            for (const auto& br : branches) {
                Matrix acc = Matrix::Zero(br.rho.rows(), br.rho.cols());
                for (int m : {0, 1}) {
                    // Kraus |target><m| on the slot
                    Matrix k = Matrix::Zero(2, 2);
                    k(0, m) = target(0);
                    k(1, m) = target(1);
                    Matrix full = embed_1q(k, op.q0, num_slots);
                    acc += full * br.rho * full.adjoint();
                }
                next.push_back({acc, br.sign});
            }
            branches = std::move(next);
        } else if (is_two_qubit(op.kind)) {
            apply_all(embed_2q(gate_matrix(op), op.q0, op.q1, num_slots));
        } else {
            apply_all(embed_1q(gate_matrix(op), op.q0, num_slots));
        }
    }

    if (setting.keep_gate) {
        Matrix cx = embed_2q(gate_matrix(GateKind::CX), 0, 1, num_slots);
        apply_all(cx);
    }

    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& br : branches) out += br.sign * br.rho;
    return out;
}

Matrix choi_of_unitary(const Matrix& u) {
    const Eigen::Index d = u.rows();
    Matrix choi = Matrix::Zero(d * d, d * d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            Matrix unit = Matrix::Zero(d, d);
            unit(a, b) = 1.0;
            Matrix image = u * unit * u.adjoint();
            choi.block(a * d, b * d, d, d) = image;
        }
    return choi;
}

Matrix choi_of_expansion(const CutExpansion& expansion) {
    const int n = expansion.num_slots;
    const Eigen::Index d = Eigen::Index(1) << n;
    Matrix choi = Matrix::Zero(d * d, d * d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            Matrix unit = Matrix::Zero(d, d);
            unit(a, b) = 1.0;
            Matrix image = Matrix::Zero(d, d);
            for (const auto& term : expansion.terms) {
                const auto& setting =
                    expansion.settings[static_cast<std::size_t>(term.setting_id)];
                image += term.coefficient *
                         apply_term_channel(setting, term.parity_mask, n, unit);
            }
            choi.block(a * d, b * d, d, d) = image;
        }
    return choi;
}

double choi_distance(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace shardq
