#include "shardq/aqc.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>

#include "shardq/gates.hpp"
#include "shardq/statevector.hpp"

namespace shardq {

Circuit Ansatz::to_circuit(const std::vector<double>& theta) const {
    if (theta.size() != parameter_count())
        throw std::invalid_argument("parameter count mismatch");
    Circuit c(num_qubits, num_qubits);
    std::size_t p = 0;
    for (const auto& block : blocks) {
        c.add(GateOp::ry(block.q_lo, theta[p + 0]));
        c.add(GateOp::rz(block.q_lo, theta[p + 1]));
        c.add(GateOp::ry(block.q_hi, theta[p + 2]));
        c.add(GateOp::rz(block.q_hi, theta[p + 3]));
        if (block.control_lo)
            c.add(GateOp::cx(block.q_lo, block.q_hi));
        else
            c.add(GateOp::cx(block.q_hi, block.q_lo));
        c.add(GateOp::ry(block.q_lo, theta[p + 4]));
        c.add(GateOp::rz(block.q_lo, theta[p + 5]));
        c.add(GateOp::ry(block.q_hi, theta[p + 6]));
        c.add(GateOp::rz(block.q_hi, theta[p + 7]));
        p += 8;
    }
    return c;
}

PrefixSplit split_prefix_suffix(const Circuit& circuit, const CutPlan& plan) {
    std::set<int> cut(plan.cut_indices.begin(), plan.cut_indices.end());
    std::size_t boundary = circuit.ops.size();
    if (!plan.cut_indices.empty())
        boundary = static_cast<std::size_t>(plan.cut_indices.back()) + 1;

    PrefixSplit split;
    split.c1 = Circuit(circuit.num_qubits, circuit.num_clbits);
    split.c1_trunc = Circuit(circuit.num_qubits, circuit.num_clbits);
    split.c2 = Circuit(circuit.num_qubits, circuit.num_clbits);
    for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
        if (i < boundary) {
            split.c1.ops.push_back(circuit.ops[i]);
            if (cut.count(static_cast<int>(i)))
                split.cut_gates.push_back(circuit.ops[i]);
            else
                split.c1_trunc.ops.push_back(circuit.ops[i]);
        } else {
            split.c2.ops.push_back(circuit.ops[i]);
        }
    }
    return split;
}

namespace {

// Decompose U (up to global phase) as Rz(b) * Ry(a), the form one block slot
// can hold. Returns nullopt when U needs a third Euler angle.
std::optional<std::pair<double, double>> euler_zy(const Matrix& u) {
    auto candidate = [&](double a, double b) -> std::optional<std::pair<double, double>> {
        Matrix m = gate_matrix(GateKind::Rz, b) * gate_matrix(GateKind::Ry, a);
        if (phase_distance(m, u) < 1e-10) return std::make_pair(a, b);
        return std::nullopt;
    };
    double a0 = 2.0 * std::atan2(std::abs(u(1, 0)), std::abs(u(0, 0)));
    for (double a : {a0, -a0}) {
        double c = std::cos(a / 2), s = std::sin(a / 2);
        double b = 0.0;
        if (std::abs(c) > 1e-9 && std::abs(s) > 1e-9) {
            b = std::arg(u(1, 0) / u(0, 0) * (c / s));
        } else if (std::abs(c) > 1e-9) {
            b = std::arg(u(1, 1) / u(0, 0));
        } else {
            b = 2.0 * std::arg(u(1, 0) / std::abs(u(1, 0)));
        }
        for (double bb : {b, b + kPi, b - kPi}) {
            if (auto r = candidate(a, bb)) return r;
        }
    }
    return std::nullopt;
}

struct BlockParams {
    AnsatzBlock block;
    std::array<double, 8> theta{};
};

}  // namespace

Ansatz build_ansatz(const Circuit& c1_trunc, int refine_rounds) {
    const int n = c1_trunc.num_qubits;
    if (n < 2)
        throw std::invalid_argument("ansatz needs at least two qubits");

    std::vector<Matrix> pending(static_cast<std::size_t>(n),
                                Matrix::Identity(2, 2));
    std::vector<BlockParams> blocks;
    std::vector<int> last_block_of(static_cast<std::size_t>(n), -1);

    auto absorb = [&](int q) {
        auto angles = euler_zy(pending[static_cast<std::size_t>(q)]);
        if (!angles)
            throw std::invalid_argument(
                "unsupported gate sequence for block absorption");
        pending[static_cast<std::size_t>(q)] = Matrix::Identity(2, 2);
        return *angles;
    };

    auto emit_cx_block = [&](int control, int target) {
        BlockParams bp;
        bp.block.q_lo = std::min(control, target);
        bp.block.q_hi = std::max(control, target);
        bp.block.control_lo = control < target;
        auto lo = absorb(bp.block.q_lo);
        auto hi = absorb(bp.block.q_hi);
        bp.theta[0] = lo.first;
        bp.theta[1] = lo.second;
        bp.theta[2] = hi.first;
        bp.theta[3] = hi.second;
        last_block_of[static_cast<std::size_t>(bp.block.q_lo)] =
            static_cast<int>(blocks.size());
        last_block_of[static_cast<std::size_t>(bp.block.q_hi)] =
            static_cast<int>(blocks.size());
        blocks.push_back(bp);
    };

    for (const auto& op : c1_trunc.ops) {
        if (op.kind == GateKind::MeasureZ || op.kind == GateKind::PrepareState)
            throw std::invalid_argument("ansatz supports unitary prefixes only");
        if (!is_two_qubit(op.kind)) {
            pending[static_cast<std::size_t>(op.q0)] =
                gate_matrix(op) * pending[static_cast<std::size_t>(op.q0)];
            continue;
        }
        if (op.kind == GateKind::CZ)
            throw std::invalid_argument("CZ prefixes are not block-absorbable");
        int control = op.q0, target = op.q1;
        if (std::abs(control - target) == 1) {
            emit_cx_block(control, target);
            continue;
        }
        // Route the target next to the control with SWAP chains, each SWAP
        // spelled as three adjacent CX blocks.
        int lo = std::min(control, target), hi = std::max(control, target);
        auto emit_swap = [&](int a) {
            emit_cx_block(a, a + 1);
            emit_cx_block(a + 1, a);
            emit_cx_block(a, a + 1);
        };
        for (int s = hi - 1; s > lo; --s) emit_swap(s);
        if (control < target)
            emit_cx_block(lo, lo + 1);
        else
            emit_cx_block(lo + 1, lo);
        for (int s = lo + 1; s < hi; ++s) emit_swap(s);
    }

    // Trailing one-qubit work folds into the post slots of the last block
    // touching the qubit. Qubits no block touches get front carrier blocks:
    // the CX fires on a |00> pair (carriers use disjoint qubit pairs and
    // precede everything), so only the post rotations act.
    auto is_pending = [&](int q) {
        return (pending[static_cast<std::size_t>(q)] - Matrix::Identity(2, 2))
                   .cwiseAbs()
                   .maxCoeff() > 1e-14;
    };
    for (int q = 0; q < n; ++q) {
        if (!is_pending(q) || last_block_of[static_cast<std::size_t>(q)] < 0)
            continue;
        auto& bp = blocks[static_cast<std::size_t>(
            last_block_of[static_cast<std::size_t>(q)])];
        auto angles = absorb(q);
        if (q == bp.block.q_lo) {
            bp.theta[4] = angles.first;
            bp.theta[5] = angles.second;
        } else {
            bp.theta[6] = angles.first;
            bp.theta[7] = angles.second;
        }
    }
    std::vector<BlockParams> carriers;
    std::vector<bool> in_carrier(static_cast<std::size_t>(n), false);
    for (int q = 0; q < n; ++q) {
        if (!is_pending(q) || in_carrier[static_cast<std::size_t>(q)]) continue;
        int partner = -1;
        for (int nb : {q + 1, q - 1})
            if (nb >= 0 && nb < n && !in_carrier[static_cast<std::size_t>(nb)]) {
                partner = nb;
                break;
            }
        if (partner < 0)
            throw std::invalid_argument("cannot place carrier block for qubit " +
                                        std::to_string(q));
        BlockParams bp;
        bp.block.q_lo = std::min(q, partner);
        bp.block.q_hi = std::max(q, partner);
        auto fold_post = [&](int qq) {
            auto angles = absorb(qq);
            if (qq == bp.block.q_lo) {
                bp.theta[4] = angles.first;
                bp.theta[5] = angles.second;
            } else {
                bp.theta[6] = angles.first;
                bp.theta[7] = angles.second;
            }
        };
        fold_post(q);
        if (is_pending(partner) &&
            last_block_of[static_cast<std::size_t>(partner)] < 0)
            fold_post(partner);
        in_carrier[static_cast<std::size_t>(q)] = true;
        in_carrier[static_cast<std::size_t>(partner)] = true;
        carriers.push_back(bp);
    }
    blocks.insert(blocks.begin(), carriers.begin(), carriers.end());

    for (int round = 0; round < refine_rounds; ++round)
        for (int q = 0; q + 1 < n; ++q)
            for (int rep = 0; rep < 2; ++rep) {
                BlockParams bp;
                bp.block.q_lo = q;
                bp.block.q_hi = q + 1;
                blocks.push_back(bp);
            }

    Ansatz ansatz;
    ansatz.num_qubits = n;
    for (const auto& bp : blocks) {
        ansatz.blocks.push_back(bp.block);
        for (double t : bp.theta) ansatz.theta0.push_back(t);
    }

    // theta0 must reproduce the truncated prefix exactly up to phase
    StateVector want = simulate_statevector(c1_trunc.without_measurements());
    StateVector got = simulate_statevector(ansatz.to_circuit(ansatz.theta0));
    cxd overlap = want.amplitudes.dot(got.amplitudes);
    if (std::abs(std::norm(overlap) - 1.0) > 1e-9)
        throw std::runtime_error("ansatz theta0 fails to reproduce the prefix");
    return ansatz;
}

double infidelity(const Ansatz& ansatz, const std::vector<double>& theta,
                  const MpsState& target) {
    MpsState psi = simulate_mps(ansatz.to_circuit(theta), target.chi_max,
                                target.svd_cutoff);
    double f = std::norm(mps_overlap(target, psi));
    return 1.0 - f;
}

std::vector<double> infidelity_gradient(const Ansatz& ansatz,
                                        const std::vector<double>& theta,
                                        const MpsState& target) {
    std::vector<double> grad(theta.size(), 0.0);
    std::vector<double> shifted = theta;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        shifted[k] = theta[k] + kPi / 2;
        double lp = infidelity(ansatz, shifted, target);
        shifted[k] = theta[k] - kPi / 2;
        double lm = infidelity(ansatz, shifted, target);
        shifted[k] = theta[k];
        grad[k] = (lp - lm) / 2.0;  // parameter-shift rule
    }
    return grad;
}

std::vector<double> finite_difference_gradient(const Ansatz& ansatz,
                                               const std::vector<double>& theta,
                                               const MpsState& target, double h) {
    std::vector<double> grad(theta.size(), 0.0);
    std::vector<double> shifted = theta;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        shifted[k] = theta[k] + h;
        double lp = infidelity(ansatz, shifted, target);
        shifted[k] = theta[k] - h;
        double lm = infidelity(ansatz, shifted, target);
        shifted[k] = theta[k];
        grad[k] = (lp - lm) / (2.0 * h);
    }
    return grad;
}

Circuit assemble_compiled(const Ansatz& ansatz, const std::vector<double>& theta,
                          const PrefixSplit& split) {
    Circuit compiled(split.c1.num_qubits, split.c1.num_clbits);
    Circuit body = ansatz.to_circuit(theta);
    for (const auto& op : body.ops) compiled.ops.push_back(op);
    for (const auto& op : split.cut_gates) compiled.ops.push_back(op);
    for (const auto& op : split.c2.ops) compiled.ops.push_back(op);
    return compiled;
}

CompilationResult optimize(const Ansatz& ansatz, const MpsState& target,
                           const PrefixSplit& split, const OptimizeOptions& opts) {
    if (opts.epsilon <= 0.0 || opts.epsilon >= 1.0)
        throw std::invalid_argument("epsilon must lie in (0,1)");
    if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");

    std::vector<double> theta = ansatz.theta0;
    double loss = infidelity(ansatz, theta, target);
    CompilationResult result;
    result.trace.push_back({0, loss, 0.0});

    int iter = 0;
    double step = opts.initial_step;
    while (loss >= opts.epsilon && iter < opts.max_iters) {
        ++iter;
        std::vector<double> grad = infidelity_gradient(ansatz, theta, target);
        double g2 = 0.0;
        for (double g : grad) g2 += g * g;
        if (g2 < 1e-24) break;  // flat; cannot improve

        double trial_step = std::min(step * 2.0, 1.0);
        std::vector<double> trial(theta.size());
        double trial_loss = loss;
        while (true) {
            for (std::size_t k = 0; k < theta.size(); ++k)
                trial[k] = theta[k] - trial_step * grad[k];
            trial_loss = infidelity(ansatz, trial, target);
            if (!std::isfinite(trial_loss))
                throw std::runtime_error("non-finite loss at iteration " +
                                         std::to_string(iter));
            if (trial_loss <= loss - opts.armijo_c * trial_step * g2) break;
            trial_step *= opts.shrink;
            if (trial_step < 1e-12) break;
        }
        if (trial_loss > loss) break;  // line search exhausted
        theta = trial;
        loss = trial_loss;
        step = trial_step;
        result.trace.push_back({iter, loss, trial_step});
    }

    result.optimized_parameters = theta;
    result.final_infidelity = loss;
    result.iterations = iter;
    result.compiled_circuit = assemble_compiled(ansatz, theta, split);
    std::size_t ansatz_ops = ansatz.to_circuit(theta).ops.size();
    for (std::size_t m = 0; m < split.cut_gates.size(); ++m)
        result.cut_indices_in_compiled.push_back(static_cast<int>(ansatz_ops + m));
    return result;
}

std::string trace_to_csv(const std::vector<OptimizerTracePoint>& trace) {
    std::ostringstream out;
    out << "iteration,loss,step\n";
    out.precision(17);
    for (const auto& pt : trace)
        out << pt.iteration << ',' << pt.loss << ',' << pt.step << '\n';
    return out.str();
}

}  // namespace shardq
