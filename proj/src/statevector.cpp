#include "shardq/statevector.hpp"

#include <algorithm>
#include <cmath>

#include "shardq/gates.hpp"

namespace shardq {

StateVector StateVector::zero(int num_qubits) {
    StateVector s;
    s.num_qubits = num_qubits;
    s.amplitudes = Vector::Zero(std::int64_t(1) << num_qubits);
    s.amplitudes(0) = 1.0;
    return s;
}

cxd StateVector::amplitude(const std::string& bits) const {
    if (static_cast<int>(bits.size()) != num_qubits)
        throw std::invalid_argument("basis string length mismatch");
    return amplitudes(static_cast<Eigen::Index>(index_of_bits(bits)));
}

namespace {

// qubit q occupies bit (n-1-q) of the amplitude index
inline std::int64_t bit_of(int num_qubits, int q) {
    return std::int64_t(1) << (num_qubits - 1 - q);
}

void apply_1q(Vector& amps, int num_qubits, int q, const Matrix& u) {
    const std::int64_t mask = bit_of(num_qubits, q);
    const std::int64_t dim = amps.size();
    const cxd u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (std::int64_t i = 0; i < dim; ++i) {
        if (i & mask) continue;
        const cxd a0 = amps(i), a1 = amps(i | mask);
        amps(i) = u00 * a0 + u01 * a1;
        amps(i | mask) = u10 * a0 + u11 * a1;
    }
}

void apply_2q(Vector& amps, int num_qubits, int qa, int qb, const Matrix& u) {
    const std::int64_t ma = bit_of(num_qubits, qa);
    const std::int64_t mb = bit_of(num_qubits, qb);
    const std::int64_t dim = amps.size();
    for (std::int64_t i = 0; i < dim; ++i) {
        if ((i & ma) || (i & mb)) continue;
        const std::int64_t i00 = i, i01 = i | mb, i10 = i | ma, i11 = i | ma | mb;
        const cxd a00 = amps(i00), a01 = amps(i01), a10 = amps(i10), a11 = amps(i11);
        for (int r = 0; r < 4; ++r) {
            cxd v = u(r, 0) * a00 + u(r, 1) * a01 + u(r, 2) * a10 + u(r, 3) * a11;
            switch (r) {
                case 0: amps(i00) = v; break;
                case 1: amps(i01) = v; break;
                case 2: amps(i10) = v; break;
                case 3: amps(i11) = v; break;
            }
        }
    }
}

}  // namespace

void apply_gate(StateVector& state, const GateOp& op) {
    if (!is_unitary_gate(op.kind))
        throw std::invalid_argument("apply_gate expects a unitary op");
    if (is_two_qubit(op.kind)) {
        apply_2q(state.amplitudes, state.num_qubits, op.q0, op.q1, gate_matrix(op));
    } else {
        apply_1q(state.amplitudes, state.num_qubits, op.q0, gate_matrix(op));
    }
}

StateVector simulate_statevector(const Circuit& c, const SimLimits& limits) {
    if (c.num_qubits > limits.max_qubits)
        throw std::invalid_argument("qubit cap exceeded");
    for (const auto& op : c.ops)
        if (!is_unitary_gate(op.kind))
            throw std::invalid_argument("simulate_statevector handles unitary ops only");
    StateVector s = StateVector::zero(c.num_qubits);
    for (const auto& op : c.ops) apply_gate(s, op);
    return s;
}

namespace {

struct Branch {
    Vector amps;
    double prob;                 // accumulated branch probability
    std::string clbits;          // classical register contents so far
};

double outcome1_probability(const Vector& amps, int num_qubits, int q) {
    const std::int64_t mask = bit_of(num_qubits, q);
    double p1 = 0.0;
    for (std::int64_t i = 0; i < amps.size(); ++i)
        if (i & mask) p1 += std::norm(amps(i));
    return p1;
}

void project(Vector& amps, int num_qubits, int q, int outcome, double prob) {
    const std::int64_t mask = bit_of(num_qubits, q);
    const double scale = 1.0 / std::sqrt(prob);
    for (std::int64_t i = 0; i < amps.size(); ++i) {
        bool one = (i & mask) != 0;
        if (one != (outcome == 1))
            amps(i) = 0.0;
        else
            amps(i) *= scale;
    }
}

void set_qubit_state(Vector& amps, int num_qubits, int q, StateLabel label,
                     int collapsed_outcome) {
    // Qubit q is in |collapsed_outcome>; rewrite it as the label state.
    const std::int64_t mask = bit_of(num_qubits, q);
    Vector target = state_vector(label);
    for (std::int64_t i = 0; i < amps.size(); ++i) {
        if (i & mask) continue;
        std::int64_t src = (collapsed_outcome == 0) ? i : (i | mask);
        cxd a = amps(src);
        amps(i) = target(0) * a;
        amps(i | mask) = target(1) * a;
    }
}

}  // namespace

Distribution simulate_distribution(const Circuit& c, const SimLimits& limits) {
    if (c.num_qubits > limits.max_qubits)
        throw std::invalid_argument("qubit cap exceeded");

    // Trailing MeasureZ ops are read out from amplitudes; only measurements
    // followed by more work need Born-rule branching.
    std::size_t tail_start = c.ops.size();
    while (tail_start > 0 && c.ops[tail_start - 1].kind == GateKind::MeasureZ)
        --tail_start;

    int mid_measures = 0;
    for (std::size_t i = 0; i < tail_start; ++i)
        if (c.ops[i].kind == GateKind::MeasureZ) ++mid_measures;
    if (mid_measures > limits.max_mid_measures)
        throw std::invalid_argument("mid-circuit measurement branch cap exceeded");

    std::vector<Branch> branches;
    branches.push_back({StateVector::zero(c.num_qubits).amplitudes, 1.0,
                        std::string(static_cast<std::size_t>(c.num_clbits), '0')});

    for (std::size_t i = 0; i < tail_start; ++i) {
        const auto& op = c.ops[i];
        if (is_unitary_gate(op.kind)) {
            for (auto& br : branches) {
                if (is_two_qubit(op.kind))
                    apply_2q(br.amps, c.num_qubits, op.q0, op.q1, gate_matrix(op));
                else
                    apply_1q(br.amps, c.num_qubits, op.q0, gate_matrix(op));
            }
        } else if (op.kind == GateKind::MeasureZ) {
            std::vector<Branch> next;
            next.reserve(branches.size() * 2);
            for (auto& br : branches) {
                double p1 = outcome1_probability(br.amps, c.num_qubits, op.q0);
                for (int outcome : {0, 1}) {
                    double p = outcome == 1 ? p1 : 1.0 - p1;
                    if (p < 1e-15) continue;
                    Branch nb;
                    nb.amps = br.amps;
                    project(nb.amps, c.num_qubits, op.q0, outcome, p);
                    nb.prob = br.prob * p;
                    nb.clbits = br.clbits;
                    nb.clbits[static_cast<std::size_t>(op.clbit)] =
                        outcome ? '1' : '0';
                    next.push_back(std::move(nb));
                }
            }
            branches = std::move(next);
        } else {  // PrepareState: trace out then set
            std::vector<Branch> next;
            next.reserve(branches.size() * 2);
            for (auto& br : branches) {
                double p1 = outcome1_probability(br.amps, c.num_qubits, op.q0);
                for (int outcome : {0, 1}) {
                    double p = outcome == 1 ? p1 : 1.0 - p1;
                    if (p < 1e-15) continue;
                    Branch nb;
                    nb.amps = br.amps;
                    project(nb.amps, c.num_qubits, op.q0, outcome, p);
                    set_qubit_state(nb.amps, c.num_qubits, op.q0, op.state, outcome);
                    nb.prob = br.prob * p;
                    nb.clbits = br.clbits;
                    next.push_back(std::move(nb));
                }
            }
            branches = std::move(next);
        }
    }

    // Read the trailing measurement block off each branch in one pass.
    std::vector<std::pair<int, int>> tail;  // (qubit, clbit)
    for (std::size_t i = tail_start; i < c.ops.size(); ++i)
        tail.push_back({c.ops[i].q0, c.ops[i].clbit});

    Distribution dist;
    for (const auto& br : branches) {
        if (tail.empty()) {
            dist[br.clbits] += br.prob;
            continue;
        }
        const std::int64_t dim = br.amps.size();
        for (std::int64_t idx = 0; idx < dim; ++idx) {
            double p = std::norm(br.amps(idx));
            if (p < 1e-18) continue;
            std::string key = br.clbits;
            for (const auto& [q, cl] : tail) {
                bool one = (idx & bit_of(c.num_qubits, q)) != 0;
                key[static_cast<std::size_t>(cl)] = one ? '1' : '0';
            }
            dist[key] += br.prob * p;
        }
    }
    return dist;
}

CountsTable sample_from_distribution(const Distribution& dist, int num_clbits,
                                     long long shots, Rng& rng) {
    std::vector<std::pair<std::string, double>> cdf;
    cdf.reserve(dist.size());
    double acc = 0.0;
    for (const auto& [k, p] : dist) {
        acc += p;
        cdf.push_back({k, acc});
    }
    CountsTable table;
    table.shots = shots;
    for (long long s = 0; s < shots; ++s) {
        double u = rng.next_double() * acc;
        auto it = std::lower_bound(
            cdf.begin(), cdf.end(), u,
            [](const auto& a, double b) { return a.second < b; });
        if (it == cdf.end()) it = std::prev(cdf.end());
        table.counts[it->first] += 1;
    }
    (void)num_clbits;
    return table;
}

CountsTable sample_counts(const Circuit& c, long long shots, std::uint64_t seed,
                          const SimLimits& limits) {
    Distribution dist = simulate_distribution(c, limits);
    Rng rng(seed);
    return sample_from_distribution(dist, c.num_clbits, shots, rng);
}

std::string reverse_key(const std::string& key) {
    return std::string(key.rbegin(), key.rend());
}

}  // namespace shardq
