#include "shardq/noise.hpp"

#include <map>
#include <vector>

namespace shardq {

namespace {

GateOp pauli_op(int which, int q) {
    switch (which) {
        case 1: return GateOp::x(q);
        case 2: return GateOp::y(q);
        default: return GateOp::z(q);
    }
}

// pattern: per two-qubit gate, 0 = clean, 1..15 = (p0,p1) pair with
// p = 4*p0 + p1 over {I,X,Y,Z}, excluding (I,I).
using Pattern = std::vector<int>;

Pattern sample_pattern(const Circuit& c, double p, Rng& rng) {
    Pattern pat;
    for (const auto& op : c.ops) {
        if (!is_two_qubit(op.kind)) continue;
        if (rng.next_double() < p)
            pat.push_back(1 + static_cast<int>(rng.next_below(15)));
        else
            pat.push_back(0);
    }
    return pat;
}

Circuit with_pattern(const Circuit& c, const Pattern& pat) {
    Circuit out(c.num_qubits, c.num_clbits);
    std::size_t g = 0;
    for (const auto& op : c.ops) {
        out.ops.push_back(op);
        if (!is_two_qubit(op.kind)) continue;
        int code = pat[g++];
        if (code == 0) continue;
        int pa = code / 4, pb = code % 4;
        if (pa != 0) out.ops.push_back(pauli_op(pa, op.q0));
        if (pb != 0) out.ops.push_back(pauli_op(pb, op.q1));
    }
    return out;
}

}  // namespace

Circuit apply_depolarizing_noise(const Circuit& c, double p, Rng& rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0,1]");
    return with_pattern(c, sample_pattern(c, p, rng));
}

CountsTable sample_counts_noisy(const Circuit& c, double p, long long shots,
                                std::uint64_t seed, const SimLimits& limits) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0,1]");
    Rng rng(seed);
    std::map<Pattern, long long> pattern_shots;
    for (long long s = 0; s < shots; ++s)
        pattern_shots[sample_pattern(c, p, rng)] += 1;

    CountsTable table;
    table.shots = shots;
    for (const auto& [pat, n] : pattern_shots) {
        Distribution dist = simulate_distribution(with_pattern(c, pat), limits);
        CountsTable part = sample_from_distribution(dist, c.num_clbits, n, rng);
        for (const auto& [k, v] : part.counts) table.counts[k] += v;
    }
    return table;
}

}  // namespace shardq
