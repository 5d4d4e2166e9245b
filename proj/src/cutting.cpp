#include "shardq/cutting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "shardq/gates.hpp"

namespace shardq {

namespace {

// Ops below are written on slots: 0 = control endpoint, 1 = target endpoint.
std::vector<GateOp> measure_x_target(int rec) {
    return {GateOp::h(1), GateOp::measure(1, rec), GateOp::h(1)};
}

CutExpansion gate_cut_table(bool conjugate_target_by_h) {
    // Six-setting decomposition of the CX (CZ without the H conjugation)
    // channel, from CZ = (S^+ x S^+) exp(-i pi/4 Z x Z) up to phase and the
    // rotation-gate channel identity. Coefficients are oracle-checked.
    auto target_wrap = [&](std::vector<GateOp> inner) {
        if (!conjugate_target_by_h) return inner;
        std::vector<GateOp> out;
        out.push_back(GateOp::h(1));
        for (auto& op : inner) out.push_back(op);
        out.push_back(GateOp::h(1));
        return out;
    };

    CutExpansion e;
    // setting 0: S^dg on control, (H) S^dg (H) on target
    e.settings.push_back({0, [&] {
                              std::vector<GateOp> ops{GateOp::sdg(0)};
                              for (auto& op : target_wrap({GateOp::sdg(1)}))
                                  ops.push_back(op);
                              return ops;
                          }(),
                          0, false});
    // setting 1: S on control, (H) S (H) on target
    e.settings.push_back({1, [&] {
                              std::vector<GateOp> ops{GateOp::s(0)};
                              for (auto& op : target_wrap({GateOp::s(1)}))
                                  ops.push_back(op);
                              return ops;
                          }(),
                          0, false});
    // settings 2/3: Z or nothing on control, target measured in the
    // (conjugated) Z basis with the state kept
    {
        std::vector<GateOp> meas =
            conjugate_target_by_h
                ? measure_x_target(0)
                : std::vector<GateOp>{GateOp::measure(1, 0)};
        std::vector<GateOp> ops2{GateOp::z(0)};
        for (auto& op : meas) ops2.push_back(op);
        e.settings.push_back({2, ops2, 1, false});
        e.settings.push_back({3, meas, 1, false});
    }
    // settings 4/5: control measured in Z, X (= HZH) or nothing on target
    {
        std::vector<GateOp> ops4{GateOp::measure(0, 0)};
        for (auto& op : target_wrap({GateOp::z(1)})) ops4.push_back(op);
        e.settings.push_back({4, ops4, 1, false});
        e.settings.push_back({5, {GateOp::measure(0, 0)}, 1, false});
    }

    e.terms = {
        {+0.5, 0, 0}, {+0.5, 1, 0}, {-0.5, 2, 1},
        {+0.5, 3, 1}, {-0.5, 4, 1}, {+0.5, 5, 1},
    };
    return e;
}

CutExpansion pauli_table_expansion() {
    // Measure-and-reprepare wire cut on the control endpoint; the cut gate is
    // kept after the splice. Eight rows over six circuit settings. The
    // (observable, eigenstate) pairing must match each observable with its
    // own eigenbasis or the summed channel stops being the identity; the
    // Choi oracle pins the shipped pairing.
    CutExpansion e;
    auto z_setting = [](int id, StateLabel prep) {
        return CutSetting{id,
                          {GateOp::measure(0, 0), GateOp::prepare(0, prep)},
                          1,
                          true};
    };
    auto x_setting = [](int id, StateLabel prep) {
        return CutSetting{
            id,
            {GateOp::h(0), GateOp::measure(0, 0), GateOp::prepare(0, prep)},
            1,
            true};
    };
    auto y_setting = [](int id, StateLabel prep) {
        return CutSetting{id,
                          {GateOp::sdg(0), GateOp::h(0), GateOp::measure(0, 0),
                           GateOp::prepare(0, prep)},
                          1,
                          true};
    };
    e.settings = {
        z_setting(0, StateLabel::Zero),  z_setting(1, StateLabel::One),
        x_setting(2, StateLabel::Plus),  x_setting(3, StateLabel::Minus),
        y_setting(4, StateLabel::PlusI), y_setting(5, StateLabel::MinusI),
    };
    e.terms = {
        {+0.5, 0, 0},  // O=I, prep |0>
        {+0.5, 1, 0},  // O=I, prep |1>
        {+0.5, 2, 1},  // O=X, prep |+>
        {-0.5, 3, 1},  // O=X, prep |->
        {+0.5, 4, 1},  // O=Y, prep |+i>
        {-0.5, 5, 1},  // O=Y, prep |-i>
        {+0.5, 0, 1},  // O=Z, prep |0>
        {-0.5, 1, 1},  // O=Z, prep |1>
    };
    return e;
}

}  // namespace

CutExpansion expand_cut_cx(CutStrategy strategy) {
    switch (strategy) {
        case CutStrategy::GateCut: return gate_cut_table(true);
        case CutStrategy::PauliTable: return pauli_table_expansion();
    }
    throw std::invalid_argument("unknown strategy");
}

CutExpansion expand_cut_cz(CutStrategy strategy) {
    switch (strategy) {
        case CutStrategy::GateCut: return gate_cut_table(false);
        case CutStrategy::PauliTable: return pauli_table_expansion();
    }
    throw std::invalid_argument("unknown strategy");
}

Matrix ucry_matrix(const std::vector<double>& angles) {
    if (angles.size() != 4) throw std::invalid_argument("UCRy needs 4 angles");
    Matrix m = Matrix::Zero(8, 8);
    for (int addr = 0; addr < 4; ++addr) {
        Matrix r = gate_matrix(GateKind::Ry, angles[static_cast<std::size_t>(addr)]);
        m.block(2 * addr, 2 * addr, 2, 2) = r;
    }
    return m;
}

namespace {

// Six-term channel expansion of exp(i*theta Z_0 x B), B an involution on the
// (slot1, slot2) side: cos^2 identity + sin^2 insertion + four signed
// measure/rotate cross terms. b_insert implements B, b_rot(alpha) implements
// exp(i alpha pi B / 4), b_measure records B's sign as a coarse projective
// measurement (eigenspace projectors, intra-space coherence kept).
struct FactorOps {
    std::vector<GateOp> b_insert;
    std::vector<GateOp> b_rot_plus;
    std::vector<GateOp> b_rot_minus;
    std::vector<GateOp> b_measure;  // one recorded bit, clbit written as 0
};

struct FactorTerm {
    double coefficient;
    std::vector<GateOp> ops;
    int num_records;
};

std::vector<FactorTerm> expand_factor(double theta, const FactorOps& f) {
    const double c = std::cos(theta), s = std::sin(theta);
    std::vector<FactorTerm> terms;
    auto push = [&](double w, std::vector<GateOp> ops) {
        if (std::abs(w) < 1e-14) return;
        int rec = 0;
        for (const auto& op : ops)
            if (op.kind == GateKind::MeasureZ) ++rec;
        terms.push_back({w, std::move(ops), rec});
    };
    auto join = [](std::vector<GateOp> a, const std::vector<GateOp>& b) {
        for (const auto& op : b) a.push_back(op);
        return a;
    };
    push(c * c, {});
    push(s * s, join({GateOp::z(0)}, f.b_insert));
    // exp(+-i pi Z/4) on the control up to phase is S^dg / S
    push(s * c, join({GateOp::sdg(0)}, f.b_measure));
    push(-s * c, join({GateOp::s(0)}, f.b_measure));
    push(s * c, join({GateOp::measure(0, 0)}, f.b_rot_plus));
    push(-s * c, join({GateOp::measure(0, 0)}, f.b_rot_minus));
    return terms;
}

std::vector<GateOp> renumber_records(std::vector<GateOp> ops, int offset) {
    for (auto& op : ops)
        if (op.kind == GateKind::MeasureZ) op.clbit += offset;
    return ops;
}

}  // namespace

CutExpansion expand_cut_ucry(const std::vector<double>& angles) {
    if (angles.size() != 4) throw std::invalid_argument("UCRy needs 4 angles");
    // Angle Pauli coefficients: alpha_i = b0 + b1 z0 + b2 z1 + b3 z0 z1.
    const double b0 = (angles[0] + angles[1] + angles[2] + angles[3]) / 4;
    const double b1 = (angles[0] + angles[1] - angles[2] - angles[3]) / 4;
    const double b2 = (angles[0] - angles[1] + angles[2] - angles[3]) / 4;
    const double b3 = (angles[0] - angles[1] - angles[2] + angles[3]) / 4;

    // Local ops present in every setting: Ry(b0) on the target and the
    // exp(-i b2 (Z_1 x Y)/2) rotation inside the (slot1, slot2) fragment.
    std::vector<GateOp> locals{GateOp::ry(2, b0)};
    auto zy_rotation = [](double angle) {
        // exp(-i angle (Z x Y)/2) over slots (1,2), Y mapped to Z by H S^dg.
        return std::vector<GateOp>{GateOp::sdg(2), GateOp::h(2),
                                   GateOp::cx(1, 2), GateOp::rz(2, angle),
                                   GateOp::cx(1, 2), GateOp::h(2), GateOp::s(2)};
    };
    if (std::abs(b2) > 1e-14)
        for (auto& op : zy_rotation(b2)) locals.push_back(op);

    // Factor 1: exp(-i b1 (Z_0 x Y_2)/2), theta = -b1/2, B = Y on slot 2.
    FactorOps fy;
    fy.b_insert = {GateOp::y(2)};
    fy.b_rot_plus = {GateOp::ry(2, -kPi / 2)};   // exp(+i pi Y/4)
    fy.b_rot_minus = {GateOp::ry(2, kPi / 2)};
    fy.b_measure = {GateOp::sdg(2), GateOp::h(2), GateOp::measure(2, 0),
                    GateOp::h(2), GateOp::s(2)};

    // Factor 2: exp(-i b3 (Z_0 x Z_1 Y_2)/2), B = Z x Y over slots (1,2).
    FactorOps fzy;
    fzy.b_insert = {GateOp::z(1), GateOp::y(2)};
    fzy.b_rot_plus = zy_rotation(-kPi / 2);      // exp(+i pi (ZxY)/4)
    fzy.b_rot_minus = zy_rotation(kPi / 2);
    fzy.b_measure = {GateOp::sdg(2), GateOp::h(2), GateOp::cx(1, 2),
                     GateOp::measure(2, 0), GateOp::cx(1, 2), GateOp::h(2),
                     GateOp::s(2)};

    auto terms_y = expand_factor(-b1 / 2, fy);
    auto terms_zy = expand_factor(-b3 / 2, fzy);

    CutExpansion e;
    e.num_slots = 3;
    int setting_id = 0;
    for (const auto& tz : terms_zy) {
        for (const auto& ty : terms_y) {
            CutSetting setting;
            setting.setting_id = setting_id;
            setting.ops = locals;
            for (auto& op : renumber_records(tz.ops, 0)) setting.ops.push_back(op);
            for (auto& op : renumber_records(ty.ops, tz.num_records))
                setting.ops.push_back(op);
            setting.num_records = tz.num_records + ty.num_records;
            e.settings.push_back(setting);
            QpdTerm term;
            term.coefficient = tz.coefficient * ty.coefficient;
            term.setting_id = setting_id;
            term.parity_mask = (1u << setting.num_records) - 1u;
            e.terms.push_back(term);
            ++setting_id;
        }
    }
    return e;
}

long long qpd_overhead(int k) {
    if (k < 0) throw std::invalid_argument("k must be nonnegative");
    if (k > 19) throw std::invalid_argument("overhead exceeds 64-bit range");
    long long v = 1;
    for (int i = 0; i < 2 * k; ++i) v *= 3;
    return v;
}

double sampling_variance_bound(int cut_count) {
    if (cut_count < 0) throw std::invalid_argument("cut_count must be nonnegative");
    return std::pow(9.0, cut_count);
}

std::vector<CutCandidate> sparse_cut_select(const Circuit& circuit,
                                            const std::vector<int>& addr_set,
                                            const std::vector<int>& data_set,
                                            int max_cuts, DistanceMode mode,
                                            const CouplingMap* map) {
    if (max_cuts < 0) throw std::invalid_argument("max_cuts must be nonnegative");
    std::set<int> addr(addr_set.begin(), addr_set.end());
    std::set<int> data(data_set.begin(), data_set.end());
    for (int q : addr)
        if (data.count(q)) throw std::invalid_argument("address and data sets overlap");
    if (mode == DistanceMode::PhysicalShortestPath && map == nullptr)
        throw std::invalid_argument("physical distance mode needs a coupling map");

    std::vector<CutCandidate> pool;
    for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
        const auto& op = circuit.ops[i];
        if (!is_two_qubit(op.kind)) continue;
        bool crosses = (addr.count(op.q0) && data.count(op.q1)) ||
                       (data.count(op.q0) && addr.count(op.q1));
        if (!crosses) continue;
        int d = mode == DistanceMode::VirtualAbs
                    ? std::abs(op.q0 - op.q1)
                    : map->virtual_distance(op.q0, op.q1);
        pool.push_back({static_cast<int>(i), op.q0, op.q1, d});
    }
    std::stable_sort(pool.begin(), pool.end(),
                     [](const CutCandidate& a, const CutCandidate& b) {
                         if (a.distance != b.distance) return a.distance > b.distance;
                         return a.gate_index < b.gate_index;
                     });
    if (static_cast<int>(pool.size()) > max_cuts)
        pool.resize(static_cast<std::size_t>(max_cuts));
    return pool;
}

CutPlan make_cut_plan(const Circuit& circuit,
                      const std::vector<CutCandidate>& candidates,
                      CutStrategy strategy) {
    CutPlan plan;
    plan.strategy = strategy;
    for (const auto& cand : candidates) plan.cut_indices.push_back(cand.gate_index);
    std::sort(plan.cut_indices.begin(), plan.cut_indices.end());
    plan.cut_indices.erase(
        std::unique(plan.cut_indices.begin(), plan.cut_indices.end()),
        plan.cut_indices.end());
    plan.gamma_total = 1.0;
    for (int idx : plan.cut_indices) {
        if (idx < 0 || idx >= static_cast<int>(circuit.ops.size()))
            throw std::invalid_argument("cut index outside circuit");
        const auto& op = circuit.ops[static_cast<std::size_t>(idx)];
        CutExpansion exp;
        if (op.kind == GateKind::CX)
            exp = expand_cut_cx(strategy);
        else if (op.kind == GateKind::CZ)
            exp = expand_cut_cz(strategy);
        else
            throw std::invalid_argument("only CX/CZ gates can be cut");
        plan.gamma_total *= exp.gamma();
        plan.expansions.push_back(std::move(exp));
    }
    return plan;
}

FragmentSet fragment_circuits(const Circuit& circuit, const CutPlan& plan) {
    std::set<int> cut(plan.cut_indices.begin(), plan.cut_indices.end());
    std::vector<int> parent(static_cast<std::size_t>(circuit.num_qubits));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    auto unite = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };

    const bool drop_cut_edges = plan.strategy == CutStrategy::GateCut;
    for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
        const auto& op = circuit.ops[i];
        if (!is_two_qubit(op.kind)) continue;
        if (drop_cut_edges && cut.count(static_cast<int>(i))) continue;
        unite(op.q0, op.q1);
    }

    FragmentSet fs;
    fs.fragment_of_qubit.assign(static_cast<std::size_t>(circuit.num_qubits), -1);
    std::map<int, int> root_to_fragment;
    for (int q = 0; q < circuit.num_qubits; ++q) {
        int root = find(q);
        auto [it, inserted] =
            root_to_fragment.insert({root, static_cast<int>(fs.qubit_maps.size())});
        if (inserted) fs.qubit_maps.push_back({});
        fs.fragment_of_qubit[static_cast<std::size_t>(q)] = it->second;
        fs.qubit_maps[static_cast<std::size_t>(it->second)].push_back(q);
    }
    return fs;
}

}  // namespace shardq
