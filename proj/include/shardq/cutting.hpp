#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shardq/circuit.hpp"
#include "shardq/coupling.hpp"
#include "shardq/types.hpp"

namespace shardq {

enum class CutStrategy { GateCut, PauliTable };
enum class DistanceMode { VirtualAbs, PhysicalShortestPath };

struct CutCandidate {
    int gate_index;
    int control;
    int target;
    int distance;
};

// One circuit variant for a cut. Ops are written against local slots: slot 0
// is the cut gate's first endpoint, slot 1 the second; UCRy expansions add
// slot 2. MeasureZ clbits number the setting's recorded bits from 0.
struct CutSetting {
    int setting_id = 0;
    std::vector<GateOp> ops;
    int num_records = 0;
    bool keep_gate = false;  // wire-cut style: the original gate stays after the splice
};

// One signed post-processing row reading a setting. parity_mask selects which
// of the setting's recorded bits flip the sign.
struct QpdTerm {
    double coefficient = 0.0;
    int setting_id = 0;
    unsigned parity_mask = 0;
};

struct CutExpansion {
    std::vector<CutSetting> settings;
    std::vector<QpdTerm> terms;
    int num_slots = 2;

    double gamma() const {
        double g = 0.0;
        for (const auto& t : terms) g += std::abs(t.coefficient);
        return g;
    }
};

// QPD tables for a cut CX (or CZ). GateCut is the six-setting decomposition
// derived from the CZ rotation identity; PauliTable is the eight-row
// measure-and-reprepare wire cut on the control endpoint with the gate kept.
CutExpansion expand_cut_cx(CutStrategy strategy);
CutExpansion expand_cut_cz(CutStrategy strategy);

// QPD of the two-control UCRy block, separating control slot 0 from the
// (slot 1, slot 2) pair. Built by expanding the two nonlocal rotation factors
// of the block's Pauli decomposition; terms with negligible weight are pruned.
CutExpansion expand_cut_ucry(const std::vector<double>& angles);

// Dense 8x8 UCRy(angles) over |slot0 slot1 slot2>, the oracle target.
Matrix ucry_matrix(const std::vector<double>& angles);

long long qpd_overhead(int k);                 // 3^(2k)
double sampling_variance_bound(int cut_count); // 9^cut_count

std::vector<CutCandidate> sparse_cut_select(
    const Circuit& circuit, const std::vector<int>& addr_set,
    const std::vector<int>& data_set, int max_cuts,
    DistanceMode mode = DistanceMode::VirtualAbs,
    const CouplingMap* map = nullptr);

struct CutPlan {
    std::vector<int> cut_indices;  // sorted ascending
    CutStrategy strategy = CutStrategy::GateCut;
    std::vector<CutExpansion> expansions;  // parallel to cut_indices
    double gamma_total = 1.0;
};

CutPlan make_cut_plan(const Circuit& circuit,
                      const std::vector<CutCandidate>& candidates,
                      CutStrategy strategy);

struct FragmentSet {
    std::vector<std::vector<int>> qubit_maps;  // fragment-local -> global qubit
    std::vector<int> fragment_of_qubit;        // global qubit -> fragment id
};

// Connected components of the two-qubit interaction graph once cut gates are
// removed. PauliTable keeps the cut edges (the wire cut leaves the gate in
// place), so its endpoints stay joined; K may be 1 either way.
FragmentSet fragment_circuits(const Circuit& circuit, const CutPlan& plan);

}  // namespace shardq
