#pragma once

#include <set>
#include <string>
#include <vector>

#include "shardq/types.hpp"

namespace shardq {

struct CouplingMap {
    int num_physical = 0;
    std::set<std::pair<int, int>> edges;      // unordered pairs, stored (lo, hi)
    std::vector<int> layout;                  // virtual -> physical, injective

    void add_edge(int u, int v);
    bool has_edge(int u, int v) const;
    // BFS shortest path between physical qubits; -1 if disconnected.
    int physical_distance(int u, int v) const;
    // Distance between virtual qubits under the layout.
    int virtual_distance(int a, int b) const;
};

CouplingMap coupling_map_from_text(const std::string& text);
std::string coupling_map_to_text(const CouplingMap& map);

// Bundled sample mirroring a heavy-hex neighborhood: two rows of linearly
// coupled qubits joined by bridge qubits.
CouplingMap sample_heavy_hex_map();

}  // namespace shardq
