#include "shardq/coupling.hpp"

#include <deque>
#include <sstream>
#include <stdexcept>

namespace shardq {

void CouplingMap::add_edge(int u, int v) {
    if (u < 0 || v < 0 || u >= num_physical || v >= num_physical)
        throw std::invalid_argument("edge references invalid physical qubit");
    if (u == v) throw std::invalid_argument("self edge");
    edges.insert({std::min(u, v), std::max(u, v)});
}

bool CouplingMap::has_edge(int u, int v) const {
    return edges.count({std::min(u, v), std::max(u, v)}) > 0;
}

int CouplingMap::physical_distance(int u, int v) const {
    if (u == v) return 0;
    std::vector<int> dist(static_cast<std::size_t>(num_physical), -1);
    std::deque<int> queue{u};
    dist[static_cast<std::size_t>(u)] = 0;
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        for (const auto& [a, b] : edges) {
            int nb = (a == cur) ? b : (b == cur ? a : -1);
            if (nb < 0 || dist[static_cast<std::size_t>(nb)] >= 0) continue;
            dist[static_cast<std::size_t>(nb)] = dist[static_cast<std::size_t>(cur)] + 1;
            if (nb == v) return dist[static_cast<std::size_t>(nb)];
            queue.push_back(nb);
        }
    }
    return -1;
}

int CouplingMap::virtual_distance(int a, int b) const {
    if (a < 0 || b < 0 || a >= static_cast<int>(layout.size()) ||
        b >= static_cast<int>(layout.size()))
        throw std::invalid_argument("virtual qubit outside layout");
    return physical_distance(layout[static_cast<std::size_t>(a)],
                             layout[static_cast<std::size_t>(b)]);
}

CouplingMap coupling_map_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    if (!(in >> word) || word != "physical")
        throw std::invalid_argument("coupling map must start with a physical header");
    CouplingMap map;
    if (!(in >> map.num_physical))
        throw std::invalid_argument("malformed physical count");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "layout") {
            int p;
            while (ls >> p) map.layout.push_back(p);
            std::set<int> seen(map.layout.begin(), map.layout.end());
            if (seen.size() != map.layout.size())
                throw std::invalid_argument("layout must be injective");
        } else {
            int u = std::stoi(first), v;
            if (!(ls >> v)) throw std::invalid_argument("edge line needs two qubits");
            map.add_edge(u, v);
        }
    }
    return map;
}

std::string coupling_map_to_text(const CouplingMap& map) {
    std::ostringstream out;
    out << "physical " << map.num_physical << "\n";
    for (const auto& [u, v] : map.edges) out << u << ' ' << v << "\n";
    if (!map.layout.empty()) {
        out << "layout";
        for (int p : map.layout) out << ' ' << p;
        out << "\n";
    }
    return out.str();
}

CouplingMap sample_heavy_hex_map() {
    // Two linear rows (0-4 and 7-11) joined by bridge qubits 5 and 6, the
    // degree<=3 neighborhood pattern of a heavy-hex lattice cell.
    CouplingMap map;
    map.num_physical = 12;
    for (int q : {0, 1, 2, 3}) map.add_edge(q, q + 1);
    for (int q : {7, 8, 9, 10}) map.add_edge(q, q + 1);
    map.add_edge(0, 5);
    map.add_edge(5, 7);
    map.add_edge(4, 6);
    map.add_edge(6, 11);
    map.layout = {0, 1, 2, 7, 8, 9};
    return map;
}

}  // namespace shardq
