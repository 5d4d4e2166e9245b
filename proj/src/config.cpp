#include "shardq/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace shardq {

CutStrategy PipelineConfig::cut_strategy() const {
    if (strategy == "gate_cut") return CutStrategy::GateCut;
    if (strategy == "pauli_table") return CutStrategy::PauliTable;
    throw std::invalid_argument("unknown strategy: " + strategy);
}

DistanceMode PipelineConfig::dist_mode() const {
    if (distance_mode == "virtual_abs") return DistanceMode::VirtualAbs;
    if (distance_mode == "physical_shortest_path")
        return DistanceMode::PhysicalShortestPath;
    throw std::invalid_argument("unknown distance mode: " + distance_mode);
}

void PipelineConfig::validate() const {
    if (n_addr < 1 || n_data < 1)
        throw std::invalid_argument("n_addr and n_data must be >= 1");
    if (mode != "analytic" && mode != "sampled")
        throw std::invalid_argument("mode must be analytic or sampled");
    if (mode == "sampled" && shots < 1)
        throw std::invalid_argument("sampled mode needs shots >= 1");
    if (noise_p < 0.0 || noise_p > 1.0)
        throw std::invalid_argument("noise_p must lie in [0,1]");
    if (backend != "statevector" && backend != "mps")
        throw std::invalid_argument("backend must be statevector or mps");
    if (chi_max < 1) throw std::invalid_argument("chi_max must be >= 1");
    if (epsilon <= 0.0 || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must lie in (0,1)");
    if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
    if (virtual_shots < 1.0)
        throw std::invalid_argument("virtual_shots must be >= 1");
    if (shot_allocation != "uniform" && shot_allocation != "importance")
        throw std::invalid_argument("shot_allocation must be uniform or importance");
    cut_strategy();
    dist_mode();
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

PipelineConfig config_from_text(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    const std::map<std::string, std::function<void(const std::string&)>> setters = {
        {"n_addr", [&](const std::string& v) { cfg.n_addr = std::stoi(v); }},
        {"n_data", [&](const std::string& v) { cfg.n_data = std::stoi(v); }},
        {"max_cuts", [&](const std::string& v) { cfg.max_cuts = std::stoi(v); }},
        {"mode", [&](const std::string& v) { cfg.mode = v; }},
        {"shots", [&](const std::string& v) { cfg.shots = std::stoll(v); }},
        {"seed", [&](const std::string& v) { cfg.seed = std::stoull(v); }},
        {"noise_p", [&](const std::string& v) { cfg.noise_p = std::stod(v); }},
        {"backend", [&](const std::string& v) { cfg.backend = v; }},
        {"chi_max", [&](const std::string& v) { cfg.chi_max = std::stoi(v); }},
        {"svd_cutoff", [&](const std::string& v) { cfg.svd_cutoff = std::stod(v); }},
        {"strategy", [&](const std::string& v) { cfg.strategy = v; }},
        {"aqc_enabled",
         [&](const std::string& v) { cfg.aqc_enabled = v == "true" || v == "1"; }},
        {"epsilon", [&](const std::string& v) { cfg.epsilon = std::stod(v); }},
        {"distance_mode", [&](const std::string& v) { cfg.distance_mode = v; }},
        {"shot_allocation",
         [&](const std::string& v) { cfg.shot_allocation = v; }},
        {"parallelism", [&](const std::string& v) { cfg.parallelism = std::stoi(v); }},
        {"virtual_shots",
         [&](const std::string& v) { cfg.virtual_shots = std::stod(v); }},
        {"qubit_cap", [&](const std::string& v) { cfg.qubit_cap = std::stoi(v); }},
        {"input_path", [&](const std::string& v) { cfg.input_path = v; }},
        {"output_dir", [&](const std::string& v) { cfg.output_dir = v; }},
        {"coupling_map_path",
         [&](const std::string& v) { cfg.coupling_map_path = v; }},
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line needs key=value: " + line);
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto it = setters.find(key);
        if (it == setters.end())
            throw std::invalid_argument("unknown config key: " + key);
        it->second(value);
    }
    return cfg;
}

std::string config_to_text(const PipelineConfig& c) {
    std::ostringstream out;
    out << "n_addr=" << c.n_addr << "\n";
    out << "n_data=" << c.n_data << "\n";
    out << "max_cuts=" << c.effective_max_cuts() << "\n";
    out << "mode=" << c.mode << "\n";
    out << "shots=" << c.shots << "\n";
    out << "seed=" << c.seed << "\n";
    out << "noise_p=" << fmt_double(c.noise_p) << "\n";
    out << "backend=" << c.backend << "\n";
    out << "chi_max=" << c.chi_max << "\n";
    out << "svd_cutoff=" << fmt_double(c.svd_cutoff) << "\n";
    out << "strategy=" << c.strategy << "\n";
    out << "aqc_enabled=" << (c.aqc_enabled ? "true" : "false") << "\n";
    out << "epsilon=" << fmt_double(c.epsilon) << "\n";
    out << "distance_mode=" << c.distance_mode << "\n";
    out << "shot_allocation=" << c.shot_allocation << "\n";
    out << "parallelism=" << c.parallelism << "\n";
    out << "virtual_shots=" << fmt_double(c.virtual_shots) << "\n";
    out << "qubit_cap=" << c.qubit_cap << "\n";
    if (!c.input_path.empty()) out << "input_path=" << c.input_path << "\n";
    out << "output_dir=" << c.output_dir << "\n";
    if (!c.coupling_map_path.empty())
        out << "coupling_map_path=" << c.coupling_map_path << "\n";
    return out.str();
}

PipelineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_text(buf.str());
}

void save_config_file(const std::string& path, const PipelineConfig& config) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << config_to_text(config);
}

}  // namespace shardq
