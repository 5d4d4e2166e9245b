// Command-line front end: pipeline, image, ablation and verify subcommands.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "shardq/pipeline.hpp"
#include "shardq/verify.hpp"

namespace {

using namespace shardq;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void add_config_flags(CLI::App* cmd, PipelineConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "config file (key=value lines)");
    cmd->add_option("--n-addr", cfg.n_addr, "address qubits");
    cmd->add_option("--n-data", cfg.n_data, "data qubits");
    cmd->add_option("--max-cuts", cfg.max_cuts, "cut budget (default: n_data)");
    cmd->add_option("--mode", cfg.mode, "analytic | sampled");
    cmd->add_option("--shots", cfg.shots, "shots per subexperiment");
    cmd->add_option("--seed", cfg.seed, "root seed");
    cmd->add_option("--noise-p", cfg.noise_p, "two-qubit depolarizing probability");
    cmd->add_option("--backend", cfg.backend, "statevector | mps");
    cmd->add_option("--chi-max", cfg.chi_max, "MPS bond cap");
    cmd->add_option("--svd-cutoff", cfg.svd_cutoff, "MPS singular value cutoff");
    cmd->add_option("--strategy", cfg.strategy, "gate_cut | pauli_table");
    cmd->add_flag("--aqc", cfg.aqc_enabled, "compile the truncated prefix");
    cmd->add_option("--epsilon", cfg.epsilon, "AQC infidelity target");
    cmd->add_option("--distance-mode", cfg.distance_mode,
                    "virtual_abs | physical_shortest_path");
    cmd->add_option("--shot-allocation", cfg.shot_allocation,
                    "uniform | importance");
    cmd->add_option("--parallelism", cfg.parallelism, "worker threads");
    cmd->add_option("--virtual-shots", cfg.virtual_shots, "analytic count scale");
    cmd->add_option("--qubit-cap", cfg.qubit_cap, "dense simulator qubit cap");
    cmd->add_option("--input", cfg.input_path, "input data CSV (one value per line)");
    cmd->add_option("--output-dir", cfg.output_dir, "output directory");
    cmd->add_option("--coupling-map", cfg.coupling_map_path,
                    "coupling map file for physical distances");
}

PipelineConfig resolve_config(const PipelineConfig& flags,
                              const std::string& config_path, CLI::App* cmd) {
    if (config_path.empty()) return flags;
    PipelineConfig cfg = load_config_file(config_path);
    // flags given on the command line override the file
    PipelineConfig out = cfg;
    auto set_if = [&](const char* name, auto member) {
        if (cmd->count(name)) out.*member = flags.*member;
    };
    set_if("--n-addr", &PipelineConfig::n_addr);
    set_if("--n-data", &PipelineConfig::n_data);
    set_if("--max-cuts", &PipelineConfig::max_cuts);
    set_if("--mode", &PipelineConfig::mode);
    set_if("--shots", &PipelineConfig::shots);
    set_if("--seed", &PipelineConfig::seed);
    set_if("--noise-p", &PipelineConfig::noise_p);
    set_if("--backend", &PipelineConfig::backend);
    set_if("--chi-max", &PipelineConfig::chi_max);
    set_if("--svd-cutoff", &PipelineConfig::svd_cutoff);
    set_if("--strategy", &PipelineConfig::strategy);
    set_if("--epsilon", &PipelineConfig::epsilon);
    set_if("--distance-mode", &PipelineConfig::distance_mode);
    set_if("--shot-allocation", &PipelineConfig::shot_allocation);
    set_if("--parallelism", &PipelineConfig::parallelism);
    set_if("--virtual-shots", &PipelineConfig::virtual_shots);
    set_if("--qubit-cap", &PipelineConfig::qubit_cap);
    set_if("--input", &PipelineConfig::input_path);
    set_if("--output-dir", &PipelineConfig::output_dir);
    set_if("--coupling-map", &PipelineConfig::coupling_map_path);
    if (cmd->count("--aqc")) out.aqc_enabled = flags.aqc_enabled;
    return out;
}

std::vector<double> load_or_generate_data(const PipelineConfig& cfg) {
    const std::size_t need =
        (std::size_t(1) << cfg.n_addr) * static_cast<std::size_t>(cfg.n_data);
    if (!cfg.input_path.empty()) {
        auto data = data_from_csv(read_file(cfg.input_path));
        if (data.size() != need)
            throw std::invalid_argument("input length " +
                                        std::to_string(data.size()) +
                                        " != 2^n_addr * n_data = " +
                                        std::to_string(need));
        return data;
    }
    // deterministic demo payload derived from the seed
    Rng rng(derive_seed(cfg.seed, "demo-data"));
    std::vector<double> data(need);
    for (double& v : data) v = 2.0 * rng.next_double() - 1.0;
    return data;
}

void echo_config(const PipelineConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
    save_config_file(cfg.output_dir + "/config_echo.cfg", cfg);
}

int cmd_pipeline(const PipelineConfig& cfg) {
    std::vector<double> data = load_or_generate_data(cfg);
    PipelineOutput out = run_pipeline(cfg, data);
    echo_config(cfg);
    write_file(cfg.output_dir + "/input.csv", data_to_csv(data));
    write_file(cfg.output_dir + "/decoded.csv", data_to_csv(out.decoded));
    write_file(cfg.output_dir + "/counts.txt", counts_to_text(out.knit.counts));
    write_file(cfg.output_dir + "/quasi.csv", quasi_to_csv(out.knit.quasi));
    write_file(cfg.output_dir + "/angles.csv", angles_to_csv(out.payload));
    write_file(cfg.output_dir + "/jobs.json", job_results_to_json(out.results));
    write_file(cfg.output_dir + "/bench.csv",
               bench_csv_header() + "\n" + bench_csv_row(out.record) + "\n");
    if (!out.aqc_trace.empty())
        write_file(cfg.output_dir + "/aqc_trace.csv", trace_to_csv(out.aqc_trace));
    std::cout << bench_csv_header() << "\n" << bench_csv_row(out.record) << "\n";
    std::cout << "cuts at gate indices:";
    for (int idx : out.plan.cut_indices) std::cout << ' ' << idx;
    std::cout << "\nrmse " << out.record.rmse << "  rvf " << out.record.rvf << "\n";
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

int cmd_image(const PipelineConfig& cfg, const std::string& in_path,
              const std::string& out_path) {
    PgmImage input = read_pgm_file(in_path);
    ImageOutput out = run_image(cfg, input);
    echo_config(cfg);
    write_pgm_file(out_path, out.reconstructed);
    write_file(cfg.output_dir + "/bench.csv",
               bench_csv_header() + "\n" + bench_csv_row(out.record) + "\n");
    std::cout << bench_csv_header() << "\n" << bench_csv_row(out.record) << "\n";
    std::cout << "padded values: " << out.padded_values << "\n";
    std::cout << "rmse (fraction of dynamic range): " << out.record.rmse / 2.0
              << "\n";
    return 0;
}

int cmd_ablation(const PipelineConfig& cfg, const std::vector<int>& cuts,
                 int seeds) {
    std::vector<double> data = load_or_generate_data(cfg);
    auto rows = run_ablation(cfg, data, cuts, seeds);
    echo_config(cfg);
    std::ostringstream csv;
    csv << ablation_csv_header() << "\n";
    for (const auto& row : rows) csv << ablation_csv_row(row) << "\n";
    write_file(cfg.output_dir + "/ablation.csv", csv.str());
    std::cout << csv.str();
    return 0;
}

int cmd_verify() {
    VerifyReport report = run_verification();
    std::cout << report.to_text();
    return report.all_pass ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cut-and-knit quantum tensor encoding toolkit"};
    app.require_subcommand(1);

    PipelineConfig flags;
    std::string config_path;

    auto* pipe = app.add_subcommand("pipeline", "encode, cut, run, knit, decode");
    add_config_flags(pipe, flags, config_path);

    auto* image = app.add_subcommand("image", "grayscale PGM round trip");
    std::string image_in, image_out = "reconstructed.pgm";
    add_config_flags(image, flags, config_path);
    image->add_option("pgm_in", image_in, "input PGM (P2 or P5)")->required();
    image->add_option("pgm_out", image_out, "output PGM path");

    auto* ablation = app.add_subcommand("ablation", "noisy cut-vs-uncut study");
    std::vector<int> cut_range{0, 1, 2};
    int ab_seeds = 10;
    add_config_flags(ablation, flags, config_path);
    ablation->add_option("--cuts", cut_range, "cut counts to sweep");
    ablation->add_option("--ab-seeds", ab_seeds, "seeds per cut count");

    auto* verify = app.add_subcommand("verify", "conformance suites");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(verify)) return cmd_verify();
        CLI::App* active = app.got_subcommand(pipe)     ? pipe
                           : app.got_subcommand(image)  ? image
                                                        : ablation;
        PipelineConfig cfg = resolve_config(flags, config_path, active);
        if (app.got_subcommand(pipe)) return cmd_pipeline(cfg);
        if (app.got_subcommand(image)) return cmd_image(cfg, image_in, image_out);
        return cmd_ablation(cfg, cut_range, ab_seeds);
    } catch (const shardq::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return shardq::kExitConfig;
    }
}
