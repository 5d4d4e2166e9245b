#include "shardq/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "shardq/noise.hpp"
#include "shardq/statevector.hpp"

namespace shardq {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

RunMode run_mode_of(const PipelineConfig& cfg, std::uint64_t seed) {
    RunMode mode;
    if (cfg.mode == "analytic") {
        mode = RunMode::analytic(cfg.virtual_shots);
    } else {
        mode = RunMode::sampled(cfg.shots, seed, cfg.noise_p);
    }
    mode.use_mps = cfg.backend == "mps";
    mode.chi_max = cfg.chi_max;
    mode.svd_cutoff = cfg.svd_cutoff;
    return mode;
}

std::map<std::string, double> unreversed_weights(const QuasiDistribution& quasi) {
    std::map<std::string, double> weights;
    for (const auto& [k, v] : quasi.values) weights[reverse_key(k)] += v;
    return weights;
}

std::vector<int> range_int(int n, int base = 0) {
    std::vector<int> v;
    for (int i = 0; i < n; ++i) v.push_back(base + i);
    return v;
}

}  // namespace

double rmse(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("rmse needs equal nonempty vectors");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc / static_cast<double>(a.size()));
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("pearson needs two equal vectors");
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(a.size());
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va < 1e-30 || vb < 1e-30) return va < 1e-30 && vb < 1e-30 ? 1.0 : 0.0;
    return cov / std::sqrt(va * vb);
}

namespace {

template <typename F>
auto stage(int code, const char* name, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(code, name, e.what());
    }
}

}  // namespace

PipelineOutput run_pipeline(const PipelineConfig& cfg,
                            const std::vector<double>& data) {
    stage(kExitConfig, "config", [&] {
        cfg.validate();
        if (cfg.mode == "analytic" && cfg.noise_p > 0.0)
            throw std::invalid_argument("noise requires sampled mode");
    });

    AnglePayload payload;
    Circuit circuit;
    stage(kExitEncode, "encode", [&] {
        payload = data_to_angles(data, cfg.n_addr, cfg.n_data);
        circuit = build_encoder_circuit(payload);
        if (circuit.num_qubits > cfg.qubit_cap)
            throw std::invalid_argument("qubit cap exceeded by encoder circuit");
    });

    PipelineOutput out;
    Circuit exec_circuit = circuit;
    CutPlan exec_plan;
    stage(kExitCut, "cut", [&] {
        CouplingMap map;
        const CouplingMap* map_ptr = nullptr;
        if (cfg.dist_mode() == DistanceMode::PhysicalShortestPath) {
            map = cfg.coupling_map_path.empty()
                      ? sample_heavy_hex_map()
                      : coupling_map_from_text([&] {
                            std::ifstream in(cfg.coupling_map_path);
                            if (!in)
                                throw std::runtime_error("cannot open " +
                                                         cfg.coupling_map_path);
                            std::ostringstream buf;
                            buf << in.rdbuf();
                            return buf.str();
                        }());
            map_ptr = &map;
        }
        out.candidates =
            sparse_cut_select(circuit, range_int(cfg.n_addr),
                              range_int(cfg.n_data, cfg.n_addr),
                              cfg.effective_max_cuts(), cfg.dist_mode(), map_ptr);
        out.plan = make_cut_plan(circuit, out.candidates, cfg.cut_strategy());
        exec_plan = out.plan;

        if (cfg.aqc_enabled && !out.plan.cut_indices.empty()) {
            // The executed circuit must stay equivalent to the original, so
            // the ansatz refits the truncated prefix (the reinserted cut
            // gates carry the long-range entanglement through the QPD).
            PrefixSplit split = split_prefix_suffix(circuit, out.plan);
            MpsState target = simulate_mps(split.c1_trunc.without_measurements(),
                                           cfg.chi_max, cfg.svd_cutoff);
            if (target.discarded_weight > 1e-8)
                out.warnings.push_back(
                    "MPS target truncation weight above 1e-8; epsilon floor "
                    "not attainable");
            Ansatz ansatz = build_ansatz(split.c1_trunc.without_measurements());
            OptimizeOptions opts;
            opts.epsilon = cfg.epsilon;
            CompilationResult compiled = optimize(ansatz, target, split, opts);
            out.aqc_infidelity = compiled.final_infidelity;
            out.aqc_trace = compiled.trace;
            exec_circuit = compiled.compiled_circuit;
            StateVector want =
                simulate_statevector(circuit.without_measurements());
            StateVector got =
                simulate_statevector(exec_circuit.without_measurements());
            double assembly_f = std::norm(want.amplitudes.dot(got.amplitudes));
            if (assembly_f < 1.0 - 2.0 * cfg.epsilon)
                out.warnings.push_back(
                    "reassembled circuit fidelity " + std::to_string(assembly_f) +
                    "; cut gates do not commute to the prefix boundary");
            std::vector<CutCandidate> moved;
            for (std::size_t m = 0; m < compiled.cut_indices_in_compiled.size();
                 ++m) {
                const GateOp& g = exec_circuit.ops[static_cast<std::size_t>(
                    compiled.cut_indices_in_compiled[m])];
                moved.push_back({compiled.cut_indices_in_compiled[m], g.q0, g.q1, 0});
            }
            exec_plan = make_cut_plan(exec_circuit, moved, cfg.cut_strategy());
        }
    });

    auto start = Clock::now();
    MaterializedCuts mats;
    std::vector<JobResult> results;
    stage(kExitExecute, "execute", [&] {
        mats = materialize_subexperiments(exec_circuit, exec_plan);
        RunMode mode = run_mode_of(cfg, cfg.seed);
        std::vector<double> weights;
        const std::vector<double>* weights_ptr = nullptr;
        if (cfg.shot_allocation == "importance") {
            weights = job_importance_weights(mats);
            weights_ptr = &weights;
        }
        results = run_subexperiments(mats.subexperiments, mode, cfg.parallelism,
                                     SimLimits{cfg.qubit_cap, 16}, weights_ptr);
    });
    stage(kExitReconstruct, "reconstruct", [&] {
        out.knit =
            reconstruct_global_counts(results, mats.entries, mats.n_obs_bits);
    });
    double elapsed = seconds_since(start);
    out.results = std::move(results);
    out.payload = payload;

    stage(kExitDecode, "decode", [&] {
        if (cfg.mode == "analytic") {
            out.decoded = decode_weights(unreversed_weights(out.knit.quasi),
                                         cfg.n_addr, cfg.n_data);
        } else {
            std::map<std::string, double> weights;
            for (const auto& [k, v] : out.knit.counts.counts)
                weights[reverse_key(k)] += static_cast<double>(v);
            out.decoded = decode_weights(weights, cfg.n_addr, cfg.n_data);
        }
    });

    out.record.cut_count = static_cast<int>(exec_plan.cut_indices.size());
    out.record.strategy = cfg.strategy;
    out.record.subexperiment_count =
        static_cast<long long>(mats.subexperiments.size());
    out.record.shots =
        cfg.mode == "analytic" ? static_cast<long long>(cfg.virtual_shots) : cfg.shots;
    out.record.rmse = rmse(out.decoded, payload.data);
    out.record.rvf = pearson(out.decoded, payload.data);
    out.record.wall_time_s = elapsed;
    return out;
}

std::vector<double> run_direct(const PipelineConfig& cfg,
                               const std::vector<double>& data) {
    cfg.validate();
    AnglePayload payload = data_to_angles(data, cfg.n_addr, cfg.n_data);
    Circuit circuit = build_encoder_circuit(payload);
    SimLimits limits{cfg.qubit_cap, 16};
    if (cfg.mode == "analytic") {
        if (cfg.backend == "mps") {
            MpsState state =
                simulate_mps(circuit.without_measurements(), cfg.chi_max,
                             cfg.svd_cutoff);
            StateVector dense = mps_to_statevector(state);
            std::map<std::string, double> weights;
            for (Eigen::Index i = 0; i < dense.amplitudes.size(); ++i) {
                double p = std::norm(dense.amplitudes(i));
                if (p > 1e-18)
                    weights[bits_of_index(static_cast<std::size_t>(i),
                                          circuit.num_qubits)] += p;
            }
            return decode_weights(weights, cfg.n_addr, cfg.n_data);
        }
        Distribution dist = simulate_distribution(circuit, limits);
        std::map<std::string, double> weights(dist.begin(), dist.end());
        return decode_weights(weights, cfg.n_addr, cfg.n_data);
    }
    CountsTable counts =
        cfg.noise_p > 0.0
            ? sample_counts_noisy(circuit, cfg.noise_p, cfg.shots, cfg.seed, limits)
            : sample_counts(circuit, cfg.shots, cfg.seed, limits);
    return decode_counts(counts, cfg.n_addr, cfg.n_data);
}

ImageOutput run_image(const PipelineConfig& cfg, const PgmImage& input) {
    const std::size_t capacity =
        (std::size_t(1) << cfg.n_addr) * static_cast<std::size_t>(cfg.n_data);
    if (static_cast<std::size_t>(input.size()) > capacity)
        throw std::invalid_argument("image exceeds 2^n_addr * n_data values");

    std::vector<double> data(capacity, 0.0);
    for (int i = 0; i < input.size(); ++i)
        data[static_cast<std::size_t>(i)] =
            2.0 * input.pixels[static_cast<std::size_t>(i)] / input.maxval - 1.0;

    ImageOutput out;
    out.padded_values = static_cast<int>(capacity) - input.size();
    PipelineOutput run = run_pipeline(cfg, data);

    out.reconstructed = input;
    for (int i = 0; i < input.size(); ++i) {
        double v = (run.decoded[static_cast<std::size_t>(i)] + 1.0) / 2.0 *
                   input.maxval;
        out.reconstructed.pixels[static_cast<std::size_t>(i)] = std::clamp(
            static_cast<int>(std::lround(v)), 0, input.maxval);
    }

    // metrics over the active pixels, in data units
    std::vector<double> truth, got;
    for (int i = 0; i < input.size(); ++i) {
        truth.push_back(data[static_cast<std::size_t>(i)]);
        got.push_back(run.decoded[static_cast<std::size_t>(i)]);
    }
    out.record = run.record;
    out.record.rmse = rmse(got, truth);
    out.record.rvf = pearson(got, truth);
    // With exact probabilities the reconstruction error must stay below one
    // percent of the dynamic range.
    if (cfg.mode == "analytic" && out.record.rmse / 2.0 >= 0.01)
        throw StageError(kExitDecode, "image",
                         "analytic reconstruction error above one percent of "
                         "the dynamic range");
    return out;
}

namespace {

// Median of three repeat-normalized stage timings; batches shorter than 50 ms
// are repeated so the clock resolution stays irrelevant.
double measure_stage_seconds(const PipelineConfig& cfg, const Circuit& circuit,
                             const CutPlan& plan) {
    auto run_once = [&] {
        MaterializedCuts mats = materialize_subexperiments(circuit, plan);
        RunMode mode = run_mode_of(cfg, cfg.seed);
        auto results = run_subexperiments(mats.subexperiments, mode,
                                          cfg.parallelism,
                                          SimLimits{cfg.qubit_cap, 16});
        reconstruct_global_counts(results, mats.entries, mats.n_obs_bits);
    };
    run_once();  // warm caches
    std::vector<double> samples;
    for (int rep = 0; rep < 3; ++rep) {
        int batch = 1;
        while (true) {
            auto start = Clock::now();
            for (int i = 0; i < batch; ++i) run_once();
            double elapsed = seconds_since(start);
            if (elapsed >= 0.05) {
                samples.push_back(elapsed / batch);
                break;
            }
            batch *= 2;
        }
    }
    std::sort(samples.begin(), samples.end());
    return samples[1];
}

double mean(const std::vector<double>& v) {
    double acc = 0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double stdev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v), acc = 0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<AblationRow> run_ablation(const PipelineConfig& config,
                                      const std::vector<double>& data,
                                      const std::vector<int>& cut_range,
                                      int seeds) {
    if (config.mode != "sampled" || config.noise_p <= 0.0)
        throw std::invalid_argument(
            "ablation compares noisy sampled runs; set mode=sampled, noise_p>0");
    if (seeds < 1) throw std::invalid_argument("need at least one seed");

    std::vector<AblationRow> rows;
    for (int cuts : cut_range) {
        PipelineConfig cfg = config;
        cfg.max_cuts = cuts;

        AblationRow row;
        row.cut_count = cuts;
        row.strategy = cfg.strategy;
        row.shots_per_job = cfg.shots;
        row.seeds = seeds;

        std::vector<double> cut_rmse, uncut_rmse, improvements;
        for (int s = 0; s < seeds; ++s) {
            PipelineConfig run_cfg = cfg;
            run_cfg.seed = derive_seed(config.seed,
                                       "ablation-" + std::to_string(cuts) + "-" +
                                           std::to_string(s));
            PipelineOutput cut_out = run_pipeline(run_cfg, data);
            row.subexperiments = cut_out.record.subexperiment_count;
            double rc = cut_out.record.rmse;

            PipelineConfig base_cfg = run_cfg;
            base_cfg.max_cuts = 0;
            std::vector<double> base = run_direct(base_cfg, data);
            AnglePayload payload = data_to_angles(data, cfg.n_addr, cfg.n_data);
            double rb = rmse(base, payload.data);

            cut_rmse.push_back(rc);
            uncut_rmse.push_back(rb);
            if (rc <= rb) ++row.wins;
            if (rb > 1e-12) improvements.push_back((rb - rc) / rb);
        }
        row.rmse_mean = mean(cut_rmse);
        row.rmse_std = stdev(cut_rmse);
        row.uncut_rmse_mean = mean(uncut_rmse);
        row.uncut_rmse_std = stdev(uncut_rmse);
        row.improvement_rel_mean = improvements.empty() ? 0.0 : mean(improvements);

        AnglePayload payload = data_to_angles(data, cfg.n_addr, cfg.n_data);
        Circuit circuit = build_encoder_circuit(payload);
        auto candidates = sparse_cut_select(
            circuit, range_int(cfg.n_addr), range_int(cfg.n_data, cfg.n_addr),
            cfg.effective_max_cuts(), cfg.dist_mode(), nullptr);
        CutPlan plan = make_cut_plan(circuit, candidates, cfg.cut_strategy());
        row.wall_time_s = measure_stage_seconds(cfg, circuit, plan);
        rows.push_back(row);
    }
    return rows;
}

std::string bench_csv_header() {
    return "cut_count,strategy,subexperiments,shots,rmse,rvf,wall_time_s";
}

std::string bench_csv_row(const BenchRecord& r) {
    std::ostringstream out;
    out.precision(10);
    out << r.cut_count << ',' << r.strategy << ',' << r.subexperiment_count << ','
        << r.shots << ',' << r.rmse << ',' << r.rvf << ',' << r.wall_time_s;
    return out.str();
}

std::string ablation_csv_header() {
    return "cut_count,strategy,subexperiments,shots_per_job,seeds,rmse_mean,"
           "rmse_std,uncut_rmse_mean,uncut_rmse_std,wins,improvement_rel_mean,"
           "wall_time_s";
}

std::string ablation_csv_row(const AblationRow& r) {
    std::ostringstream out;
    out.precision(10);
    out << r.cut_count << ',' << r.strategy << ',' << r.subexperiments << ','
        << r.shots_per_job << ',' << r.seeds << ',' << r.rmse_mean << ','
        << r.rmse_std << ',' << r.uncut_rmse_mean << ',' << r.uncut_rmse_std << ','
        << r.wins << ',' << r.improvement_rel_mean << ',' << r.wall_time_s;
    return out.str();
}

std::string data_to_csv(const std::vector<double>& data) {
    std::ostringstream out;
    out.precision(17);
    for (double v : data) out << v << '\n';
    return out.str();
}

std::vector<double> data_from_csv(const std::string& text) {
    std::vector<double> data;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        data.push_back(std::stod(line));
    }
    return data;
}

std::string counts_to_text(const CountsTable& counts) {
    std::ostringstream out;
    out << "shots " << counts.shots << " bit_order " << counts.bit_order << "\n";
    for (const auto& [k, v] : counts.counts) out << k << ' ' << v << "\n";
    return out.str();
}

}  // namespace shardq
