// Acceptance suite: every release criterion in one binary, one line each.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "shardq/aqc.hpp"
#include "shardq/choi.hpp"
#include "shardq/encoder.hpp"
#include "shardq/gates.hpp"
#include "shardq/knitting.hpp"
#include "shardq/mps.hpp"
#include "shardq/pgm.hpp"
#include "shardq/pipeline.hpp"
#include "shardq/verify.hpp"

using namespace shardq;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("%s  %s%s%s\n", pass ? "PASS" : "FAIL", name.c_str(),
                detail.empty() ? "" : "  -- ", detail.c_str());
    if (!pass) ++g_failures;
}

double now_seconds() {
    using Clock = std::chrono::steady_clock;
    static const Clock::time_point t0 = Clock::now();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = 2.0 * rng.next_double() - 1.0;
    return v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
void criterion_knit_exactness() {
    double start = now_seconds();
    AnglePayload payload = data_to_angles({0.62, -0.34, 0.15, 0.88}, 2, 1);
    Circuit circuit = build_encoder_circuit(payload);
    Distribution direct = simulate_distribution(circuit);

    double worst = 0.0;
    for (CutStrategy strategy : {CutStrategy::GateCut, CutStrategy::PauliTable}) {
        auto candidates = sparse_cut_select(circuit, {0, 1}, {2}, 1);
        CutPlan plan = make_cut_plan(circuit, candidates, strategy);
        MaterializedCuts mats = materialize_subexperiments(circuit, plan);
        auto results = run_subexperiments(mats.subexperiments, RunMode::analytic(), 2);
        KnitResult knit =
            reconstruct_global_counts(results, mats.entries, mats.n_obs_bits);
        for (const auto& [key, p] : direct) {
            auto it = knit.quasi.values.find(reverse_key(key));
            double got = it == knit.quasi.values.end() ? 0.0 : it->second;
            worst = std::max(worst, std::abs(p - got));
        }
        for (const auto& [key, v] : knit.quasi.values)
            if (!direct.count(reverse_key(key))) worst = std::max(worst, std::abs(v));
    }
    double elapsed = now_seconds() - start;
    report("1. knit exactness (gate_cut + pauli_table, 1 cut, analytic)",
           worst < 1e-9 && elapsed < 10.0,
           "max |quasi - direct| = " + fmt(worst) + ", " + fmt(elapsed) + " s");
}

// ---------------------------------------------------------------- criterion 2
void criterion_channel_conformance() {
    double d_gate = choi_distance(
        choi_of_expansion(expand_cut_cx(CutStrategy::GateCut)),
        choi_of_unitary(gate_matrix(GateKind::CX)));
    double d_pauli = choi_distance(
        choi_of_expansion(expand_cut_cx(CutStrategy::PauliTable)),
        choi_of_unitary(gate_matrix(GateKind::CX)));
    std::vector<double> angles{0.83, -0.41, 1.92, 0.27};
    double d_ucry = choi_distance(choi_of_expansion(expand_cut_ucry(angles)),
                                  choi_of_unitary(ucry_matrix(angles)));
    VerifyReport verify = run_verification();
    bool mentions_correction = false;
    for (const auto& line : verify.lines)
        if (line.name.find("corrected") != std::string::npos ||
            line.name.find("correction") != std::string::npos)
            mentions_correction = true;
    report("2. channel conformance (Choi oracle, verify subcommand)",
           d_gate < 1e-10 && d_pauli < 1e-10 && d_ucry < 1e-10 &&
               verify.all_pass && mentions_correction,
           "CX gate_cut " + fmt(d_gate) + ", pauli_table " + fmt(d_pauli) +
               ", UCRy " + fmt(d_ucry) +
               (mentions_correction ? ", oracle corrections reported" : ""));
}

// ---------------------------------------------------------------- criterion 3
void criterion_overhead_law() {
    // subexperiment and post-processing term counts
    AnglePayload payload = data_to_angles(random_values(4 * 3, 77), 2, 3);
    Circuit circuit = build_encoder_circuit(payload);
    bool counts_ok = true;
    long long expect_subs = 1, expect_terms = 1;
    for (int m = 0; m <= 3; ++m) {
        auto candidates = sparse_cut_select(circuit, {0, 1}, {2, 3, 4}, m);
        CutPlan gate_plan = make_cut_plan(circuit, candidates, CutStrategy::GateCut);
        CutPlan pauli_plan =
            make_cut_plan(circuit, candidates, CutStrategy::PauliTable);
        MaterializedCuts gate_m = materialize_subexperiments(circuit, gate_plan);
        MaterializedCuts pauli_m = materialize_subexperiments(circuit, pauli_plan);
        counts_ok = counts_ok &&
                    static_cast<long long>(gate_m.subexperiments.size()) == expect_subs &&
                    static_cast<long long>(pauli_m.subexperiments.size()) == expect_subs &&
                    static_cast<long long>(pauli_m.entries.size()) == expect_terms;
        counts_ok = counts_ok && sampling_variance_bound(m) ==
                                     static_cast<double>(qpd_overhead(m));
        expect_subs *= 6;
        expect_terms *= 8;
    }

    // wall-time slope: sampled noisy runs keep the per-job cost flat, so the
    // stage time tracks the subexperiment count
    PipelineConfig cfg;
    cfg.n_addr = 2;
    cfg.n_data = 3;
    cfg.mode = "sampled";
    cfg.shots = 2000;
    cfg.noise_p = 0.02;
    cfg.seed = 9;
    std::vector<double> times;
    for (int m = 0; m <= 3; ++m) {
        auto candidates = sparse_cut_select(circuit, {0, 1}, {2, 3, 4}, m);
        CutPlan plan = make_cut_plan(circuit, candidates, CutStrategy::GateCut);
        MaterializedCuts mats = materialize_subexperiments(circuit, plan);
        auto run_once = [&] {
            RunMode mode = RunMode::sampled(cfg.shots, cfg.seed, cfg.noise_p);
            auto results = run_subexperiments(mats.subexperiments, mode, 1);
            reconstruct_global_counts(results, mats.entries, mats.n_obs_bits);
        };
        run_once();
        std::vector<double> samples;
        for (int rep = 0; rep < 3; ++rep) {
            int batch = 1;
            while (true) {
                double t0 = now_seconds();
                for (int i = 0; i < batch; ++i) run_once();
                double dt = now_seconds() - t0;
                if (dt >= 0.05) {
                    samples.push_back(dt / batch);
                    break;
                }
                batch *= 2;
            }
        }
        std::sort(samples.begin(), samples.end());
        times.push_back(samples[1]);
    }
    bool slope_ok = true;
    std::string slopes;
    for (std::size_t m = 0; m + 1 < times.size(); ++m) {
        double slope = std::log(times[m + 1] / times[m]);
        slopes += fmt(slope / std::log(6.0)) + " ";
        if (slope < 0.75 * std::log(6.0) || slope > 1.25 * std::log(6.0))
            slope_ok = false;
    }
    report("3. overhead law (6^M settings, 8^M terms, 9^M bound, time slope)",
           counts_ok && slope_ok, "slope/log6 per step: " + slopes);
}

// ---------------------------------------------------------------- criterion 4
void criterion_roundtrip() {
    // analytic through the cut pipeline at the default cut budget
    double worst = 0.0;
    for (auto [na, nd] : std::vector<std::pair<int, int>>{{2, 1}, {3, 2}, {4, 3}, {5, 4}}) {
        PipelineConfig cfg;
        cfg.n_addr = na;
        cfg.n_data = nd;
        cfg.mode = "analytic";
        std::vector<double> data =
            random_values((std::size_t(1) << na) * static_cast<std::size_t>(nd),
                        1000 + static_cast<std::uint64_t>(na));
        PipelineOutput out = run_pipeline(cfg, data);
        for (std::size_t i = 0; i < data.size(); ++i)
            worst = std::max(worst, std::abs(out.decoded[i] - data[i]));
    }
    bool analytic_ok = worst < 1e-6;

    // sampled: 1e5 shots per setting through the cut pipeline
    PipelineConfig cfg;
    cfg.n_addr = 3;
    cfg.n_data = 2;
    cfg.mode = "sampled";
    cfg.shots = 100000;
    cfg.seed = 4242;
    std::vector<double> data = random_values(16, 11);
    PipelineOutput sampled = run_pipeline(cfg, data);
    bool sampled_ok = sampled.record.rmse < 0.02;

    // quadrupling shots halves the error (within 30 percent), direct path
    auto rmse_at = [&](long long shots) {
        double acc = 0.0;
        const int seeds = 8;
        for (int s = 0; s < seeds; ++s) {
            PipelineConfig c2;
            c2.n_addr = 3;
            c2.n_data = 1;
            c2.mode = "sampled";
            c2.shots = shots;
            c2.seed = derive_seed(5555, std::to_string(shots) + ":" + std::to_string(s));
            std::vector<double> d = random_values(8, 21);
            std::vector<double> got = run_direct(c2, d);
            AnglePayload p = data_to_angles(d, 3, 1);
            double r = rmse(got, p.data);
            acc += r * r;
        }
        return std::sqrt(acc / 8);
    };
    double r1 = rmse_at(25000), r4 = rmse_at(100000);
    double ratio = r1 / r4;
    bool halving_ok = ratio > 1.4 && ratio < 2.6;

    report("4. encode/decode roundtrip (analytic 1e-6, sampled rmse, halving)",
           analytic_ok && sampled_ok && halving_ok,
           "analytic max err " + fmt(worst) + ", sampled rmse " +
               fmt(sampled.record.rmse) + ", ratio " + fmt(ratio));
}

// ---------------------------------------------------------------- criterion 5
void criterion_image() {
    double start = now_seconds();
    PgmImage img;
    img.width = 32;
    img.height = 32;
    img.maxval = 255;
    Rng rng(808);
    for (int i = 0; i < 1024; ++i)
        img.pixels.push_back(static_cast<int>(rng.next_below(256)));

    PipelineConfig cfg;
    cfg.n_addr = 9;
    cfg.n_data = 2;
    cfg.max_cuts = 2;
    cfg.mode = "analytic";
    ImageOutput out = run_image(cfg, img);
    double elapsed = now_seconds() - start;
    double rel = out.record.rmse / 2.0;  // fraction of the [-1,1] dynamic range
    report("5. image demo (32x32, n_a=9, n_d=2, 2 cuts, analytic)",
           rel < 0.01 && out.record.rvf > 0.99 && elapsed < 300.0,
           "rmse/range " + fmt(rel) + ", rvf " + fmt(out.record.rvf) + ", " +
               fmt(elapsed) + " s");
}

// ---------------------------------------------------------------- criterion 6
void criterion_noisy_ablation() {
    PipelineConfig cfg;
    cfg.n_addr = 2;
    cfg.n_data = 2;
    cfg.mode = "sampled";
    cfg.shots = 10000;
    cfg.noise_p = 0.02;
    cfg.seed = 31415;
    std::vector<double> data = random_values(8, 99);
    auto rows = run_ablation(cfg, data, {1, 2}, 10);
    bool ok = true;
    std::string detail;
    for (const auto& row : rows) {
        ok = ok && row.wins >= 8 && row.improvement_rel_mean > 0.0;
        detail += "M=" + std::to_string(row.cut_count) + ": " +
                  std::to_string(row.wins) + "/10 wins, impr " +
                  fmt(row.improvement_rel_mean) + "; ";
    }
    report("6. noisy ablation (p=0.02, cut beats uncut)", ok, detail);
}

// ---------------------------------------------------------------- criterion 7
void criterion_mps_oracle() {
    Rng rng(505);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        int n = 8 + trial;  // 8, 9, 10 qubits
        Circuit c(n, n);
        for (int g = 0; g < 8 * n; ++g) {
            switch (rng.next_below(4)) {
                case 0: c.add(GateOp::h(static_cast<int>(rng.next_below(n)))); break;
                case 1:
                    c.add(GateOp::ry(static_cast<int>(rng.next_below(n)),
                                     2 * kPi * rng.next_double() - kPi));
                    break;
                case 2:
                    c.add(GateOp::rz(static_cast<int>(rng.next_below(n)),
                                     2 * kPi * rng.next_double() - kPi));
                    break;
                default: {
                    int a = static_cast<int>(rng.next_below(n));
                    int b = static_cast<int>(rng.next_below(n));
                    if (a == b) b = (b + 1) % n;
                    c.add(GateOp::cx(a, b));
                }
            }
        }
        MpsState mps = simulate_mps(c, 1 << (n / 2));
        StateVector ref = simulate_statevector(c);
        for (std::size_t i = 0; i < (std::size_t(1) << n); ++i)
            worst = std::max(worst,
                             std::abs(mps_amplitude(mps, bits_of_index(i, n)) -
                                      ref.amplitudes(static_cast<Eigen::Index>(i))));
    }
    bool ghz_ok = true;
    for (int n : {2, 4, 7, 10}) {
        Circuit g(n, n);
        g.add(GateOp::h(0));
        for (int q = 0; q + 1 < n; ++q) g.add(GateOp::cx(q, q + 1));
        MpsState s = simulate_mps(g);
        ghz_ok = ghz_ok && s.max_bond() == 2;
    }
    report("7. MPS oracle equivalence and GHZ bond dimension",
           worst < 1e-10 && ghz_ok, "max amplitude err " + fmt(worst));
}

// ---------------------------------------------------------------- criterion 8
void criterion_aqc() {
    AnglePayload payload = data_to_angles({0.62, -0.34, 0.15, 0.88}, 2, 1);
    Circuit circuit = build_encoder_circuit(payload);
    auto candidates = sparse_cut_select(circuit, {0, 1}, {2}, 1);
    CutPlan plan = make_cut_plan(circuit, candidates, CutStrategy::GateCut);
    PrefixSplit split = split_prefix_suffix(circuit, plan);

    Ansatz ansatz = build_ansatz(split.c1_trunc.without_measurements());
    StateVector trunc =
        simulate_statevector(split.c1_trunc.without_measurements());
    StateVector at0 = simulate_statevector(ansatz.to_circuit(ansatz.theta0));
    double f_theta0 = std::norm(trunc.amplitudes.dot(at0.amplitudes));

    MpsState target = simulate_mps(split.c1.without_measurements());
    auto ps = infidelity_gradient(ansatz, ansatz.theta0, target);
    auto fd = finite_difference_gradient(ansatz, ansatz.theta0, target);
    double grad_diff = 0.0;
    for (std::size_t k = 0; k < ps.size(); ++k)
        grad_diff = std::max(grad_diff, std::abs(ps[k] - fd[k]));

    OptimizeOptions opts;
    opts.epsilon = 1e-3;
    opts.max_iters = 500;
    CompilationResult result = optimize(ansatz, target, split, opts);

    Circuit reassembled = assemble_compiled(ansatz, ansatz.theta0, split);
    StateVector orig = simulate_statevector(circuit.without_measurements());
    StateVector re = simulate_statevector(reassembled.without_measurements());
    double f_assembly = std::norm(orig.amplitudes.dot(re.amplitudes));

    report("8. AQC (theta0 exact, gradients, convergence, assembly)",
           f_theta0 >= 1.0 - 1e-9 && grad_diff < 1e-6 &&
               result.final_infidelity < 1e-3 && result.iterations <= 500 &&
               f_assembly >= 1.0 - 1e-9,
           "F(theta0) " + fmt(f_theta0) + ", grad diff " + fmt(grad_diff) +
               ", L* " + fmt(result.final_infidelity) + " in " +
               std::to_string(result.iterations) + " iters, assembly F " +
               fmt(f_assembly));
}

// ---------------------------------------------------------------- criterion 9
void criterion_micro_contracts() {
    bool parity_ok = parity("") == 1 && parity("1") == -1;

    std::vector<JobResult> results(1);
    results[0].job_label = "sc[]";
    results[0].shots = 10.0;
    results[0].counts["01"] = -3.0;
    results[0].counts["00"] = 13.0;
    std::vector<KnitEntry> entries{{"sc[]", 1.0, ""}};
    KnitResult knit = reconstruct_global_counts(results, entries, 2);
    bool clamp_ok = std::abs(knit.quasi.values.at("10") + 0.3) < 1e-12 &&
                    knit.counts.counts.count("10") == 0;

    AnglePayload payload = data_to_angles({0.62, -0.34, 0.15, 0.88}, 2, 1);
    Circuit circuit = build_encoder_circuit(payload);
    CutPlan zero;
    MaterializedCuts mats = materialize_subexperiments(circuit, zero);
    RunMode mode = RunMode::sampled(4096, 77);
    auto jobs = run_subexperiments(mats.subexperiments, mode, 1);
    KnitResult passthrough =
        reconstruct_global_counts(jobs, mats.entries, mats.n_obs_bits);
    CountsTable direct =
        sample_counts(circuit, 4096, derive_seed(derive_seed(77, "sc[]"), "frag0"));
    CountsTable reversed;
    for (const auto& [k, v] : direct.counts) reversed.counts[reverse_key(k)] += v;
    bool passthrough_ok = passthrough.counts.counts == reversed.counts;

    report("9. reconstruction micro-contracts (parity, clamp, passthrough)",
           parity_ok && clamp_ok && passthrough_ok);
}

}  // namespace

int main() {
    criterion_knit_exactness();
    criterion_channel_conformance();
    criterion_overhead_law();
    criterion_roundtrip();
    criterion_image();
    criterion_noisy_ablation();
    criterion_mps_oracle();
    criterion_aqc();
    criterion_micro_contracts();
    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
