#include "shardq/knitting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "shardq/mps.hpp"
#include "shardq/noise.hpp"

namespace shardq {

namespace {

GateOp remap_slot_op(const GateOp& slot_op, const GateOp& cut_gate, int clbit_base) {
    // Slot 0/1 are the cut gate's endpoints (slot 2 never reaches materialize;
    // UCRy expansions are exercised through the Choi oracle instead).
    auto qubit_of_slot = [&](int slot) {
        if (slot == 0) return cut_gate.q0;
        if (slot == 1) return cut_gate.q1;
        throw std::logic_error("unexpected slot in cut setting");
    };
    GateOp op = slot_op;
    op.q0 = qubit_of_slot(slot_op.q0);
    if (is_two_qubit(op.kind)) op.q1 = qubit_of_slot(slot_op.q1);
    if (op.kind == GateKind::MeasureZ) op.clbit = clbit_base + slot_op.clbit;
    return op;
}

}  // namespace

MaterializedCuts materialize_subexperiments(const Circuit& circuit,
                                            const CutPlan& plan) {
    const int n_cuts = static_cast<int>(plan.cut_indices.size());
    for (std::size_t m = 0; m < plan.cut_indices.size(); ++m) {
        int idx = plan.cut_indices[m];
        if (idx < 0 || idx >= static_cast<int>(circuit.ops.size()))
            throw std::invalid_argument("cut plan does not match circuit");
        if (!is_two_qubit(circuit.ops[static_cast<std::size_t>(idx)].kind))
            throw std::invalid_argument("cut plan does not match circuit");
    }

    FragmentSet fragments = fragment_circuits(circuit, plan);
    const int n_obs = circuit.num_clbits;

    MaterializedCuts out;
    out.n_obs_bits = n_obs;

    // Cartesian product over per-cut settings, last cut as the innermost
    // digit, so the job order is stable and label-sortable.
    std::vector<int> setting_counts;
    for (const auto& e : plan.expansions)
        setting_counts.push_back(static_cast<int>(e.settings.size()));

    std::vector<int> combo(static_cast<std::size_t>(n_cuts), 0);
    bool done = false;
    while (!done) {
        // label and qpd layout for this combo
        std::string label = "sc";
        int total_records = 0;
        for (int m = 0; m < n_cuts; ++m) {
            label += (m == 0 ? "[" : "-");
            label += std::to_string(combo[static_cast<std::size_t>(m)]);
            total_records += plan.expansions[static_cast<std::size_t>(m)]
                                 .settings[static_cast<std::size_t>(
                                     combo[static_cast<std::size_t>(m)])]
                                 .num_records;
        }
        label += n_cuts ? "]" : "[]";

        // splice the full circuit
        Circuit spliced(circuit.num_qubits, n_obs + total_records);
        int qpd_base = n_obs;
        std::size_t next_cut = 0;
        for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
            bool is_cut = next_cut < plan.cut_indices.size() &&
                          static_cast<int>(i) == plan.cut_indices[next_cut];
            if (!is_cut) {
                spliced.ops.push_back(circuit.ops[i]);
                continue;
            }
            const auto& gate = circuit.ops[i];
            const auto& expansion = plan.expansions[next_cut];
            const auto& setting = expansion.settings[static_cast<std::size_t>(
                combo[next_cut])];
            for (const auto& slot_op : setting.ops)
                spliced.ops.push_back(remap_slot_op(slot_op, gate, qpd_base));
            if (setting.keep_gate) spliced.ops.push_back(gate);
            qpd_base += setting.num_records;
            ++next_cut;
        }

        // split by fragment, remapping to local qubits
        Subexperiment sub;
        sub.job_label = label;
        sub.setting_ids = combo;
        sub.n_obs_bits = n_obs;
        sub.n_qpd_bits = total_records;
        for (const auto& qubits : fragments.qubit_maps) {
            Circuit frag(static_cast<int>(qubits.size()), spliced.num_clbits);
            std::vector<int> local_of(static_cast<std::size_t>(circuit.num_qubits), -1);
            for (std::size_t l = 0; l < qubits.size(); ++l)
                local_of[static_cast<std::size_t>(qubits[l])] = static_cast<int>(l);
            for (const auto& op : spliced.ops) {
                if (local_of[static_cast<std::size_t>(op.q0)] < 0) continue;
                GateOp local = op;
                local.q0 = local_of[static_cast<std::size_t>(op.q0)];
                if (is_two_qubit(op.kind))
                    local.q1 = local_of[static_cast<std::size_t>(op.q1)];
                frag.ops.push_back(local);
            }
            sub.fragment_circuits.push_back(std::move(frag));
        }
        out.subexperiments.push_back(std::move(sub));

        // advance combo (last cut is the innermost digit)
        done = true;
        for (int m = n_cuts - 1; m >= 0; --m) {
            if (++combo[static_cast<std::size_t>(m)] <
                setting_counts[static_cast<std::size_t>(m)]) {
                done = false;
                break;
            }
            combo[static_cast<std::size_t>(m)] = 0;
        }
        if (n_cuts == 0) break;
    }

    // Post-processing entries: cartesian product over per-cut terms.
    std::vector<int> term_counts;
    for (const auto& e : plan.expansions)
        term_counts.push_back(static_cast<int>(e.terms.size()));
    std::vector<int> pick(static_cast<std::size_t>(n_cuts), 0);
    done = false;
    while (!done) {
        KnitEntry entry;
        entry.coefficient = 1.0;
        std::string label = "sc";
        std::string mask;
        for (int m = 0; m < n_cuts; ++m) {
            const auto& expansion = plan.expansions[static_cast<std::size_t>(m)];
            const auto& term =
                expansion.terms[static_cast<std::size_t>(pick[static_cast<std::size_t>(m)])];
            const auto& setting =
                expansion.settings[static_cast<std::size_t>(term.setting_id)];
            entry.coefficient *= term.coefficient;
            label += (m == 0 ? "[" : "-");
            label += std::to_string(term.setting_id);
            for (int r = 0; r < setting.num_records; ++r)
                mask += (term.parity_mask >> r & 1u) ? '1' : '0';
        }
        label += n_cuts ? "]" : "[]";
        entry.job_label = label;
        entry.parity_mask = mask;
        out.entries.push_back(std::move(entry));

        done = true;
        for (int m = n_cuts - 1; m >= 0; --m) {
            if (++pick[static_cast<std::size_t>(m)] <
                term_counts[static_cast<std::size_t>(m)]) {
                done = false;
                break;
            }
            pick[static_cast<std::size_t>(m)] = 0;
        }
        if (n_cuts == 0) break;
    }
    return out;
}

namespace {

// Outcome distributions of independent fragments combine by key merge: each
// clbit is written by exactly one fragment.
std::string merge_keys(const std::string& a, const std::string& b) {
    std::string out = a;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (b[i] == '1') out[i] = '1';
    return out;
}

// MPS route for a fragment with terminal measurements only.
Distribution mps_fragment_distribution(const Circuit& frag, int chi_max,
                                       double svd_cutoff) {
    MpsState state = simulate_mps(frag, chi_max, svd_cutoff);
    StateVector dense = mps_to_statevector(state);
    Distribution dist;
    auto measured = frag.measured_clbit_of_qubit();
    std::string key(static_cast<std::size_t>(frag.num_clbits), '0');
    for (Eigen::Index i = 0; i < dense.amplitudes.size(); ++i) {
        double p = std::norm(dense.amplitudes(i));
        if (p < 1e-18) continue;
        std::string bits = bits_of_index(static_cast<std::size_t>(i), frag.num_qubits);
        std::string k = key;
        for (int q = 0; q < frag.num_qubits; ++q)
            if (measured[static_cast<std::size_t>(q)] >= 0)
                k[static_cast<std::size_t>(measured[static_cast<std::size_t>(q)])] =
                    bits[static_cast<std::size_t>(q)];
        dist[k] += p;
    }
    return dist;
}

JobResult run_analytic(const Subexperiment& sub, const RunMode& mode,
                       const SimLimits& limits) {
    const double virtual_shots = mode.virtual_shots;
    std::map<std::string, double> joint;
    bool first = true;
    for (const auto& frag : sub.fragment_circuits) {
        Distribution dist = mode.use_mps && !frag.has_midcircuit_ops()
                                ? mps_fragment_distribution(frag, mode.chi_max,
                                                            mode.svd_cutoff)
                                : simulate_distribution(frag, limits);
        if (first) {
            joint = dist;
            first = false;
            continue;
        }
        std::map<std::string, double> next;
        for (const auto& [ka, pa] : joint)
            for (const auto& [kb, pb] : dist) next[merge_keys(ka, kb)] += pa * pb;
        joint = std::move(next);
    }
    JobResult r;
    r.job_label = sub.job_label;
    r.shots = virtual_shots;
    for (const auto& [k, p] : joint) r.counts[k] = p * virtual_shots;
    return r;
}

struct FragmentSampler {
    const Circuit* circuit;
    const SimLimits* limits;
    double noise_p;
    Rng rng;
    std::vector<std::pair<std::string, double>> cdf;  // clean circuit
    std::map<std::vector<int>, std::vector<std::pair<std::string, double>>> noisy_cache;

    FragmentSampler(const Circuit& c, const SimLimits& lim, double p, std::uint64_t seed)
        : circuit(&c), limits(&lim), noise_p(p), rng(seed) {
        if (noise_p <= 0.0) cdf = build_cdf(simulate_distribution(c, lim));
    }

    static std::vector<std::pair<std::string, double>> build_cdf(const Distribution& d) {
        std::vector<std::pair<std::string, double>> out;
        double acc = 0.0;
        for (const auto& [k, p] : d) {
            acc += p;
            out.push_back({k, acc});
        }
        return out;
    }

    const std::string& draw(const std::vector<std::pair<std::string, double>>& table) {
        double u = rng.next_double() * table.back().second;
        auto it = std::lower_bound(table.begin(), table.end(), u,
                                   [](const auto& a, double b) { return a.second < b; });
        if (it == table.end()) it = std::prev(table.end());
        return it->first;
    }

    std::string sample_shot() {
        if (noise_p <= 0.0) return draw(cdf);
        // one trajectory: sample the insertion pattern, reuse its distribution
        std::vector<int> pattern;
        for (const auto& op : circuit->ops) {
            if (!is_two_qubit(op.kind)) continue;
            pattern.push_back(rng.next_double() < noise_p
                                  ? 1 + static_cast<int>(rng.next_below(15))
                                  : 0);
        }
        auto it = noisy_cache.find(pattern);
        if (it == noisy_cache.end()) {
            Circuit noisy(circuit->num_qubits, circuit->num_clbits);
            std::size_t g = 0;
            for (const auto& op : circuit->ops) {
                noisy.ops.push_back(op);
                if (!is_two_qubit(op.kind)) continue;
                int code = pattern[g++];
                if (code == 0) continue;
                int pa = code / 4, pb = code % 4;
                auto pauli = [](int which, int q) {
                    return which == 1 ? GateOp::x(q)
                                      : which == 2 ? GateOp::y(q) : GateOp::z(q);
                };
                if (pa != 0) noisy.ops.push_back(pauli(pa, op.q0));
                if (pb != 0) noisy.ops.push_back(pauli(pb, op.q1));
            }
            it = noisy_cache
                     .insert({pattern, build_cdf(simulate_distribution(noisy, *limits))})
                     .first;
        }
        return draw(it->second);
    }
};

JobResult run_sampled(const Subexperiment& sub, const RunMode& mode,
                      const SimLimits& limits) {
    std::uint64_t job_seed = derive_seed(mode.seed, sub.job_label);
    std::vector<FragmentSampler> samplers;
    samplers.reserve(sub.fragment_circuits.size());
    for (std::size_t f = 0; f < sub.fragment_circuits.size(); ++f)
        samplers.emplace_back(sub.fragment_circuits[f], limits, mode.noise_p,
                              derive_seed(job_seed, "frag" + std::to_string(f)));
    JobResult r;
    r.job_label = sub.job_label;
    r.shots = static_cast<double>(mode.shots);
    for (long long s = 0; s < mode.shots; ++s) {
        std::string key;
        for (auto& sampler : samplers) {
            std::string k = sampler.sample_shot();
            key = key.empty() ? k : merge_keys(key, k);
        }
        r.counts[key] += 1.0;
    }
    return r;
}

}  // namespace

std::vector<double> job_importance_weights(const MaterializedCuts& mats) {
    std::map<std::string, double> by_label;
    for (const auto& entry : mats.entries)
        by_label[entry.job_label] += std::abs(entry.coefficient);
    std::vector<double> weights;
    weights.reserve(mats.subexperiments.size());
    for (const auto& sub : mats.subexperiments)
        weights.push_back(by_label[sub.job_label]);
    return weights;
}

std::vector<JobResult> run_subexperiments(const std::vector<Subexperiment>& subs,
                                          const RunMode& mode, int parallelism,
                                          const SimLimits& limits,
                                          const std::vector<double>* shot_weights) {
    if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
    std::vector<long long> shots_of(subs.size(), mode.shots);
    if (shot_weights != nullptr && mode.kind == RunMode::Sampled) {
        if (shot_weights->size() != subs.size())
            throw std::invalid_argument("one shot weight per subexperiment");
        double total_w = 0.0;
        for (double w : *shot_weights) total_w += w;
        if (total_w <= 0.0) throw std::invalid_argument("weights must be positive");
        double budget = static_cast<double>(mode.shots) *
                        static_cast<double>(subs.size());
        for (std::size_t i = 0; i < subs.size(); ++i)
            shots_of[i] = std::max<long long>(
                1, std::llround(budget * (*shot_weights)[i] / total_w));
    }
    std::vector<JobResult> results(subs.size());
    std::vector<std::string> errors(subs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= subs.size()) return;
            try {
                RunMode job_mode = mode;
                job_mode.shots = shots_of[i];
                results[i] = mode.kind == RunMode::Analytic
                                 ? run_analytic(subs[i], job_mode, limits)
                                 : run_sampled(subs[i], job_mode, limits);
            } catch (const std::exception& e) {
                errors[i] = e.what();
                results[i].job_label = subs[i].job_label;
            }
        }
    };
    if (parallelism == 1 || subs.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        int n = std::min<int>(parallelism, static_cast<int>(subs.size()));
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::string failures;
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            failures += subs[i].job_label + ": " + errors[i] + "; ";
    if (!failures.empty())
        throw std::runtime_error("subexperiment failures: " + failures);
    return results;
}

int parity(const std::string& bits) {
    int ones = 0;
    for (char c : bits) {
        if (c == '1')
            ++ones;
        else if (c != '0')
            throw std::invalid_argument("parity expects a binary string");
    }
    return ones % 2 ? -1 : 1;
}

KnitResult reconstruct_global_counts(const std::vector<JobResult>& results,
                                     const std::vector<KnitEntry>& entries,
                                     int n_obs_bits) {
    std::map<std::string, const JobResult*> by_label;
    for (const auto& r : results) by_label[r.job_label] = &r;

    // sorted-label fold keeps accumulation order independent of scheduling
    std::vector<const KnitEntry*> order;
    order.reserve(entries.size());
    for (const auto& e : entries) order.push_back(&e);
    std::stable_sort(order.begin(), order.end(),
                     [](const KnitEntry* a, const KnitEntry* b) {
                         return a->job_label < b->job_label;
                     });

    QuasiDistribution quasi;
    quasi.n_obs_bits = n_obs_bits;
    double out_shots = 0.0;
    for (const KnitEntry* entry : order) {
        auto it = by_label.find(entry->job_label);
        if (it == by_label.end())
            throw std::invalid_argument("missing result for " + entry->job_label);
        const JobResult& r = *it->second;
        out_shots = std::max(out_shots, r.shots);
        for (const auto& [key, n] : r.counts) {
            if (static_cast<int>(key.size()) < n_obs_bits)
                throw std::invalid_argument("result key shorter than n_obs");
            std::string obs = key.substr(0, static_cast<std::size_t>(n_obs_bits));
            std::string qpd = key.substr(static_cast<std::size_t>(n_obs_bits));
            if (qpd.size() != entry->parity_mask.size())
                throw std::invalid_argument("qpd width mismatch for " +
                                            entry->job_label);
            int sigma = 1;
            if (!qpd.empty()) {
                std::string masked;
                for (std::size_t i = 0; i < qpd.size(); ++i)
                    if (entry->parity_mask[i] == '1') masked += qpd[i];
                sigma = parity(masked);
            }
            quasi.values[reverse_key(obs)] +=
                entry->coefficient * sigma * n / r.shots;
        }
    }

    KnitResult out;
    out.quasi = quasi;
    out.counts.bit_order = "clbit0_right";
    for (const auto& [key, v] : quasi.values) {
        long long rounded =
            static_cast<long long>(std::floor(v * out_shots + 0.5));
        long long clamped = std::max(0LL, rounded);
        if (clamped > 0) out.counts.counts[key] = clamped;
    }
    out.counts.shots = out.counts.total();
    return out;
}

double knit_expectation(const std::vector<JobResult>& results,
                        const std::vector<KnitEntry>& entries,
                        const std::string& observable) {
    for (char c : observable)
        if (c != 'Z' && c != 'I')
            throw std::invalid_argument("observable factors must be Z or I");
    std::map<std::string, const JobResult*> by_label;
    for (const auto& r : results) by_label[r.job_label] = &r;

    double total = 0.0;
    for (const auto& entry : entries) {
        auto it = by_label.find(entry.job_label);
        if (it == by_label.end())
            throw std::invalid_argument("missing result for " + entry.job_label);
        const JobResult& r = *it->second;
        double acc = 0.0;
        for (const auto& [key, n] : r.counts) {
            std::string obs = key.substr(0, observable.size());
            std::string qpd = key.substr(observable.size());
            int eig = 1;
            for (std::size_t i = 0; i < observable.size(); ++i)
                if (observable[i] == 'Z' && obs[i] == '1') eig = -eig;
            int sigma = 1;
            if (!qpd.empty()) {
                std::string masked;
                for (std::size_t i = 0; i < qpd.size(); ++i)
                    if (entry.parity_mask[i] == '1') masked += qpd[i];
                sigma = parity(masked);
            }
            acc += eig * sigma * n;
        }
        total += entry.coefficient * acc / r.shots;
    }
    return total;
}

std::string job_results_to_json(const std::vector<JobResult>& results) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json j;
        j["job_label"] = r.job_label;
        j["shots"] = r.shots;
        j["counts"] = nlohmann::json::object();
        for (const auto& [k, v] : r.counts) j["counts"][k] = v;
        doc.push_back(j);
    }
    return doc.dump(2);
}

std::vector<JobResult> job_results_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    std::vector<JobResult> out;
    for (const auto& j : doc) {
        JobResult r;
        r.job_label = j.at("job_label").get<std::string>();
        r.shots = j.at("shots").get<double>();
        for (auto it = j.at("counts").begin(); it != j.at("counts").end(); ++it)
            r.counts[it.key()] = it.value().get<double>();
        out.push_back(std::move(r));
    }
    return out;
}

std::string quasi_to_csv(const QuasiDistribution& quasi) {
    std::ostringstream out;
    out << "bitstring,quasi_probability\n";
    out.precision(17);
    for (const auto& [k, v] : quasi.values) out << k << ',' << v << '\n';
    return out.str();
}

}  // namespace shardq
