#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shardq/encoder.hpp"
#include "shardq/knitting.hpp"

using namespace shardq;

namespace {

Circuit two_address_encoder(std::vector<double> data = {0.62, -0.34, 0.15, 0.88}) {
    AnglePayload p = data_to_angles(data, 2, 1);
    return build_encoder_circuit(p);
}

CutPlan plan_for(const Circuit& c, int cuts, CutStrategy strategy) {
    auto candidates = sparse_cut_select(c, {0, 1}, {2}, cuts);
    return make_cut_plan(c, candidates, strategy);
}

Distribution reversed(const Distribution& d) {
    Distribution out;
    for (const auto& [k, v] : d) out[reverse_key(k)] += v;
    return out;
}

double max_quasi_error(const QuasiDistribution& quasi, const Distribution& want) {
    double err = 0.0;
    for (const auto& [k, p] : want) {
        auto it = quasi.values.find(k);
        err = std::max(err, std::abs(p - (it == quasi.values.end() ? 0.0 : it->second)));
    }
    for (const auto& [k, v] : quasi.values)
        if (!want.count(k)) err = std::max(err, std::abs(v));
    return err;
}

}  // namespace

TEST_CASE("parity") {
    CHECK(parity("0110") == 1);
    CHECK(parity("1") == -1);
    CHECK(parity("") == 1);
    CHECK(parity("111") == -1);
    CHECK_THROWS(parity("01a"));
}

TEST_CASE("materialize counts") {
    Circuit c = two_address_encoder();
    {
        MaterializedCuts m =
            materialize_subexperiments(c, plan_for(c, 0, CutStrategy::GateCut));
        CHECK(m.subexperiments.size() == 1);
        CHECK(m.entries.size() == 1);
        CHECK(m.subexperiments[0].fragment_circuits.size() == 1);
    }
    {
        MaterializedCuts m =
            materialize_subexperiments(c, plan_for(c, 1, CutStrategy::GateCut));
        CHECK(m.subexperiments.size() == 6);
        CHECK(m.entries.size() == 6);
        for (const auto& sub : m.subexperiments) CHECK(sub.n_qpd_bits <= 1);
    }
    {
        MaterializedCuts m =
            materialize_subexperiments(c, plan_for(c, 2, CutStrategy::GateCut));
        CHECK(m.subexperiments.size() == 36);
        CHECK(m.entries.size() == 36);
        for (const auto& sub : m.subexperiments) CHECK(sub.n_qpd_bits <= 2);
    }
    {
        // pauli_table: same six settings per cut, eight rows per cut
        MaterializedCuts m =
            materialize_subexperiments(c, plan_for(c, 2, CutStrategy::PauliTable));
        CHECK(m.subexperiments.size() == 36);
        CHECK(m.entries.size() == 64);
    }
}

TEST_CASE("analytic jobs are normalized") {
    Circuit c = two_address_encoder();
    MaterializedCuts m =
        materialize_subexperiments(c, plan_for(c, 1, CutStrategy::GateCut));
    auto results = run_subexperiments(m.subexperiments, RunMode::analytic(), 1);
    REQUIRE(results.size() == 6);
    for (const auto& r : results) {
        double total = 0.0;
        for (const auto& [k, v] : r.counts) total += v;
        CHECK(total == doctest::Approx(r.shots).epsilon(1e-12));
    }
}

TEST_CASE("knit exactness, one cut, both strategies") {
    Circuit c = two_address_encoder();
    Distribution want = reversed(simulate_distribution(c));
    for (CutStrategy strategy : {CutStrategy::GateCut, CutStrategy::PauliTable}) {
        CAPTURE(static_cast<int>(strategy));
        MaterializedCuts m = materialize_subexperiments(c, plan_for(c, 1, strategy));
        auto results = run_subexperiments(m.subexperiments, RunMode::analytic(), 2);
        KnitResult knit = reconstruct_global_counts(results, m.entries, m.n_obs_bits);
        CHECK(max_quasi_error(knit.quasi, want) < 1e-9);
        double sum = 0.0;
        for (const auto& [k, v] : knit.quasi.values) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("knit exactness with two cuts") {
    Circuit c = two_address_encoder({0.3, 0.9, -0.8, 0.05});
    Distribution want = reversed(simulate_distribution(c));
    for (CutStrategy strategy : {CutStrategy::GateCut, CutStrategy::PauliTable}) {
        MaterializedCuts m = materialize_subexperiments(c, plan_for(c, 2, strategy));
        auto results = run_subexperiments(m.subexperiments, RunMode::analytic(), 4);
        KnitResult knit = reconstruct_global_counts(results, m.entries, m.n_obs_bits);
        CHECK(max_quasi_error(knit.quasi, want) < 1e-9);
    }
}

TEST_CASE("knit exactness on a five-qubit encoder with two cuts") {
    AnglePayload p = data_to_angles({0.3, -0.7, 0.05, 0.92, -0.2, 0.5, 0.81, -0.44},
                                    2, 2);
    Circuit c = build_encoder_circuit(p);
    Distribution want = reversed(simulate_distribution(c));
    auto candidates = sparse_cut_select(c, {0, 1}, {2, 3}, 2);
    for (CutStrategy strategy : {CutStrategy::GateCut, CutStrategy::PauliTable}) {
        CutPlan plan = make_cut_plan(c, candidates, strategy);
        MaterializedCuts m = materialize_subexperiments(c, plan);
        auto results = run_subexperiments(m.subexperiments, RunMode::analytic(), 4);
        KnitResult knit = reconstruct_global_counts(results, m.entries, m.n_obs_bits);
        CHECK(max_quasi_error(knit.quasi, want) < 1e-9);
    }
}

TEST_CASE("zero-cut passthrough is direct simulation with reversed keys") {
    Circuit c = two_address_encoder();
    MaterializedCuts m =
        materialize_subexperiments(c, plan_for(c, 0, CutStrategy::GateCut));
    RunMode mode = RunMode::sampled(4096, 77);
    auto results = run_subexperiments(m.subexperiments, mode, 1);
    KnitResult knit = reconstruct_global_counts(results, m.entries, m.n_obs_bits);

    CountsTable direct =
        sample_counts(c, 4096, derive_seed(derive_seed(77, "sc[]"), "frag0"));
    CountsTable expected;
    for (const auto& [k, v] : direct.counts) expected.counts[reverse_key(k)] += v;
    CHECK(knit.counts.counts == expected.counts);
}

TEST_CASE("parallel determinism") {
    Circuit c = two_address_encoder();
    MaterializedCuts m =
        materialize_subexperiments(c, plan_for(c, 2, CutStrategy::GateCut));
    RunMode mode = RunMode::sampled(500, 2024);
    auto serial = run_subexperiments(m.subexperiments, mode, 1);
    auto parallel = run_subexperiments(m.subexperiments, mode, 6);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].job_label == parallel[i].job_label);
        CHECK(serial[i].counts == parallel[i].counts);
    }
    auto again = run_subexperiments(m.subexperiments, mode, 3);
    for (std::size_t i = 0; i < serial.size(); ++i)
        CHECK(serial[i].counts == again[i].counts);
}

TEST_CASE("clamp and round are idempotent") {
    std::vector<JobResult> results(1);
    results[0].job_label = "sc[]";
    results[0].shots = 10.0;
    results[0].counts["00"] = 4.2;
    results[0].counts["01"] = -3.0;  // forces a negative quasi value
    results[0].counts["10"] = 5.5;
    std::vector<KnitEntry> entries{{"sc[]", 1.0, ""}};
    KnitResult once = reconstruct_global_counts(results, entries, 2);
    CHECK(once.counts.counts.count("10") == 0);  // clamped away

    std::vector<JobResult> replay(1);
    replay[0].job_label = "sc[]";
    replay[0].shots = static_cast<double>(once.counts.shots == 0 ? 1 : once.counts.shots);
    // feed the clamped table back through with unit coefficient
    double total = 0.0;
    for (const auto& [k, v] : once.counts.counts) total += static_cast<double>(v);
    replay[0].shots = total;
    for (const auto& [k, v] : once.counts.counts)
        replay[0].counts[reverse_key(k)] = static_cast<double>(v);
    KnitResult twice = reconstruct_global_counts(replay, entries, 2);
    CHECK(twice.counts.counts == once.counts.counts);
}

TEST_CASE("quasi value of -0.3 clamps to zero counts") {
    std::vector<JobResult> results(1);
    results[0].job_label = "sc[]";
    results[0].shots = 10.0;
    results[0].counts["01"] = -3.0;
    results[0].counts["00"] = 13.0;
    std::vector<KnitEntry> entries{{"sc[]", 1.0, ""}};
    KnitResult knit = reconstruct_global_counts(results, entries, 2);
    CHECK(knit.quasi.values.at("10") == doctest::Approx(-0.3));
    CHECK(knit.counts.counts.count("10") == 0);
}

TEST_CASE("knit expectation values") {
    {
        // uncut identity observable
        Circuit c = two_address_encoder();
        MaterializedCuts m =
            materialize_subexperiments(c, plan_for(c, 0, CutStrategy::GateCut));
        auto results = run_subexperiments(m.subexperiments, RunMode::analytic(), 1);
        CHECK(knit_expectation(results, m.entries, "III") ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    {
        // GHZ-2 has perfect ZZ correlation
        Circuit c(2, 2);
        c.add(GateOp::h(0));
        c.add(GateOp::cx(0, 1));
        c.add(GateOp::measure(0, 0));
        c.add(GateOp::measure(1, 1));
        CutPlan plan;
        MaterializedCuts m = materialize_subexperiments(c, plan);
        auto results = run_subexperiments(m.subexperiments, RunMode::analytic(), 1);
        CHECK(knit_expectation(results, m.entries, "ZZ") ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
    {
        // cut circuit reproduces the uncut expectation of Z on the data qubit
        Circuit c = two_address_encoder();
        Distribution direct = simulate_distribution(c);
        double want = 0.0;
        for (const auto& [k, p] : direct) want += (k[2] == '1' ? -1.0 : 1.0) * p;
        for (CutStrategy strategy :
             {CutStrategy::GateCut, CutStrategy::PauliTable}) {
            MaterializedCuts m =
                materialize_subexperiments(c, plan_for(c, 1, strategy));
            auto results =
                run_subexperiments(m.subexperiments, RunMode::analytic(), 1);
            CHECK(knit_expectation(results, m.entries, "IIZ") ==
                  doctest::Approx(want).epsilon(1e-10));
        }
    }
    {
        std::vector<JobResult> results(1);
        results[0].job_label = "sc[]";
        results[0].shots = 1.0;
        results[0].counts["0"] = 1.0;
        std::vector<KnitEntry> entries{{"sc[]", 1.0, ""}};
        CHECK_THROWS(knit_expectation(results, entries, "X"));
    }
}

TEST_CASE("sampled reconstruction converges at the shot-noise rate") {
    Circuit c = two_address_encoder();
    Distribution want = reversed(simulate_distribution(c));
    CutPlan plan = plan_for(c, 1, CutStrategy::GateCut);
    MaterializedCuts m = materialize_subexperiments(c, plan);

    auto tv_at = [&](long long shots, int seeds) {
        double acc = 0.0;
        for (int s = 0; s < seeds; ++s) {
            RunMode mode = RunMode::sampled(shots, derive_seed(31337, std::to_string(shots) + ":" + std::to_string(s)));
            auto results = run_subexperiments(m.subexperiments, mode, 2);
            KnitResult knit =
                reconstruct_global_counts(results, m.entries, m.n_obs_bits);
            double tv = 0.0;
            for (const auto& [k, p] : want) {
                auto it = knit.quasi.values.find(k);
                tv += std::abs(p - (it == knit.quasi.values.end() ? 0.0 : it->second));
            }
            for (const auto& [k, v] : knit.quasi.values)
                if (!want.count(k)) tv += std::abs(v);
            acc += tv / 2.0;
        }
        return acc / seeds;
    };

    std::vector<double> log_shots, log_tv;
    for (long long shots : {1000LL, 10000LL, 100000LL, 1000000LL}) {
        double tv = tv_at(shots, 3);
        log_shots.push_back(std::log(static_cast<double>(shots)));
        log_tv.push_back(std::log(tv));
    }
    // least-squares slope of log TV vs log shots should sit near -1/2
    double n = static_cast<double>(log_shots.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_shots.size(); ++i) {
        sx += log_shots[i];
        sy += log_tv[i];
        sxx += log_shots[i] * log_shots[i];
        sxy += log_shots[i] * log_tv[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope < -0.35);
    CHECK(slope > -0.65);
}

TEST_CASE("job results serialize through json") {
    Circuit c = two_address_encoder();
    MaterializedCuts m =
        materialize_subexperiments(c, plan_for(c, 1, CutStrategy::GateCut));
    auto results =
        run_subexperiments(m.subexperiments, RunMode::sampled(200, 5), 1);
    auto back = job_results_from_json(job_results_to_json(results));
    REQUIRE(back.size() == results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
        CHECK(back[i].job_label == results[i].job_label);
        CHECK(back[i].shots == results[i].shots);
        CHECK(back[i].counts == results[i].counts);
    }
    // reconstruction from the deserialized batch matches
    KnitResult a = reconstruct_global_counts(results, m.entries, m.n_obs_bits);
    KnitResult b = reconstruct_global_counts(back, m.entries, m.n_obs_bits);
    CHECK(a.counts.counts == b.counts.counts);
}

TEST_CASE("importance-weighted shot allocation") {
    Circuit c = two_address_encoder();
    MaterializedCuts m =
        materialize_subexperiments(c, plan_for(c, 1, CutStrategy::GateCut));
    auto weights = job_importance_weights(m);
    REQUIRE(weights.size() == 6);
    for (double w : weights) CHECK(w == doctest::Approx(0.5));

    RunMode mode = RunMode::sampled(1000, 7);
    auto results =
        run_subexperiments(m.subexperiments, mode, 1, SimLimits{}, &weights);
    double total = 0.0;
    for (const auto& r : results) total += r.shots;
    CHECK(total == doctest::Approx(6000.0));  // budget preserved
    // equal weights reduce to the uniform split
    for (const auto& r : results) CHECK(r.shots == doctest::Approx(1000.0));
    // reconstruction still runs and normalizes per job
    KnitResult knit = reconstruct_global_counts(results, m.entries, m.n_obs_bits);
    double sum = 0.0;
    for (const auto& [k, v] : knit.quasi.values) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(0.1));

    std::vector<double> bad{1.0};
    CHECK_THROWS(
        run_subexperiments(m.subexperiments, mode, 1, SimLimits{}, &bad));
}

TEST_CASE("per-job failures carry labels and do not abort the batch") {
    // one healthy job plus one that trips the branch cap
    Subexperiment good;
    good.job_label = "sc[good]";
    good.fragment_circuits.emplace_back(1, 1);
    good.fragment_circuits[0].add(GateOp::h(0));
    good.fragment_circuits[0].add(GateOp::measure(0, 0));
    good.n_obs_bits = 1;

    Subexperiment bad;
    bad.job_label = "sc[bad]";
    Circuit c(1, 1);
    for (int i = 0; i < 17; ++i) {
        c.add(GateOp::h(0));
        c.add(GateOp::measure(0, 0));
    }
    c.add(GateOp::h(0));
    bad.fragment_circuits.push_back(c);
    bad.n_obs_bits = 1;

    try {
        run_subexperiments({good, bad}, RunMode::analytic(), 1);
        FAIL("expected a batch failure");
    } catch (const std::runtime_error& e) {
        std::string what = e.what();
        CHECK(what.find("sc[bad]") != std::string::npos);
        CHECK(what.find("sc[good]") == std::string::npos);
    }
}

TEST_CASE("missing coefficient or malformed keys are rejected") {
    std::vector<JobResult> results(1);
    results[0].job_label = "sc[0]";
    results[0].shots = 1.0;
    results[0].counts["000"] = 1.0;
    std::vector<KnitEntry> entries{{"sc[1]", 1.0, ""}};
    CHECK_THROWS(reconstruct_global_counts(results, entries, 3));

    std::vector<KnitEntry> bad_mask{{"sc[0]", 1.0, "1"}};
    CHECK_THROWS(reconstruct_global_counts(results, bad_mask, 1));  // qpd width 2
}
