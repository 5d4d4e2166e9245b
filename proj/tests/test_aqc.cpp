#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shardq/aqc.hpp"
#include "shardq/encoder.hpp"

using namespace shardq;

namespace {

Circuit two_address_encoder() {
    AnglePayload p = data_to_angles({0.62, -0.34, 0.15, 0.88}, 2, 1);
    return build_encoder_circuit(p);
}

CutPlan one_cut_plan(const Circuit& c) {
    auto candidates = sparse_cut_select(c, {0, 1}, {2}, 1);
    return make_cut_plan(c, candidates, CutStrategy::GateCut);
}

double state_fidelity(const Circuit& a, const Circuit& b) {
    StateVector sa = simulate_statevector(a.without_measurements());
    StateVector sb = simulate_statevector(b.without_measurements());
    return std::norm(sa.amplitudes.dot(sb.amplitudes));
}

}  // namespace

TEST_CASE("split prefix and suffix") {
    Circuit c = two_address_encoder();
    {
        CutPlan none;
        PrefixSplit split = split_prefix_suffix(c, none);
        CHECK(split.c1.ops.size() == c.ops.size());
        CHECK(split.c2.ops.empty());
        CHECK(split.cut_gates.empty());
    }
    {
        CutPlan plan = one_cut_plan(c);
        PrefixSplit split = split_prefix_suffix(c, plan);
        CHECK(split.c1_trunc.ops.size() == split.c1.ops.size() - 1);
        // reassembled op list equals the original op list
        std::vector<GateOp> rebuilt = split.c1_trunc.ops;
        for (const auto& g : split.cut_gates) rebuilt.push_back(g);
        for (const auto& g : split.c2.ops) rebuilt.push_back(g);
        REQUIRE(rebuilt.size() == c.ops.size());
        for (std::size_t i = 0; i < rebuilt.size(); ++i) {
            CHECK(rebuilt[i].kind == c.ops[i].kind);
            CHECK(rebuilt[i].q0 == c.ops[i].q0);
            CHECK(rebuilt[i].q1 == c.ops[i].q1);
            CHECK(rebuilt[i].angle == c.ops[i].angle);
        }
    }
    {
        // two cuts remove two gates from the truncated prefix
        auto candidates = sparse_cut_select(c, {0, 1}, {2}, 2);
        CutPlan plan = make_cut_plan(c, candidates, CutStrategy::GateCut);
        PrefixSplit split = split_prefix_suffix(c, plan);
        CHECK(split.c1_trunc.ops.size() == split.c1.ops.size() - 2);
    }
}

TEST_CASE("ansatz construction reproduces the truncated prefix") {
    {
        // empty prefix: identity ansatz at theta0
        Circuit empty(2, 2);
        Ansatz a = build_ansatz(empty);
        CHECK(a.parameter_count() == a.blocks.size() * 8);
        StateVector s = simulate_statevector(a.to_circuit(a.theta0));
        CHECK(std::abs(s.amplitude("00") - 1.0) < 1e-12);
    }
    {
        // a single Ry lands in a block parameter
        Circuit c(2, 2);
        c.add(GateOp::ry(0, 0.4));
        Ansatz a = build_ansatz(c);
        bool found = false;
        for (double t : a.theta0)
            if (std::abs(t - 0.4) < 1e-12) found = true;
        CHECK(found);
        CHECK(state_fidelity(a.to_circuit(a.theta0), c) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
    {
        Circuit c = two_address_encoder();
        CutPlan plan = one_cut_plan(c);
        PrefixSplit split = split_prefix_suffix(c, plan);
        Ansatz a = build_ansatz(split.c1_trunc.without_measurements());
        CHECK(state_fidelity(a.to_circuit(a.theta0),
                             split.c1_trunc.without_measurements()) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
    {
        // non-adjacent CX prefixes route through swap blocks
        Circuit c(3, 3);
        c.add(GateOp::h(0));
        c.add(GateOp::ry(2, 0.3));
        c.add(GateOp::cx(0, 2));
        Ansatz a = build_ansatz(c);
        CHECK(state_fidelity(a.to_circuit(a.theta0), c) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
    {
        Circuit c(2, 2);
        c.add(GateOp::measure(0, 0));
        CHECK_THROWS(build_ansatz(c));
    }
}

TEST_CASE("infidelity endpoints") {
    Circuit c = two_address_encoder();
    CutPlan plan = one_cut_plan(c);
    PrefixSplit split = split_prefix_suffix(c, plan);
    Ansatz a = build_ansatz(split.c1_trunc.without_measurements());

    // L(theta0) against the truncated prefix itself is zero
    MpsState trunc_target = simulate_mps(split.c1_trunc.without_measurements());
    CHECK(infidelity(a, a.theta0, trunc_target) ==
          doctest::Approx(0.0).epsilon(1e-9));

    // orthogonal target: |111> vs the |000>-supported ansatz at zero
    Circuit flip(3, 3);
    flip.add(GateOp::x(0));
    flip.add(GateOp::x(1));
    flip.add(GateOp::x(2));
    MpsState ortho = simulate_mps(flip);
    std::vector<double> zeros(a.parameter_count(), 0.0);
    CHECK(infidelity(a, zeros, ortho) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("parameter-shift gradient matches finite differences") {
    Rng rng(5150);
    Circuit c(5, 5);
    c.add(GateOp::h(0));
    c.add(GateOp::ry(1, 0.8));
    c.add(GateOp::cx(0, 1));
    c.add(GateOp::ry(2, -0.5));
    c.add(GateOp::cx(1, 2));
    c.add(GateOp::ry(3, 0.33));
    c.add(GateOp::cx(2, 3));
    c.add(GateOp::cx(3, 4));
    Ansatz a = build_ansatz(c);

    // random target and random parameter point
    Circuit t(5, 5);
    t.add(GateOp::h(0));
    t.add(GateOp::cx(0, 1));
    t.add(GateOp::ry(2, 0.9));
    t.add(GateOp::cx(2, 3));
    t.add(GateOp::ry(4, -1.2));
    MpsState target = simulate_mps(t);

    std::vector<double> theta = a.theta0;
    for (double& x : theta) x += 0.2 * (rng.next_double() - 0.5);

    auto ps = infidelity_gradient(a, theta, target);
    auto fd = finite_difference_gradient(a, theta, target);
    REQUIRE(ps.size() == fd.size());
    double max_diff = 0.0;
    for (std::size_t k = 0; k < ps.size(); ++k)
        max_diff = std::max(max_diff, std::abs(ps[k] - fd[k]));
    CHECK(max_diff < 1e-6);
}

TEST_CASE("optimization on the two-address prefix") {
    Circuit c = two_address_encoder();
    CutPlan plan = one_cut_plan(c);
    PrefixSplit split = split_prefix_suffix(c, plan);
    MpsState target = simulate_mps(split.c1.without_measurements());
    Ansatz a = build_ansatz(split.c1_trunc.without_measurements());

    OptimizeOptions opts;
    opts.epsilon = 1e-3;
    opts.max_iters = 500;
    CompilationResult result = optimize(a, target, split, opts);
    CHECK(result.final_infidelity < 1e-3);
    CHECK(result.iterations <= 500);
    // accepted steps never increase the loss
    for (std::size_t i = 1; i < result.trace.size(); ++i)
        CHECK(result.trace[i].loss <= result.trace[i - 1].loss + 1e-12);

    // assembly at theta0 reproduces the original circuit exactly
    Circuit at_theta0 = assemble_compiled(a, a.theta0, split);
    CHECK(state_fidelity(at_theta0, c) == doctest::Approx(1.0).epsilon(1e-9));

    // compiled circuit carries the cut gates at the recorded indices
    for (std::size_t m = 0; m < result.cut_indices_in_compiled.size(); ++m) {
        const GateOp& g = result.compiled_circuit.ops[static_cast<std::size_t>(
            result.cut_indices_in_compiled[m])];
        CHECK(g.kind == GateKind::CX);
    }
}

TEST_CASE("optimize converges immediately on a reachable target") {
    Circuit c(2, 2);
    c.add(GateOp::h(0));
    c.add(GateOp::cx(0, 1));
    CutPlan none;
    PrefixSplit split = split_prefix_suffix(c, none);
    Ansatz a = build_ansatz(c);
    MpsState target = simulate_mps(c);
    OptimizeOptions opts;
    CompilationResult r = optimize(a, target, split, opts);
    CHECK(r.iterations == 0);
    CHECK(r.final_infidelity < 1e-9);
}

TEST_CASE("optimizer trace serializes to csv") {
    std::vector<OptimizerTracePoint> trace{{0, 0.5, 0.0}, {1, 0.25, 0.1}};
    std::string csv = trace_to_csv(trace);
    CHECK(csv.rfind("iteration,loss,step\n", 0) == 0);
}

TEST_CASE("optimize validates inputs") {
    Circuit c(2, 2);
    Ansatz a = build_ansatz(c);
    MpsState target = simulate_mps(c);
    CutPlan none;
    PrefixSplit split = split_prefix_suffix(c, none);
    OptimizeOptions opts;
    opts.epsilon = 0.0;
    CHECK_THROWS(optimize(a, target, split, opts));
    opts.epsilon = 1e-3;
    opts.max_iters = 0;
    CHECK_THROWS(optimize(a, target, split, opts));
}
