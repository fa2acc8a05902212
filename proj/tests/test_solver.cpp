// Per-node update rules against a fully hand-computed two-node trace, the
// message-exchange contract, state initialization, and the synchronous
// engine's recording/determinism guarantees.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <admmloc/errors.hpp>
#include <admmloc/solver.hpp>
#include <cmath>
#include <vector>

using namespace admmloc;

namespace {

/**
 * Two scalar nodes joined by one edge, small enough to run by hand:
 *   node 0 (agent):       d = 2, r = 1, z0 = (1, 2, 3, 4, 5, 6)
 *   node 1 (anchor at 5): d = 2, r = 3, z0 = (5, -1, 0, 2, 1, -2)
 * with z blocks ordered (x, p-, p+, y, q-, q+), zero directions and
 * multipliers, c = rho = 1.
 */
std::vector<NodeState> hand_pair() {
    const BlockLayout L = BlockLayout::joint(1, 1);
    std::vector<NodeState> s(2);
    for (int i = 0; i < 2; ++i) {
        s[i].id = i;
        s[i].neighbors = {1 - i};
        s[i].mirror = {0};
        s[i].d = {2.0};
        s[i].z = NodeLocalVector(L);
        s[i].w = AuxiliaryDirections(L);
        s[i].lambda = Multipliers(L);
    }
    s[0].r = 1.0;
    s[1].r = 3.0;
    s[1].anchor = true;
    s[1].anchor_position = Eigen::VectorXd::Constant(1, 5.0);
    s[0].z.flat() << 1, 2, 3, 4, 5, 6;
    s[1].z.flat() << 5, -1, 0, 2, 1, -2;
    return s;
}

NeighborMessage message_between(const NodeState& sender, const NodeLocalVector& z_tilde,
                                int receiver) {
    NeighborMessage m;
    m.sender = sender.id;
    m.receiver = receiver;
    m.p_minus = z_tilde.p_minus(0);
    m.p_plus = z_tilde.p_plus(0);
    m.q_minus = z_tilde.q_minus(0);
    m.q_plus = z_tilde.q_plus(0);
    return m;
}

/** Connected 4-node scenario (3 agents + anchor) with ground truth. */
ScenarioInstance small_scenario() {
    ScenarioInstance s;
    s.dimension = 2;
    s.graph = build_graph(4, {3}, {{0, 1}, {1, 2}, {2, 3}, {0, 2}});
    s.anchor_positions[3] = Eigen::Vector2d(1.0, 1.0);
    s.edge_distances[{0, 1}] = 0.5;
    s.edge_distances[{1, 2}] = 0.7;
    s.edge_distances[{2, 3}] = 0.4;
    s.edge_distances[{0, 2}] = 0.6;
    s.target_ranges = {0.9, 0.8, 0.5, 0.75};
    GroundTruth truth;
    truth.node_positions = {Eigen::Vector2d(0.0, 0.2), Eigen::Vector2d(0.4, 0.0),
                            Eigen::Vector2d(0.7, 0.6), Eigen::Vector2d(1.0, 1.0)};
    truth.target_position = Eigen::Vector2d(0.3, 0.9);
    s.truth = truth;
    s.validate();
    return s;
}

SolverParams quick_params() {
    SolverParams p;
    p.c = 0.4;
    p.rho = 0.9;
    p.max_iters = 6;
    p.seed = 11;
    p.init_scale = 0.5;
    return p;
}

}  // namespace

TEST_CASE("tentative update reproduces the hand-computed values") {
    const auto s = hand_pair();
    const NodeLocalVector zt0 = compute_z_tilde(s[0], 1.0);
    const NodeLocalVector zt1 = compute_z_tilde(s[1], 1.0);

    Eigen::VectorXd expect0(6), expect1(6);
    expect0 << 2.0, 1.5, 2.0, 4.0, 4.5, 5.0;
    expect1 << 5.0, 2.0, 2.5, 5.0 / 3.0, 1.5, 0.0;
    CHECK((zt0.flat() - expect0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((zt1.flat() - expect1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("combine averages copy pairs and reproduces the hand-computed iterate") {
    const auto s = hand_pair();
    const NodeLocalVector zt0 = compute_z_tilde(s[0], 1.0);
    const NodeLocalVector zt1 = compute_z_tilde(s[1], 1.0);

    const NodeLocalVector z0 =
        combine_z_update(s[0], zt0, {message_between(s[1], zt1, 0)}, 1.0);
    const NodeLocalVector z1 =
        combine_z_update(s[1], zt1, {message_between(s[0], zt0, 1)}, 1.0);

    Eigen::VectorXd expect0(6), expect1(6);
    expect0 << 2.0, 2.0, 2.0, 4.0, 2.25, 3.25;
    expect1 << 5.0, 2.0, 2.0, 5.0 / 3.0, 3.25, 2.25;
    CHECK((z0.flat() - expect0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((z1.flat() - expect1).cwiseAbs().maxCoeff() == 0.0);

    // The combined copies mirror exactly across the edge: my inbound copy of
    // my own value equals the neighbor's outbound copy of it.
    CHECK(z0.p_minus(0)(0) == z1.p_plus(0)(0));
    CHECK(z1.p_minus(0)(0) == z0.p_plus(0)(0));
    CHECK(z0.q_minus(0)(0) == z1.q_plus(0)(0));
    CHECK(z1.q_minus(0)(0) == z0.q_plus(0)(0));
}

TEST_CASE("direction and multiplier updates reproduce the hand-computed values") {
    const auto s = hand_pair();
    NodeLocalVector z0(s[0].layout()), z1(s[1].layout());
    z0.flat() << 2.0, 2.0, 2.0, 4.0, 2.25, 3.25;
    z1.flat() << 5.0, 2.0, 2.0, 5.0 / 3.0, 3.25, 2.25;

    const AuxiliaryDirections w0 = update_w(s[0], z0, 1.0);
    const AuxiliaryDirections w1 = update_w(s[1], z1, 1.0);
    CHECK(w0.v(0)(0) == 0.0);   // zero residual leaves the direction at zero
    CHECK(w0.u()(0) == -1.0);   // step of -2 projected back onto the ball
    CHECK(w1.v(0)(0) == 1.0);   // step of +6 projected
    CHECK(w1.u()(0) == 1.0);

    const Multipliers l0 = update_lambda(s[0], z0, 1.0);
    const Multipliers l1 = update_lambda(s[1], z1, 1.0);
    CHECK(l0.l1(0)(0) == 0.0);
    CHECK(l0.l2(0)(0) == doctest::Approx(7.0 / 4.0).epsilon(1e-15));
    CHECK(l0.l3(0)(0) == doctest::Approx(3.0 / 4.0).epsilon(1e-15));
    CHECK(l1.l1(0)(0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(l1.l2(0)(0) == doctest::Approx(-19.0 / 12.0).epsilon(1e-14));
    CHECK(l1.l3(0)(0) == doctest::Approx(-7.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("anchors keep their known position through both update halves") {
    const auto s = hand_pair();
    const NodeLocalVector zt1 = compute_z_tilde(s[1], 1.0);
    CHECK(zt1.x()(0) == 5.0);
    const NodeLocalVector zt0 = compute_z_tilde(s[0], 1.0);
    const NodeLocalVector z1 =
        combine_z_update(s[1], zt1, {message_between(s[0], zt0, 1)}, 1.0);
    CHECK(z1.x()(0) == 5.0);
}

TEST_CASE("an all-zero state with zero measurements is a fixed point") {
    auto s = hand_pair();
    for (auto& node : s) {
        node.z.flat().setZero();
        node.d = {0.0};
        node.r = 0.0;
        node.anchor = false;
    }
    const NodeLocalVector zt0 = compute_z_tilde(s[0], 0.7);
    CHECK(zt0.flat().cwiseAbs().maxCoeff() == 0.0);
    const NodeLocalVector zt1 = compute_z_tilde(s[1], 0.7);
    const NodeLocalVector z0 =
        combine_z_update(s[0], zt0, {message_between(s[1], zt1, 0)}, 0.7);
    CHECK(z0.flat().cwiseAbs().maxCoeff() == 0.0);
    CHECK(update_w(s[0], z0, 1.3).flat().cwiseAbs().maxCoeff() == 0.0);
    CHECK(update_lambda(s[0], z0, 0.7).flat().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("combine demands exactly the neighbor messages") {
    const auto s = hand_pair();
    const NodeLocalVector zt0 = compute_z_tilde(s[0], 1.0);

    try {
        combine_z_update(s[0], zt0, {}, 1.0);
        FAIL("expected a missing-message error");
    } catch (const MissingMessage& e) {
        CHECK(e.neighbor_id == 1);
    }

    NeighborMessage stranger = message_between(s[1], zt0, 0);
    stranger.sender = 7;
    CHECK_THROWS_AS(combine_z_update(s[0], zt0, {stranger}, 1.0), ValidationError);
}

TEST_CASE("update functions validate their weights") {
    const auto s = hand_pair();
    const NodeLocalVector zt0 = compute_z_tilde(s[0], 1.0);
    CHECK_THROWS_AS(compute_z_tilde(s[0], 0.0), ValidationError);
    CHECK_THROWS_AS(compute_z_tilde(s[0], -1.0), ValidationError);
    CHECK_THROWS_AS(update_w(s[0], zt0, 0.0), ValidationError);
    CHECK_THROWS_AS(update_lambda(s[0], zt0, -0.5), ValidationError);
}

TEST_CASE("state initialization wires topology, measurements, and layouts") {
    const ScenarioInstance scenario = small_scenario();
    const auto states = init_states(scenario, quick_params());
    REQUIRE(states.size() == 4);

    CHECK(states[0].neighbors == std::vector<int>{1, 2});
    CHECK(states[2].neighbors == std::vector<int>{0, 1, 3});
    // mirror[k] points back at this node inside the neighbor's sorted list.
    for (const auto& s : states)
        for (size_t k = 0; k < s.neighbors.size(); ++k)
            CHECK(states[s.neighbors[k]].neighbors[s.mirror[k]] == s.id);

    CHECK(states[0].d == std::vector<double>{0.5, 0.6});
    CHECK(states[2].d == std::vector<double>{0.6, 0.7, 0.4});
    CHECK(states[1].r == 0.8);
    CHECK(states[3].anchor);
    CHECK((states[3].z.x() - Eigen::Vector2d(1.0, 1.0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(!states[0].anchor);

    // Directions and multipliers start at zero; iterates start within scale.
    for (const auto& s : states) {
        CHECK(s.w.flat().cwiseAbs().maxCoeff() == 0.0);
        CHECK(s.lambda.flat().cwiseAbs().maxCoeff() == 0.0);
        CHECK(s.layout().channels == Channels{true, true});
    }
    CHECK(states[0].z.flat().cwiseAbs().maxCoeff() <= quick_params().init_scale);
}

TEST_CASE("state initialization is deterministic in the seed") {
    const ScenarioInstance scenario = small_scenario();
    const auto a = init_states(scenario, quick_params());
    const auto b = init_states(scenario, quick_params());
    for (size_t i = 0; i < a.size(); ++i)
        CHECK((a[i].z.flat() - b[i].z.flat()).cwiseAbs().maxCoeff() == 0.0);

    SolverParams other = quick_params();
    other.seed += 1;
    const auto c = init_states(scenario, other);
    CHECK((a[0].z.flat() - c[0].z.flat()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("zero init scale zeroes every iterate except clamped anchors") {
    const ScenarioInstance scenario = small_scenario();
    SolverParams params = quick_params();
    params.init_scale = 0.0;
    const auto states = init_states(scenario, params);
    CHECK(states[0].z.flat().cwiseAbs().maxCoeff() == 0.0);
    CHECK((states[3].z.x() - Eigen::Vector2d(1.0, 1.0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("channel selection shapes the per-node state") {
    const ScenarioInstance scenario = small_scenario();
    const auto coop = init_states(scenario, quick_params(), {true, false});
    CHECK(coop[0].layout().z_size() == (2 * 2 + 1) * 2);
    // Target-only states require a known position everywhere; with agents
    // in the scenario this is a contract violation.
    CHECK_THROWS_AS(init_states(scenario, quick_params(), {false, true}),
                    ValidationError);
    CHECK_THROWS_AS(init_states(scenario, quick_params(), {false, false}),
                    ValidationError);
}

TEST_CASE("solver parameters are validated before any work") {
    const ScenarioInstance scenario = small_scenario();
    SolverParams p = quick_params();
    SUBCASE("c") { p.c = 0.0; }
    SUBCASE("rho") { p.rho = -1.0; }
    SUBCASE("iterations") { p.max_iters = -3; }
    SUBCASE("init scale") { p.init_scale = -0.1; }
    CHECK_THROWS_AS(init_states(scenario, p), ValidationError);
}

TEST_CASE("engine rejects degenerate recording or threading configs") {
    const ScenarioInstance scenario = small_scenario();
    SolverParams p = quick_params();
    SUBCASE("record_every") { p.record_every = 0; }
    SUBCASE("threads") { p.threads = 0; }
    CHECK_THROWS_AS(run_jcnl(scenario, p), ValidationError);
}

TEST_CASE("one engine round equals the per-node message round") {
    const ScenarioInstance scenario = small_scenario();
    SolverParams params = quick_params();
    params.max_iters = 1;

    // Hand-advance one bulk-synchronous round through the public API.
    auto states = init_states(scenario, params);
    std::vector<NodeLocalVector> tilde;
    for (const auto& s : states) tilde.push_back(compute_z_tilde(s, params.c));
    std::vector<NodeLocalVector> z_next;
    for (auto& s : states) {
        std::vector<NeighborMessage> inbound;
        for (size_t k = 0; k < s.neighbors.size(); ++k) {
            const int nbr = s.neighbors[k];
            const int slot = s.mirror[k];
            NeighborMessage m;
            m.sender = nbr;
            m.receiver = s.id;
            m.p_minus = tilde[nbr].p_minus(slot);
            m.p_plus = tilde[nbr].p_plus(slot);
            m.q_minus = tilde[nbr].q_minus(slot);
            m.q_plus = tilde[nbr].q_plus(slot);
            inbound.push_back(std::move(m));
        }
        z_next.push_back(combine_z_update(s, tilde[s.id], inbound, params.c));
    }
    for (auto& s : states) {
        s.w = update_w(s, z_next[s.id], params.rho);
        s.lambda = update_lambda(s, z_next[s.id], params.c);
        s.z = z_next[s.id];
    }

    const SolveResult engine = run_jcnl(scenario, params);
    REQUIRE(engine.position_estimates.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK((engine.position_estimates[i] - states[i].z.x()).cwiseAbs().maxCoeff() ==
              0.0);
        CHECK((engine.target_estimates[i] - states[i].z.y()).cwiseAbs().maxCoeff() ==
              0.0);
    }
}

TEST_CASE("trace rows land at the first, periodic, and final iterations") {
    const ScenarioInstance scenario = small_scenario();
    SolverParams params = quick_params();
    params.max_iters = 10;
    params.record_every = 3;
    const SolveResult result = run_jcnl(scenario, params);

    std::vector<long> iters;
    for (const auto& rec : result.trace) iters.push_back(rec.iter);
    CHECK(iters == std::vector<long>{1, 3, 6, 9, 10});
    CHECK(result.iterations_run == 10);
    CHECK(result.messages_per_iteration == 8);  // twice the edge count

    for (size_t i = 1; i < result.trace.size(); ++i)
        CHECK(result.trace[i].wall_nanos >= result.trace[i - 1].wall_nanos);
    for (const auto& rec : result.trace) {
        CHECK(rec.rmse_sensor.has_value());
        CHECK(rec.rmse_target.has_value());
        CHECK(!rec.potential.has_value());  // no kappas supplied
        CHECK(rec.S >= 0.0);
        CHECK(rec.W >= 0.0);
        CHECK(rec.P >= 0.0);
        CHECK(rec.G >= 0.0);
    }
}

TEST_CASE("a zero-iteration run returns the initial state untouched") {
    const ScenarioInstance scenario = small_scenario();
    SolverParams params = quick_params();
    params.max_iters = 0;
    const SolveResult result = run_jcnl(scenario, params);
    CHECK(result.trace.empty());
    CHECK(result.iterations_run == 0);
    const auto init = init_states(scenario, params);
    for (int i = 0; i < 4; ++i)
        CHECK((result.position_estimates[i] - init[i].z.x()).cwiseAbs().maxCoeff() ==
              0.0);
}

TEST_CASE("scenarios without ground truth yield traces without error columns") {
    ScenarioInstance scenario = small_scenario();
    scenario.truth.reset();
    SolverParams params = quick_params();
    params.max_iters = 2;
    const SolveResult result = run_jcnl(scenario, params);
    for (const auto& rec : result.trace) {
        CHECK(!rec.rmse_sensor.has_value());
        CHECK(!rec.rmse_target.has_value());
    }
}

TEST_CASE("supplying both potential weights turns the potential column on") {
    const ScenarioInstance scenario = small_scenario();
    SolverParams params = quick_params();
    params.max_iters = 3;
    MetricHooks hooks;
    hooks.kappa1 = 50.0;
    hooks.kappa2 = 200.0;
    std::vector<long> seen;
    hooks.on_record = [&seen](const MetricsRecord& rec) { seen.push_back(rec.iter); };
    const SolveResult result = run_jcnl(scenario, params, hooks);
    CHECK(seen == std::vector<long>{1, 2, 3});
    for (const auto& rec : result.trace) CHECK(rec.potential.has_value());
}

TEST_CASE("the network target estimate is the mean of the per-node estimates") {
    const ScenarioInstance scenario = small_scenario();
    SolverParams params = quick_params();
    params.max_iters = 4;
    const SolveResult result = run_jcnl(scenario, params);
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& y : result.target_estimates) mean += y;
    mean /= 4.0;
    CHECK((result.target_estimate - mean).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("identical runs are bitwise identical regardless of worker count") {
    const ScenarioInstance scenario = small_scenario();
    SolverParams params = quick_params();
    params.max_iters = 25;
    params.record_every = 5;

    const SolveResult base = run_jcnl(scenario, params);
    for (int threads : {1, 3, 8}) {
        SolverParams alt = params;
        alt.threads = threads;
        const SolveResult run = run_jcnl(scenario, alt);
        REQUIRE(run.trace.size() == base.trace.size());
        for (size_t i = 0; i < base.trace.size(); ++i) {
            CHECK(run.trace[i].iter == base.trace[i].iter);
            CHECK(run.trace[i].S == base.trace[i].S);
            CHECK(run.trace[i].W == base.trace[i].W);
            CHECK(run.trace[i].P == base.trace[i].P);
            CHECK(run.trace[i].G == base.trace[i].G);
            CHECK(*run.trace[i].rmse_sensor == *base.trace[i].rmse_sensor);
            CHECK(*run.trace[i].rmse_target == *base.trace[i].rmse_target);
        }
        for (int i = 0; i < 4; ++i)
            CHECK((run.position_estimates[i] - base.position_estimates[i])
                      .cwiseAbs()
                      .maxCoeff() == 0.0);
    }
}

TEST_CASE("early exit stops after the stationarity and feasibility gaps collapse") {
    const ScenarioInstance scenario = small_scenario();
    SolverParams params = quick_params();
    params.max_iters = 50;
    params.record_every = 50;
    params.early_exit = true;
    params.early_exit_tol = 1e18;  // satisfied immediately
    const SolveResult result = run_jcnl(scenario, params);
    CHECK(result.iterations_run == 1);
    REQUIRE(result.trace.size() == 1);
    CHECK(result.trace[0].iter == 1);
}
