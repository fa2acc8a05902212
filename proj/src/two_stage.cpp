// admmloc: two-stage pipeline — cooperative stage, then target stage against
// the frozen sensor estimates.
#include "admmloc/two_stage.hpp"

#include <numeric>
#include <string>
#include <utility>

#include "admmloc/errors.hpp"
#include "engine.hpp"

namespace admmloc {

namespace {

SolverParams to_solver_params(const ScnlParams& p, int iters) {
    SolverParams sp;
    sp.c = p.c;
    sp.rho = p.rho;
    sp.max_iters = iters;
    sp.seed = p.seed;
    sp.init_scale = p.init_scale;
    sp.record_every = p.record_every;
    sp.threads = p.threads;
    return sp;
}

void check_stage_params(const ScnlParams& p) {
    if (p.stage1_iters < 0 || p.stage2_iters < 0)
        throw ValidationError("stage iteration counts must be >= 0");
    if (p.record_every < 1) throw ValidationError("record_every must be >= 1");
    if (p.threads < 1) throw ValidationError("threads must be >= 1");
}

/** The same network with every node pinned at a supplied position. */
ScenarioInstance virtual_anchor_scenario(
    const ScenarioInstance& scenario,
    const std::vector<Eigen::VectorXd>& sensor_positions) {
    if (static_cast<int>(sensor_positions.size()) != scenario.graph.num_nodes)
        throw ValidationError("need one sensor position per node, got " +
                              std::to_string(sensor_positions.size()));
    for (const auto& p : sensor_positions)
        if (p.size() != scenario.dimension)
            throw ValidationError("sensor position has wrong dimension");

    ScenarioInstance derived = scenario;
    derived.graph.anchor_ids.resize(scenario.graph.num_nodes);
    std::iota(derived.graph.anchor_ids.begin(), derived.graph.anchor_ids.end(), 0);
    derived.anchor_positions.clear();
    for (int id = 0; id < scenario.graph.num_nodes; ++id)
        derived.anchor_positions[id] = sensor_positions[id];
    return derived;
}

SolveResult run_stage1_engine(const ScenarioInstance& scenario,
                              const ScnlParams& params, const MetricHooks& hooks) {
    std::vector<NodeState> states =
        init_states(scenario, to_solver_params(params, params.stage1_iters),
                    Channels{true, false});
    detail::EngineConfig cfg;
    cfg.c = params.c;
    cfg.rho = params.rho;
    cfg.max_iters = params.stage1_iters;
    cfg.record_every = params.record_every;
    cfg.threads = params.threads;
    return detail::run_engine(scenario, states, cfg, hooks);
}

SolveResult run_stage2_engine(const ScenarioInstance& derived,
                              const ScnlParams& params, const MetricHooks& hooks,
                              long iter_offset, long long wall_offset_nanos,
                              std::optional<double> fixed_rmse_sensor) {
    std::vector<NodeState> states =
        init_states(derived, to_solver_params(params, params.stage2_iters),
                    Channels{false, true});
    detail::EngineConfig cfg;
    cfg.c = params.c;
    cfg.rho = params.rho;
    cfg.max_iters = params.stage2_iters;
    cfg.record_every = params.record_every;
    cfg.threads = params.threads;
    cfg.iter_offset = iter_offset;
    cfg.wall_offset_nanos = wall_offset_nanos;
    cfg.fixed_rmse_sensor = fixed_rmse_sensor;
    return detail::run_engine(derived, states, cfg, hooks);
}

StageResult to_stage_result(SolveResult&& r) {
    StageResult out;
    out.position_estimates = std::move(r.position_estimates);
    out.target_estimates = std::move(r.target_estimates);
    out.target_estimate = std::move(r.target_estimate);
    out.trace = std::move(r.trace);
    out.wall_seconds = r.wall_seconds;
    return out;
}

}  // namespace

StageResult run_stage1(const ScenarioInstance& scenario, const ScnlParams& params) {
    check_stage_params(params);
    return to_stage_result(run_stage1_engine(scenario, params, {}));
}

StageResult run_stage2(const ScenarioInstance& scenario,
                       const std::vector<Eigen::VectorXd>& sensor_positions,
                       const ScnlParams& params) {
    check_stage_params(params);
    const ScenarioInstance derived =
        virtual_anchor_scenario(scenario, sensor_positions);
    return to_stage_result(run_stage2_engine(derived, params, {}, 0, 0, {}));
}

SolveResult run_scnl(const ScenarioInstance& scenario, const ScnlParams& params,
                     const MetricHooks& hooks) {
    check_stage_params(params);

    SolveResult stage1 = run_stage1_engine(scenario, params, hooks);

    // Sensor error is frozen after stage 1; stage-2 rows repeat it so the
    // stitched trace stays rectangular.
    std::optional<double> frozen_rmse;
    if (scenario.truth && scenario.graph.num_agents() > 0)
        frozen_rmse = rmse_sensor(stage1.position_estimates, scenario);

    const ScenarioInstance derived =
        virtual_anchor_scenario(scenario, stage1.position_estimates);
    SolveResult stage2 = run_stage2_engine(
        derived, params, hooks, params.stage1_iters,
        static_cast<long long>(stage1.wall_seconds * 1e9), frozen_rmse);

    SolveResult out;
    out.position_estimates = std::move(stage1.position_estimates);
    out.target_estimates = std::move(stage2.target_estimates);
    out.target_estimate = std::move(stage2.target_estimate);
    out.trace = std::move(stage1.trace);
    out.trace.insert(out.trace.end(), stage2.trace.begin(), stage2.trace.end());
    out.stage1_wall_seconds = stage1.wall_seconds;
    out.stage2_wall_seconds = stage2.wall_seconds;
    out.wall_seconds = stage1.wall_seconds + stage2.wall_seconds;
    out.messages_per_iteration = stage1.messages_per_iteration;
    out.iterations_run = stage1.iterations_run + stage2.iterations_run;
    return out;
}

}  // namespace admmloc
