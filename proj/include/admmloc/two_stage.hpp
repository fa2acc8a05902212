// admmloc: the two-stage pipeline (SCNL) — cooperative localization first,
// then target localization against the frozen sensor estimates.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "admmloc/solver.hpp"

namespace admmloc {

/** Parameters of a two-stage run; c/rho/seed/init are shared by both stages. */
struct ScnlParams {
    double c = 0.5;
    double rho = 1.0;
    int stage1_iters = 100;
    int stage2_iters = 100;
    std::uint64_t seed = 0;
    double init_scale = 1.0;
    int record_every = 1;
    int threads = 1;
};

/** Output of a single pipeline stage. */
struct StageResult {
    /** Stage 1: final position estimates per node id. */
    std::vector<Eigen::VectorXd> position_estimates;
    /** Stage 2: final per-node target estimates. */
    std::vector<Eigen::VectorXd> target_estimates;
    /** Stage 2: mean of the per-node target estimates. */
    Eigen::VectorXd target_estimate;
    std::vector<MetricsRecord> trace;
    double wall_seconds = 0.0;
};

/**
 * Cooperative stage: runs the solver with the target channel disabled, so
 * states carry only position blocks and the trace has no target RMSE. The
 * result is bitwise-independent of the scenario's target ranges.
 */
StageResult run_stage1(const ScenarioInstance& scenario, const ScnlParams& params);

/**
 * Target stage: every node becomes a virtual anchor at the supplied position
 * estimate and only target blocks evolve (fresh zero multipliers, fresh
 * seeded init of the target blocks). Position-copy residuals do not exist in
 * this stage, so they are identically zero by construction.
 */
StageResult run_stage2(const ScenarioInstance& scenario,
                       const std::vector<Eigen::VectorXd>& sensor_positions,
                       const ScnlParams& params);

/**
 * Runs both stages and stitches the traces: stage-1 rows keep their
 * iteration numbers (1..stage1_iters, no target RMSE), stage-2 rows continue
 * at stage1_iters+1 and carry the frozen stage-1 sensor RMSE. Per-stage wall
 * times land in stage1_wall_seconds/stage2_wall_seconds.
 */
SolveResult run_scnl(const ScenarioInstance& scenario, const ScnlParams& params,
                     const MetricHooks& hooks = {});

}  // namespace admmloc
