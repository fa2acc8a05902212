// admmloc: the joint distributed solver (JCNL) and its per-node updates.
//
// Each iteration runs two bulk-synchronous phases. First every node forms a
// tentative update z̃ from its own state alone; then, after exchanging copy
// proposals with its neighbors, every node combines the tentative blocks
// into the next iterate, takes a proximal step on its unit-ball direction
// variables, and ascends its copy-consistency multipliers.
#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

#include "admmloc/diagnostics.hpp"
#include "admmloc/model.hpp"
#include "admmloc/state.hpp"

namespace admmloc {

/** Optional extras recorded alongside the mandatory metric columns. */
struct MetricHooks {
    /** Supplying both enables the potential column of the trace. */
    std::optional<double> kappa1;
    std::optional<double> kappa2;
    /** Called for every recorded row, in iteration order. */
    std::function<void(const MetricsRecord&)> on_record;
};

/** Output of a solver run. */
struct SolveResult {
    /** Final position estimate per node id (known positions for anchors). */
    std::vector<Eigen::VectorXd> position_estimates;
    /** Final per-node target estimates (empty when the target channel is off). */
    std::vector<Eigen::VectorXd> target_estimates;
    /** Network-level target estimate: mean of the per-node estimates. */
    Eigen::VectorXd target_estimate;
    std::vector<MetricsRecord> trace;
    double wall_seconds = 0.0;
    double stage1_wall_seconds = 0.0;  ///< two-stage runs only
    double stage2_wall_seconds = 0.0;  ///< two-stage runs only
    /** Directed copy-proposal messages exchanged per iteration (= 2·edges). */
    long messages_per_iteration = 0;
    long iterations_run = 0;
};

/**
 * Builds the initial per-node states for a scenario: every iterate
 * coordinate drawn Unif(-init_scale, init_scale) from a generator seeded
 * with params.seed (nodes processed in id order), direction variables and
 * multipliers zero, anchor positions clamped. `channels` selects which
 * measurement channels the states carry; target-only states require a known
 * position for every node.
 */
std::vector<NodeState> init_states(const ScenarioInstance& scenario,
                                   const SolverParams& params,
                                   Channels channels = {true, true});

/**
 * Tentative update: z̃ = U⁻¹(HᵀD w − Aᵀλ + cBᵀB z), using the node's current
 * direction variables and multipliers. Anchors clamp the position block to
 * their known position afterwards.
 */
NodeLocalVector compute_z_tilde(const NodeState& state, double c);

/**
 * Combines the node's tentative blocks with its neighbors' copy proposals
 * into the next iterate: positions and target estimates keep their tentative
 * values (anchors their known position); each inbound/outbound copy pair is
 * averaged with its neighbor's mirror proposal — weights (c, 1)/(c+1) for
 * position copies, (1/2, 1/2) for target copies. Requires exactly one
 * message per neighbor; throws MissingMessage otherwise.
 */
NodeLocalVector combine_z_update(const NodeState& state,
                                 const NodeLocalVector& z_tilde_own,
                                 const std::vector<NeighborMessage>& inbound,
                                 double c);

/**
 * Direction update at the new iterate: w̃ = w + (1/rho)·D·(measurement
 * residuals), then every block is projected onto the unit ball.
 */
AuxiliaryDirections update_w(const NodeState& state, const NodeLocalVector& z_new,
                             double rho);

/** Multiplier ascent at the new iterate: λ ← λ + c·A z. */
Multipliers update_lambda(const NodeState& state, const NodeLocalVector& z_new,
                          double c);

/**
 * Runs the joint solver for params.max_iters bulk-synchronous iterations
 * (params.threads workers) and returns final estimates plus a metric trace
 * recorded at iteration 1, every params.record_every-th iteration, and the
 * last iteration. With max_iters = 0 the initial state is returned
 * unchanged. Identical scenario/params give bitwise-identical traces
 * regardless of the worker count.
 */
SolveResult run_jcnl(const ScenarioInstance& scenario, const SolverParams& params,
                     const MetricHooks& hooks = {});

}  // namespace admmloc
