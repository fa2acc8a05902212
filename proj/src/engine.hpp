// admmloc: internal bulk-synchronous engine shared by the joint solver and
// the two-stage pipeline. Not part of the installed API.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "admmloc/model.hpp"
#include "admmloc/solver.hpp"
#include "admmloc/state.hpp"

namespace admmloc::detail {

struct EngineConfig {
    double c = 0.5;
    double rho = 1.0;
    int max_iters = 0;
    int record_every = 1;
    int threads = 1;
    bool early_exit = false;
    double early_exit_tol = 0.0;
    /** Recorded rows are numbered iter_offset + t (t = 1..max_iters). */
    long iter_offset = 0;
    /** Added to every record's wall_nanos (for stitched multi-stage traces). */
    long long wall_offset_nanos = 0;
    /** Stamped as rmse_sensor when the position channel is frozen. */
    std::optional<double> fixed_rmse_sensor;
};

/**
 * Runs bulk-synchronous rounds over already-initialized states (two parallel
 * phases per round: tentative updates, then exchange/combine/direction/
 * multiplier updates) and records metrics serially in node order. The states
 * are advanced in place.
 */
SolveResult run_engine(const ScenarioInstance& scenario,
                       std::vector<NodeState>& states, const EngineConfig& config,
                       const MetricHooks& hooks);

}  // namespace admmloc::detail
