// admmloc: per-node solver state and round-trip message types.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "admmloc/layout.hpp"

namespace admmloc {

/**
 * Everything one node owns while solving: wiring (sorted neighbor ids and,
 * for each neighbor, the index this node occupies in that neighbor's sorted
 * list), local measurements, the anchor role, and the iterate triple
 * (z, w, lambda).
 */
struct NodeState {
    int id = -1;
    std::vector<int> neighbors;  ///< sorted ascending; defines block order
    std::vector<int> mirror;     ///< mirror[k] = index of `id` in neighbors[k]'s list
    std::vector<double> d;       ///< measured distance to neighbors[k]
    double r = 0.0;              ///< measured range to the passive target
    bool anchor = false;
    /** Known own position: anchors always; every node in target-only runs. */
    Eigen::VectorXd anchor_position;

    NodeLocalVector z;
    AuxiliaryDirections w;
    Multipliers lambda;

    int degree() const { return static_cast<int>(neighbors.size()); }
    const BlockLayout& layout() const { return z.layout(); }
};

/**
 * Copy proposals sent from one node's tentative update to a neighbor during
 * the exchange phase: the sender's inbound/outbound copies of the RECEIVER's
 * position and target estimate. Channel-off blocks stay empty.
 */
struct NeighborMessage {
    int sender = -1;
    int receiver = -1;
    Eigen::VectorXd p_minus;  ///< sender's inbound copy of the receiver's position
    Eigen::VectorXd p_plus;   ///< sender's outbound copy of the receiver's position
    Eigen::VectorXd q_minus;  ///< sender's inbound copy of the receiver's target view
    Eigen::VectorXd q_plus;   ///< sender's outbound copy of the receiver's target view
};

/** Parameters of one solver run. */
struct SolverParams {
    double c = 0.5;    ///< consensus penalty weight (> 0)
    double rho = 1.0;  ///< proximal weight of the direction update (> 0)
    int max_iters = 100;
    std::uint64_t seed = 0;
    double init_scale = 1.0;  ///< iterate coordinates start Unif(-s, s)
    int record_every = 1;     ///< metric recording period (iterations)
    int threads = 1;          ///< bulk-synchronous worker count
    bool early_exit = false;  ///< optional stop when P + S < early_exit_tol
    double early_exit_tol = 0.0;
};

}  // namespace admmloc
