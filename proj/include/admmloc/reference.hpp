// admmloc: independent dense reference implementations used by the tests.
//
// Everything here builds explicit matrices from first principles (index
// loops over rows) and solves with Eigen factorizations, deliberately
// sharing no code with the structured operators it cross-checks.
#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "admmloc/model.hpp"
#include "admmloc/state.hpp"

namespace admmloc {

/** Explicit per-node matrices for the joint (both-channel) layout. */
struct DenseNodeMatrices {
    Eigen::MatrixXd H;     ///< measurement map, (N+1)n x (4N+2)n
    Eigen::MatrixXd A;     ///< coupling map, 3Nn x (4N+2)n
    Eigen::MatrixXd D;     ///< measurement scaling, (N+1)n square
    Eigen::MatrixXd cBtB;  ///< c·|AᵀA| + |HᵀH| (entrywise magnitudes)
    Eigen::MatrixXd U;     ///< HᵀH + cAᵀA + cBtB
};

/**
 * Builds the dense joint-layout matrices of one node with `neighbors`
 * neighbors in dimension `dim`, penalty weight c, measured neighbor
 * distances d and target range r.
 */
DenseNodeMatrices build_dense(int neighbors, int dim, double c,
                              const std::vector<double>& d, double r);

/**
 * Dense reference for the combine step: minimizes Σ_i ½‖z_i − z̃_i‖²_{U_i}
 * subject to the copy-pair constraints p⁻_{i,j} = p⁺_{j,i} and
 * q⁻_{i,j} = q⁺_{j,i} for every directed edge, with anchor position blocks
 * pinned. Solved as one KKT system over the stacked network; throws
 * SingularSystem when the factorization fails. A feasible z̃ is returned
 * unchanged. U weights are taken from the dense construction above.
 */
std::vector<NodeLocalVector> solve_z_subproblem_dense(
    const std::vector<NodeLocalVector>& z_tilde,
    const std::vector<NodeState>& states, double c);

/**
 * Dense reference for the consensus projection: unweighted least-squares
 * projection onto equal copies per node group (anchor groups pinned),
 * solved as a KKT system.
 */
std::vector<NodeLocalVector> project_consensus_dense(
    const std::vector<NodeLocalVector>& points,
    const std::vector<NodeState>& states);

/**
 * Centralized baseline on the smooth reformulation: alternates closed-form
 * direction minimization with a backtracking gradient step on the positions
 * and target (anchors clamped), starting from `init` when given (positions
 * indexed by node id, then target) or from zeros. The objective never
 * increases from sweep to sweep. Returns final positions and target.
 */
std::pair<std::vector<Eigen::VectorXd>, Eigen::VectorXd> centralized_solve(
    const ScenarioInstance& scenario, int iters, double step,
    const std::optional<std::pair<std::vector<Eigen::VectorXd>, Eigen::VectorXd>>&
        init = {});

/** Central-difference gradient of f at `at` with half-width h per coordinate. */
Eigen::VectorXd finite_diff_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& at, double h);

}  // namespace admmloc
