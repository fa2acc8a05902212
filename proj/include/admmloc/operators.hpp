// admmloc: structured per-node linear operators.
//
// The solver never materializes its block matrices. Each operator below is
// the closed-form action of one of them on flat per-node storage:
//   - the measurement map H stacks the residual rows (x - p⁺_k per neighbor,
//     then x - y for the target row),
//   - the coupling map A stacks the copy rows (x - p⁻_k, then y - q⁻_k and
//     y - q⁺_k),
//   - D scales measurement rows by the measured distances,
//   - cBᵀB is the consensus-penalty curvature c·|AᵀA| + |HᵀH| (entrywise
//     magnitudes), which is what makes the tentative update diagonal,
//   - U = HᵀH + cAᵀA + cBᵀB is that diagonal; its inverse is a per-block
//     division.
// All operators respect the channel flags in the vector's layout, so the
// same code serves the joint solver and both reduced pipeline stages.
#pragma once

#include <Eigen/Core>
#include <map>
#include <vector>

#include "admmloc/layout.hpp"
#include "admmloc/model.hpp"

namespace admmloc {

/**
 * Measurement residual rows of one node. For layouts without the
 * cooperative channel the own position is not a variable, so the caller
 * must pass it via `fixed_position`.
 */
StackedBlocks measurement_residuals(const NodeLocalVector& z,
                                    const Eigen::VectorXd* fixed_position = nullptr);

/** Measurement rows H·z (cooperative channel required in the layout). */
StackedBlocks apply_H(const NodeLocalVector& z);

/** Adjoint of the measurement map: scatters row blocks back onto z blocks. */
NodeLocalVector apply_H_transpose(const StackedBlocks& g, const BlockLayout& layout);

/** Coupling rows A·z: x - p⁻_k, then y - q⁻_k, then y - q⁺_k. */
StackedBlocks apply_A(const NodeLocalVector& z);

/** Adjoint of the coupling map acting on a multiplier stack. */
NodeLocalVector apply_A_transpose(const Multipliers& m, const BlockLayout& layout);

/**
 * Measurement scaling D·w: block k is d[k]·v_k, the target block is r·u.
 * D is diagonal, hence self-adjoint.
 */
StackedBlocks apply_D(const AuxiliaryDirections& w, const std::vector<double>& d,
                      double r);

/** Consensus-penalty curvature c·BᵀB applied to z (c > 0). */
NodeLocalVector apply_cBtB(const NodeLocalVector& z, double c);

/**
 * Applies U⁻¹ for U = HᵀH + cAᵀA + cBᵀB. U is block-diagonal with scalar
 * weights 2[(c+1)N + 1] on x (the +1 only when the target channel is on),
 * 2c on p⁻, 2 on p⁺, 2(2cN + 1) on y, and 2c on q⁻/q⁺.
 */
NodeLocalVector apply_U_inverse(const NodeLocalVector& v, double c);

/** Scales every direction block b to b / max(1, ‖b‖): the unit-ball projection. */
AuxiliaryDirections project_unit_balls(const AuxiliaryDirections& w);

/**
 * Euclidean projection of a full network stack onto the consensus set: for
 * every node j, all copies of its position ({x_j} ∪ {p⁺_{i,j}} ∪ {p⁻_{j,i}})
 * are replaced by their mean — by the known position exactly when j is an
 * anchor — and likewise all copies of its target view ({y_j} ∪ {q⁺_{i,j}} ∪
 * {q⁻_{j,i}}) by their mean. Operates in place; z_stack is indexed by node id.
 */
void project_consensus(std::vector<NodeLocalVector>& z_stack, const Graph& graph,
                       const std::map<int, Eigen::VectorXd>& anchor_positions);

/** Quadratic form ⟨v, cBᵀB v⟩ (so ‖v‖²_{BᵀB} times c). */
double btb_quadratic(const NodeLocalVector& v, double c);

}  // namespace admmloc
