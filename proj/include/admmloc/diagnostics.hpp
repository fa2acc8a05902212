// admmloc: convergence metrics, parameter thresholds, objective values.
#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "admmloc/model.hpp"
#include "admmloc/state.hpp"

namespace admmloc {

/** One row of a solver's metric trace. Absent optionals stay empty in CSV. */
struct MetricsRecord {
    long iter = 0;
    std::optional<double> rmse_sensor;  ///< needs ground truth and >= 1 agent
    std::optional<double> rmse_target;  ///< needs ground truth and the target channel
    double S = 0.0;                     ///< squared smooth-stationarity norm
    double W = 0.0;                     ///< squared direction update gap
    double P = 0.0;                     ///< squared copy-consistency infeasibility
    double G = 0.0;                     ///< composite optimality gap
    std::optional<double> potential;    ///< recorded only when kappa1/kappa2 given
    long long wall_nanos = 0;           ///< elapsed wall clock since run start
};

/** Sufficient parameter levels for descent of the convergence potential. */
struct ThresholdReport {
    int max_degree = 0;          ///< largest node degree
    long degree_sum = 0;         ///< sum of degrees over all nodes
    double max_measurement = 0;  ///< largest distance/range measurement
    double tau_tilde_min = 0;    ///< smallest per-node curvature scale
    double kappa1_min = 0;
    double kappa2_min = 0;  ///< computed at the supplied kappa1 (or kappa1_min)
    double rho_min = 0;     ///< computed at the supplied kappas (or the minima)
    std::optional<bool> kappa1_ok;  ///< set when a kappa1 value was supplied
    std::optional<bool> kappa2_ok;
    std::optional<bool> rho_ok;
};

/** First-order residual norms at a pair of consecutive iterates. */
struct KktResiduals {
    double stationarity_z = 0.0;  ///< aggregate primal stationarity residual
    double stationarity_w = 0.0;  ///< aggregate direction stationarity residual
    double feasibility = 0.0;     ///< max over nodes of the coupling residual norm
};

/**
 * Root-mean-square position error over non-anchor nodes. `estimates` is
 * indexed by node id and must cover every node (anchor entries are ignored).
 * Throws NoGroundTruth without truth, AllAnchors when no agent exists.
 */
double rmse_sensor(const std::vector<Eigen::VectorXd>& estimates,
                   const ScenarioInstance& scenario);

/**
 * Root-mean-square error of the per-node target estimates against the true
 * target, averaged over all nodes. Throws NoGroundTruth without truth.
 */
double rmse_target(const std::vector<Eigen::VectorXd>& per_node_estimates,
                   const ScenarioInstance& scenario);

/** Σ_i ‖HᵀH z_i − HᵀD w_i + Aᵀλ_i‖²: stationarity of the smooth part. */
double stationarity_S(const std::vector<NodeState>& states);

/** Σ_i ‖w_i − w_i_prev‖²: squared movement of the direction variables. */
double update_gap_W(const std::vector<NodeState>& states,
                    const std::vector<AuxiliaryDirections>& previous_w);

/** Σ_i ‖A z_i‖²: squared copy-consistency violation. */
double feasibility_P(const std::vector<NodeState>& states);

/**
 * Composite optimality gap: for each node, the squared distance between z_i
 * and the consensus projection of the whole displaced stack
 * z − (∇_z G + Aᵀλ), plus ‖A z_i‖², plus ‖w_i − w_i_prev‖².
 */
double optimality_gap_G(const std::vector<NodeState>& states,
                        const std::vector<AuxiliaryDirections>& previous_w);

/**
 * Aggregate first-order residuals between two consecutive iterates:
 * stationarity_z collects −HᵀD·Δw + Aᵀ·Δλ + cBᵀB·Δz over all nodes,
 * stationarity_w equals rho·‖Δw‖, feasibility is max_i ‖A z_i‖.
 */
KktResiduals kkt_residuals(const std::vector<NodeState>& current,
                           const std::vector<NodeState>& previous, double c,
                           double rho);

/**
 * Descent potential of a pair of consecutive iterates: the augmented
 * Lagrangian value plus weighted squares of the current and previous
 * coupling residuals, the direction movement, and the BᵀB-seminorm of the
 * primal movement. Throws InfeasibleW when a direction block leaves the
 * unit ball by more than 1e-9.
 */
double potential(const std::vector<NodeState>& current,
                 const std::vector<NodeState>& previous, double c, double rho,
                 double kappa1, double kappa2);

/**
 * Same potential, with the previous iterate given as its primal and
 * direction parts only (the multipliers of `previous` never enter).
 */
double potential(const std::vector<NodeState>& current,
                 const std::vector<NodeLocalVector>& previous_z,
                 const std::vector<AuxiliaryDirections>& previous_w, double c,
                 double rho, double kappa1, double kappa2);

/**
 * Sufficient parameter levels for monotone descent of the potential, given
 * the penalty weight c. When kappa1/kappa2/rho values are supplied, the
 * dependent minima use them and the report carries per-value verdicts.
 */
ThresholdReport parameter_thresholds(const ScenarioInstance& scenario, double c,
                                     std::optional<double> kappa1 = {},
                                     std::optional<double> kappa2 = {},
                                     std::optional<double> rho = {});

/**
 * Nonsmooth localization objective
 * ½ Σ_i [ Σ_{j∈N_i} (‖x_i−x_j‖ − d_ij)² + (‖x_i−y‖ − r_i)² ]
 * at the given positions (indexed by node id) and target.
 */
double original_objective(const std::vector<Eigen::VectorXd>& positions,
                          const Eigen::VectorXd& target,
                          const ScenarioInstance& scenario);

/**
 * Smooth reformulated objective Σ_i F_i at consensus positions and explicit
 * direction variables:
 * F_i = Σ_{j∈N_i} [½‖x_i−x_j‖² − d_ij v_ijᵀ(x_i−x_j)] + ½‖x_i−y‖² − r_i u_iᵀ(x_i−y).
 */
double reformulated_objective(const std::vector<Eigen::VectorXd>& positions,
                              const Eigen::VectorXd& target,
                              const std::vector<AuxiliaryDirections>& w,
                              const ScenarioInstance& scenario);

/**
 * Ball-constrained minimizers of the reformulated objective in w: unit
 * vectors along each residual difference (any unit vector is optimal for a
 * zero difference; this returns zero there, which attains the same value).
 */
std::vector<AuxiliaryDirections> optimal_directions(
    const std::vector<Eigen::VectorXd>& positions, const Eigen::VectorXd& target,
    const ScenarioInstance& scenario);

}  // namespace admmloc
