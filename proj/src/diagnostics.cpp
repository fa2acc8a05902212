// admmloc: convergence metrics, parameter thresholds, objective values.
#include "admmloc/diagnostics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>

#include "admmloc/errors.hpp"
#include "admmloc/operators.hpp"

namespace admmloc {

namespace {

/** Smooth-part gradient plus multiplier pullback: ∇_z G_i + Aᵀλ_i. */
NodeLocalVector stationarity_vector(const NodeState& s) {
    const BlockLayout& L = s.layout();
    const Eigen::VectorXd* fixed = L.channels.cooperative ? nullptr : &s.anchor_position;
    StackedBlocks g = measurement_residuals(s.z, fixed);
    g.flat() -= apply_D(s.w, s.d, s.r).flat();
    NodeLocalVector out = apply_H_transpose(g, L);
    out.flat() += apply_A_transpose(s.lambda, L).flat();
    return out;
}

/** Inner product wᵀ(D·rows): Σ_k d_k v_kᵀ·row_k + r·uᵀ·row_target. */
double directions_dot_scaled(const NodeState& s, const StackedBlocks& rows) {
    const BlockLayout& L = s.layout();
    double acc = 0.0;
    if (L.channels.cooperative)
        for (int k = 0; k < L.neighbors; ++k)
            acc += s.d[k] * s.w.v(k).dot(rows.block(L.position_row(k)));
    if (L.channels.target) acc += s.r * s.w.u().dot(rows.block(L.target_row()));
    return acc;
}

/** Rebuilds the topology (and anchor positions) the states were built from. */
Graph graph_from_states(const std::vector<NodeState>& states,
                        std::map<int, Eigen::VectorXd>* anchor_positions) {
    Graph g;
    g.num_nodes = static_cast<int>(states.size());
    g.adjacency.resize(states.size());
    for (const NodeState& s : states) {
        assert(s.id >= 0 && s.id < g.num_nodes);
        g.adjacency[s.id] = s.neighbors;
        if (s.anchor) {
            g.anchor_ids.push_back(s.id);
            if (anchor_positions) (*anchor_positions)[s.id] = s.anchor_position;
        }
    }
    std::sort(g.anchor_ids.begin(), g.anchor_ids.end());
    return g;
}

void check_sizes(size_t got, size_t want, const char* what) {
    if (got != want)
        throw ValidationError(std::string(what) + ": expected " +
                              std::to_string(want) + " entries, got " +
                              std::to_string(got));
}

}  // namespace

double rmse_sensor(const std::vector<Eigen::VectorXd>& estimates,
                   const ScenarioInstance& scenario) {
    if (!scenario.truth) throw NoGroundTruth("scenario carries no ground truth");
    const Graph& g = scenario.graph;
    if (g.num_agents() == 0)
        throw AllAnchors("every node is an anchor; sensor error is undefined");
    check_sizes(estimates.size(), static_cast<size_t>(g.num_nodes), "estimates");
    double acc = 0.0;
    for (int i = 0; i < g.num_nodes; ++i) {
        if (g.is_anchor(i)) continue;
        acc += (estimates[i] - scenario.truth->node_positions[i]).squaredNorm();
    }
    return std::sqrt(acc / static_cast<double>(g.num_agents()));
}

double rmse_target(const std::vector<Eigen::VectorXd>& per_node_estimates,
                   const ScenarioInstance& scenario) {
    if (!scenario.truth) throw NoGroundTruth("scenario carries no ground truth");
    check_sizes(per_node_estimates.size(),
                static_cast<size_t>(scenario.graph.num_nodes), "target estimates");
    double acc = 0.0;
    for (const Eigen::VectorXd& y : per_node_estimates)
        acc += (y - scenario.truth->target_position).squaredNorm();
    return std::sqrt(acc / static_cast<double>(per_node_estimates.size()));
}

double stationarity_S(const std::vector<NodeState>& states) {
    double acc = 0.0;
    for (const NodeState& s : states)
        acc += stationarity_vector(s).flat().squaredNorm();
    return acc;
}

double update_gap_W(const std::vector<NodeState>& states,
                    const std::vector<AuxiliaryDirections>& previous_w) {
    check_sizes(previous_w.size(), states.size(), "previous directions");
    double acc = 0.0;
    for (size_t i = 0; i < states.size(); ++i)
        acc += (states[i].w.flat() - previous_w[i].flat()).squaredNorm();
    return acc;
}

double feasibility_P(const std::vector<NodeState>& states) {
    double acc = 0.0;
    for (const NodeState& s : states) acc += apply_A(s.z).flat().squaredNorm();
    return acc;
}

double optimality_gap_G(const std::vector<NodeState>& states,
                        const std::vector<AuxiliaryDirections>& previous_w) {
    check_sizes(previous_w.size(), states.size(), "previous directions");
    std::map<int, Eigen::VectorXd> anchor_positions;
    const Graph graph = graph_from_states(states, &anchor_positions);

    // Project the displaced stack z − (∇_z G + Aᵀλ) onto the consensus set.
    std::vector<NodeLocalVector> projected(states.size());
    for (size_t i = 0; i < states.size(); ++i) {
        projected[i] = states[i].z;
        projected[i].flat() -= stationarity_vector(states[i]).flat();
    }
    project_consensus(projected, graph, anchor_positions);

    double acc = 0.0;
    for (size_t i = 0; i < states.size(); ++i) {
        acc += (states[i].z.flat() - projected[i].flat()).squaredNorm();
        acc += apply_A(states[i].z).flat().squaredNorm();
        acc += (states[i].w.flat() - previous_w[i].flat()).squaredNorm();
    }
    return acc;
}

KktResiduals kkt_residuals(const std::vector<NodeState>& current,
                           const std::vector<NodeState>& previous, double c,
                           double rho) {
    check_sizes(previous.size(), current.size(), "previous states");
    KktResiduals out;
    double stat_z_sq = 0.0, w_gap_sq = 0.0, feas_max = 0.0;
    for (size_t i = 0; i < current.size(); ++i) {
        const NodeState& cur = current[i];
        const NodeState& prev = previous[i];
        const BlockLayout& L = cur.layout();

        AuxiliaryDirections dw(L);
        dw.flat() = cur.w.flat() - prev.w.flat();
        Multipliers dl(L);
        dl.flat() = cur.lambda.flat() - prev.lambda.flat();
        NodeLocalVector dz(L);
        dz.flat() = cur.z.flat() - prev.z.flat();

        NodeLocalVector r = apply_H_transpose(apply_D(dw, cur.d, cur.r), L);
        r.flat() = -r.flat();
        r.flat() += apply_A_transpose(dl, L).flat();
        r.flat() += apply_cBtB(dz, c).flat();
        stat_z_sq += r.flat().squaredNorm();

        w_gap_sq += dw.flat().squaredNorm();
        feas_max = std::max(feas_max, apply_A(cur.z).flat().norm());
    }
    out.stationarity_z = std::sqrt(stat_z_sq);
    out.stationarity_w = rho * std::sqrt(w_gap_sq);
    out.feasibility = feas_max;
    return out;
}

double potential(const std::vector<NodeState>& current,
                 const std::vector<NodeLocalVector>& previous_z,
                 const std::vector<AuxiliaryDirections>& previous_w, double c,
                 double rho, double kappa1, double kappa2) {
    check_sizes(previous_z.size(), current.size(), "previous iterates");
    check_sizes(previous_w.size(), current.size(), "previous directions");
    double acc = 0.0;
    for (size_t i = 0; i < current.size(); ++i) {
        const NodeState& s = current[i];
        const BlockLayout& L = s.layout();

        // The directions must stay in the unit balls; the augmented
        // Lagrangian's indicator term would otherwise be +infinity.
        for (int b = 0; b < L.aux_blocks(); ++b)
            if (s.w.block(b).norm() > 1.0 + 1e-9)
                throw InfeasibleW("direction block " + std::to_string(b) +
                                  " of node " + std::to_string(s.id) +
                                  " left the unit ball");

        const double az_now = apply_A(s.z).flat().squaredNorm();
        NodeLocalVector prev = previous_z[i];
        const double az_prev = apply_A(prev).flat().squaredNorm();

        NodeLocalVector dz(L);
        dz.flat() = s.z.flat() - prev.flat();
        AuxiliaryDirections dw(L);
        dw.flat() = s.w.flat() - previous_w[i].flat();

        // Weighted residual squares plus the BᵀB-seminorm of the movement.
        acc += (c / 2.0) * (kappa1 * az_now + kappa2 * az_prev);
        acc += (rho / 4.0) * dw.flat().squaredNorm();
        acc += ((kappa1 + kappa2) / 2.0) * btb_quadratic(dz, c);

        // Augmented Lagrangian at the current iterate.
        const Eigen::VectorXd* fixed =
            L.channels.cooperative ? nullptr : &s.anchor_position;
        const StackedBlocks res = measurement_residuals(s.z, fixed);
        const double smooth = 0.5 * res.flat().squaredNorm() -
                              directions_dot_scaled(s, res);
        const double lambda_az = s.lambda.flat().dot(apply_A(s.z).flat());
        acc += smooth + lambda_az + (c / 2.0) * az_now;
    }
    return acc;
}

double potential(const std::vector<NodeState>& current,
                 const std::vector<NodeState>& previous, double c, double rho,
                 double kappa1, double kappa2) {
    check_sizes(previous.size(), current.size(), "previous states");
    std::vector<NodeLocalVector> prev_z(previous.size());
    std::vector<AuxiliaryDirections> prev_w(previous.size());
    for (size_t i = 0; i < previous.size(); ++i) {
        prev_z[i] = previous[i].z;
        prev_w[i] = previous[i].w;
    }
    return potential(current, prev_z, prev_w, c, rho, kappa1, kappa2);
}

ThresholdReport parameter_thresholds(const ScenarioInstance& scenario, double c,
                                     std::optional<double> kappa1,
                                     std::optional<double> kappa2,
                                     std::optional<double> rho) {
    if (!(c > 0.0)) throw ValidationError("c must be > 0");
    ThresholdReport rep;
    const Graph& g = scenario.graph;
    rep.max_degree = g.max_degree();
    rep.degree_sum = g.degree_sum();
    rep.max_measurement = scenario.max_measurement();

    const double n_max = static_cast<double>(rep.max_degree);
    rep.kappa1_min = 6.0 * (2.0 * n_max + 2.0) * (1.0 + 1.0 / c);

    double tau_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.num_nodes; ++i) {
        const double ni = static_cast<double>(g.degree(i));
        tau_min = std::min(tau_min, 5.0 * (c + 1.0) * (c + 1.0) * ni * ni +
                                        (3.0 * c * c + 4.0 * c + 3.0) * ni);
    }
    rep.tau_tilde_min = tau_min;

    const double kappa1_use = kappa1.value_or(rep.kappa1_min);
    rep.kappa2_min = 3.0 * static_cast<double>(rep.degree_sum) *
                     static_cast<double>(scenario.dimension) * (c + 1.0) *
                     (c + 1.0) * (2.0 * n_max + 1.0) * kappa1_use / tau_min;

    const double kappa2_use = kappa2.value_or(rep.kappa2_min);
    rep.rho_min = 4.0 * rep.max_measurement * rep.max_measurement *
                  (kappa1_use + kappa2_use);

    if (kappa1) rep.kappa1_ok = *kappa1 >= rep.kappa1_min;
    if (kappa2) rep.kappa2_ok = *kappa2 >= rep.kappa2_min;
    if (rho) rep.rho_ok = *rho >= rep.rho_min;
    return rep;
}

double original_objective(const std::vector<Eigen::VectorXd>& positions,
                          const Eigen::VectorXd& target,
                          const ScenarioInstance& scenario) {
    const Graph& g = scenario.graph;
    check_sizes(positions.size(), static_cast<size_t>(g.num_nodes), "positions");
    double acc = 0.0;
    for (int i = 0; i < g.num_nodes; ++i) {
        for (int j : g.adjacency[i]) {
            const double e = (positions[i] - positions[j]).norm() -
                             scenario.distance(i, j);
            acc += e * e;
        }
        const double t = (positions[i] - target).norm() - scenario.target_ranges[i];
        acc += t * t;
    }
    return 0.5 * acc;
}

double reformulated_objective(const std::vector<Eigen::VectorXd>& positions,
                              const Eigen::VectorXd& target,
                              const std::vector<AuxiliaryDirections>& w,
                              const ScenarioInstance& scenario) {
    const Graph& g = scenario.graph;
    check_sizes(positions.size(), static_cast<size_t>(g.num_nodes), "positions");
    check_sizes(w.size(), static_cast<size_t>(g.num_nodes), "directions");
    double acc = 0.0;
    for (int i = 0; i < g.num_nodes; ++i) {
        const auto& nbrs = g.adjacency[i];
        for (size_t k = 0; k < nbrs.size(); ++k) {
            const Eigen::VectorXd diff = positions[i] - positions[nbrs[k]];
            acc += 0.5 * diff.squaredNorm() -
                   scenario.distance(i, nbrs[k]) *
                       w[i].v(static_cast<int>(k)).dot(diff);
        }
        const Eigen::VectorXd tdiff = positions[i] - target;
        acc += 0.5 * tdiff.squaredNorm() -
               scenario.target_ranges[i] * w[i].u().dot(tdiff);
    }
    return acc;
}

std::vector<AuxiliaryDirections> optimal_directions(
    const std::vector<Eigen::VectorXd>& positions, const Eigen::VectorXd& target,
    const ScenarioInstance& scenario) {
    const Graph& g = scenario.graph;
    check_sizes(positions.size(), static_cast<size_t>(g.num_nodes), "positions");
    std::vector<AuxiliaryDirections> out;
    out.reserve(g.num_nodes);
    for (int i = 0; i < g.num_nodes; ++i) {
        const BlockLayout L{g.degree(i), scenario.dimension, Channels{true, true}};
        AuxiliaryDirections w(L);
        const auto& nbrs = g.adjacency[i];
        for (size_t k = 0; k < nbrs.size(); ++k) {
            const Eigen::VectorXd diff = positions[i] - positions[nbrs[k]];
            const double norm = diff.norm();
            if (norm > 0.0) w.v(static_cast<int>(k)) = diff / norm;
        }
        const Eigen::VectorXd tdiff = positions[i] - target;
        const double tnorm = tdiff.norm();
        if (tnorm > 0.0) w.u() = tdiff / tnorm;
        out.push_back(std::move(w));
    }
    return out;
}

}  // namespace admmloc
