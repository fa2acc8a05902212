// admmloc: dense reference implementations (test oracles).
#include "admmloc/reference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cassert>
#include <cmath>

#include "admmloc/diagnostics.hpp"
#include "admmloc/errors.hpp"

namespace admmloc {

namespace {

/** Flat offsets of the joint per-node block order [x, p⁻, p⁺, y, q⁻, q⁺]. */
struct JointOffsets {
    int N, n;
    int x() const { return 0; }
    int p_minus(int k) const { return (1 + k) * n; }
    int p_plus(int k) const { return (1 + N + k) * n; }
    int y() const { return (2 * N + 1) * n; }
    int q_minus(int k) const { return (2 * N + 2 + k) * n; }
    int q_plus(int k) const { return (3 * N + 2 + k) * n; }
    int size() const { return (4 * N + 2) * n; }
};

int slot_of(const std::vector<int>& neighbors, int id) {
    auto it = std::find(neighbors.begin(), neighbors.end(), id);
    assert(it != neighbors.end());
    return static_cast<int>(it - neighbors.begin());
}

void require_joint(const std::vector<NodeState>& states) {
    for (const NodeState& s : states) {
        const Channels ch = s.layout().channels;
        if (!ch.cooperative || !ch.target)
            throw ValidationError("dense reference expects both-channel states");
    }
}

}  // namespace

DenseNodeMatrices build_dense(int neighbors, int dim, double c,
                              const std::vector<double>& d, double r) {
    assert(static_cast<int>(d.size()) == neighbors);
    const JointOffsets off{neighbors, dim};
    const int N = neighbors, n = dim;
    const int rows_h = (N + 1) * n;
    const int rows_a = 3 * N * n;

    DenseNodeMatrices m;
    m.H = Eigen::MatrixXd::Zero(rows_h, off.size());
    for (int k = 0; k < N; ++k)
        for (int e = 0; e < n; ++e) {
            m.H(k * n + e, off.x() + e) = 1.0;
            m.H(k * n + e, off.p_plus(k) + e) = -1.0;
        }
    for (int e = 0; e < n; ++e) {
        m.H(N * n + e, off.x() + e) = 1.0;
        m.H(N * n + e, off.y() + e) = -1.0;
    }

    m.A = Eigen::MatrixXd::Zero(rows_a, off.size());
    for (int k = 0; k < N; ++k)
        for (int e = 0; e < n; ++e) {
            m.A(k * n + e, off.x() + e) = 1.0;
            m.A(k * n + e, off.p_minus(k) + e) = -1.0;
            m.A((N + k) * n + e, off.y() + e) = 1.0;
            m.A((N + k) * n + e, off.q_minus(k) + e) = -1.0;
            m.A((2 * N + k) * n + e, off.y() + e) = 1.0;
            m.A((2 * N + k) * n + e, off.q_plus(k) + e) = -1.0;
        }

    m.D = Eigen::MatrixXd::Zero(rows_h, rows_h);
    for (int k = 0; k < N; ++k)
        for (int e = 0; e < n; ++e) m.D(k * n + e, k * n + e) = d[k];
    for (int e = 0; e < n; ++e) m.D(N * n + e, N * n + e) = r;

    m.cBtB = c * (m.A.transpose() * m.A).cwiseAbs() +
             (m.H.transpose() * m.H).cwiseAbs();
    m.U = m.H.transpose() * m.H + c * m.A.transpose() * m.A + m.cBtB;
    return m;
}

std::vector<NodeLocalVector> solve_z_subproblem_dense(
    const std::vector<NodeLocalVector>& z_tilde,
    const std::vector<NodeState>& states, double c) {
    require_joint(states);
    assert(z_tilde.size() == states.size());
    const int n_nodes = static_cast<int>(states.size());
    const int n = states.empty() ? 0 : states[0].layout().dim;

    // Stack all per-node vectors; remember each node's offset.
    std::vector<int> base(n_nodes, 0);
    int total = 0;
    for (int i = 0; i < n_nodes; ++i) {
        base[i] = total;
        total += (4 * states[i].degree() + 2) * n;
    }

    Eigen::VectorXd weights(total);
    Eigen::VectorXd stacked(total);
    for (int i = 0; i < n_nodes; ++i) {
        const DenseNodeMatrices m =
            build_dense(states[i].degree(), n, c, states[i].d, states[i].r);
        weights.segment(base[i], m.U.rows()) = m.U.diagonal();
        stacked.segment(base[i], z_tilde[i].flat().size()) = z_tilde[i].flat();
    }

    // Constraint rows: copy pairs along every directed edge, anchor pins.
    int rows = 0;
    for (const NodeState& s : states) rows += 2 * s.degree() * n;
    for (const NodeState& s : states)
        if (s.anchor) rows += n;

    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(rows, total);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
    int row = 0;
    for (int i = 0; i < n_nodes; ++i) {
        const JointOffsets off{states[i].degree(), n};
        for (int k = 0; k < states[i].degree(); ++k) {
            const int j = states[i].neighbors[k];
            const int back = slot_of(states[j].neighbors, i);
            const JointOffsets joff{states[j].degree(), n};
            for (int e = 0; e < n; ++e) {
                C(row, base[i] + off.p_minus(k) + e) = 1.0;
                C(row, base[j] + joff.p_plus(back) + e) = -1.0;
                ++row;
            }
            for (int e = 0; e < n; ++e) {
                C(row, base[i] + off.q_minus(k) + e) = 1.0;
                C(row, base[j] + joff.q_plus(back) + e) = -1.0;
                ++row;
            }
        }
        if (states[i].anchor)
            for (int e = 0; e < n; ++e) {
                C(row, base[i] + off.x() + e) = 1.0;
                b(row) = states[i].anchor_position(e);
                ++row;
            }
    }
    assert(row == rows);

    // KKT system of min ½(z−z̃)ᵀW(z−z̃) s.t. Cz = b.
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(total + rows, total + rows);
    kkt.topLeftCorner(total, total) = weights.asDiagonal();
    kkt.topRightCorner(total, rows) = C.transpose();
    kkt.bottomLeftCorner(rows, total) = C;
    Eigen::VectorXd rhs(total + rows);
    rhs.head(total) = weights.cwiseProduct(stacked);
    rhs.tail(rows) = b;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible())
        throw SingularSystem("constrained quadratic program is singular");
    const Eigen::VectorXd solution = lu.solve(rhs);

    std::vector<NodeLocalVector> out(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        out[i] = NodeLocalVector(states[i].layout());
        out[i].flat() = solution.segment(base[i], out[i].flat().size());
    }
    return out;
}

std::vector<NodeLocalVector> project_consensus_dense(
    const std::vector<NodeLocalVector>& points,
    const std::vector<NodeState>& states) {
    require_joint(states);
    assert(points.size() == states.size());
    const int n_nodes = static_cast<int>(states.size());
    const int n = states.empty() ? 0 : states[0].layout().dim;

    std::vector<int> base(n_nodes, 0);
    int total = 0;
    for (int i = 0; i < n_nodes; ++i) {
        base[i] = total;
        total += (4 * states[i].degree() + 2) * n;
    }
    Eigen::VectorXd stacked(total);
    for (int i = 0; i < n_nodes; ++i)
        stacked.segment(base[i], points[i].flat().size()) = points[i].flat();

    // Group constraints: every copy of node j's position equals x_j (or a_j
    // when j is an anchor, pinning x_j itself too); target groups likewise
    // tie every copy to y_j.
    int rows = 0;
    for (const NodeState& s : states)
        rows += (4 * s.degree() + (s.anchor ? 1 : 0)) * n;

    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(rows, total);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
    int row = 0;
    for (int j = 0; j < n_nodes; ++j) {
        const JointOffsets joff{states[j].degree(), n};
        auto tie_to_group_head = [&](int col_base, int col_off, int head_off,
                                     bool pinned, const Eigen::VectorXd& pin) {
            for (int e = 0; e < n; ++e) {
                C(row, col_base + col_off + e) = 1.0;
                if (pinned)
                    b(row) = pin(e);
                else
                    C(row, base[j] + head_off + e) = -1.0;
                ++row;
            }
        };
        const bool pin = states[j].anchor;
        if (pin)
            tie_to_group_head(base[j], joff.x(), joff.x(), true,
                              states[j].anchor_position);
        for (int k = 0; k < states[j].degree(); ++k) {
            const int i = states[j].neighbors[k];
            const int back = slot_of(states[i].neighbors, j);
            const JointOffsets ioff{states[i].degree(), n};
            tie_to_group_head(base[j], joff.p_minus(k), joff.x(), pin,
                              states[j].anchor_position);
            tie_to_group_head(base[i], ioff.p_plus(back), joff.x(), pin,
                              states[j].anchor_position);
            tie_to_group_head(base[j], joff.q_minus(k), joff.y(), false, {});
            tie_to_group_head(base[i], ioff.q_plus(back), joff.y(), false, {});
        }
    }
    assert(row == rows);

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(total + rows, total + rows);
    kkt.topLeftCorner(total, total) = Eigen::MatrixXd::Identity(total, total);
    kkt.topRightCorner(total, rows) = C.transpose();
    kkt.bottomLeftCorner(rows, total) = C;
    Eigen::VectorXd rhs(total + rows);
    rhs.head(total) = stacked;
    rhs.tail(rows) = b;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible())
        throw SingularSystem("projection system is singular");
    const Eigen::VectorXd solution = lu.solve(rhs);

    std::vector<NodeLocalVector> out(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        out[i] = NodeLocalVector(states[i].layout());
        out[i].flat() = solution.segment(base[i], out[i].flat().size());
    }
    return out;
}

std::pair<std::vector<Eigen::VectorXd>, Eigen::VectorXd> centralized_solve(
    const ScenarioInstance& scenario, int iters, double step,
    const std::optional<std::pair<std::vector<Eigen::VectorXd>, Eigen::VectorXd>>&
        init) {
    scenario.validate();
    if (!(step > 0)) throw ValidationError("step must be > 0");
    const Graph& g = scenario.graph;
    const int n = scenario.dimension;

    std::vector<Eigen::VectorXd> x(g.num_nodes, Eigen::VectorXd::Zero(n));
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    if (init) {
        if (static_cast<int>(init->first.size()) != g.num_nodes)
            throw ValidationError("init needs one position per node");
        x = init->first;
        y = init->second;
    }
    for (int id : g.anchor_ids) x[id] = scenario.anchor_positions.at(id);

    // Objective at fixed optimal directions; decreasing it at fixed w also
    // decreases the direction-minimized envelope.
    auto objective = [&](const std::vector<Eigen::VectorXd>& px,
                         const Eigen::VectorXd& py,
                         const std::vector<AuxiliaryDirections>& w) {
        return reformulated_objective(px, py, w, scenario);
    };

    for (int it = 0; it < iters; ++it) {
        const std::vector<AuxiliaryDirections> w = optimal_directions(x, y, scenario);
        const double f0 = objective(x, y, w);

        // Gradient of the smooth objective at fixed directions.
        std::vector<Eigen::VectorXd> gx(g.num_nodes, Eigen::VectorXd::Zero(n));
        Eigen::VectorXd gy = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < g.num_nodes; ++i) {
            const auto& nbrs = g.adjacency[i];
            for (size_t k = 0; k < nbrs.size(); ++k) {
                const int j = nbrs[k];
                const int back = slot_of(g.adjacency[j], i);
                gx[i] += 2.0 * (x[i] - x[j]) -
                         scenario.distance(i, j) * w[i].v(static_cast<int>(k)) +
                         scenario.distance(j, i) * w[j].v(back);
            }
            gx[i] += (x[i] - y) - scenario.target_ranges[i] * w[i].u();
            gy += (y - x[i]) + scenario.target_ranges[i] * w[i].u();
        }
        for (int id : g.anchor_ids) gx[id].setZero();

        double grad_sq = gy.squaredNorm();
        for (const auto& gi : gx) grad_sq += gi.squaredNorm();
        if (grad_sq == 0.0) break;

        // Backtracking line search (Armijo) keeps the sweep monotone.
        double alpha = step;
        bool moved = false;
        for (int half = 0; half < 60; ++half) {
            std::vector<Eigen::VectorXd> cx(g.num_nodes);
            for (int i = 0; i < g.num_nodes; ++i) cx[i] = x[i] - alpha * gx[i];
            const Eigen::VectorXd cy = y - alpha * gy;
            if (objective(cx, cy, w) <= f0 - 1e-4 * alpha * grad_sq) {
                x = std::move(cx);
                y = cy;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) break;
    }
    return {x, y};
}

Eigen::VectorXd finite_diff_grad(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& at, double h) {
    Eigen::VectorXd grad(at.size());
    Eigen::VectorXd point = at;
    for (Eigen::Index i = 0; i < at.size(); ++i) {
        point(i) = at(i) + h;
        const double hi = f(point);
        point(i) = at(i) - h;
        const double lo = f(point);
        point(i) = at(i);
        grad(i) = (hi - lo) / (2.0 * h);
    }
    return grad;
}

}  // namespace admmloc
