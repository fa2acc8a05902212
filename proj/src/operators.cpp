// admmloc: structured per-node operators implementation.
#include "admmloc/operators.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "admmloc/errors.hpp"

namespace admmloc {

StackedBlocks measurement_residuals(const NodeLocalVector& z,
                                    const Eigen::VectorXd* fixed_position) {
    const BlockLayout& L = z.layout();
    StackedBlocks out(L.measurement_blocks(), L.dim);
    Eigen::VectorXd x;
    if (L.channels.cooperative) {
        x = z.x();
    } else {
        assert(fixed_position != nullptr && fixed_position->size() == L.dim);
        x = *fixed_position;
    }
    if (L.channels.cooperative)
        for (int k = 0; k < L.neighbors; ++k)
            out.block(L.position_row(k)) = x - z.p_plus(k);
    if (L.channels.target) out.block(L.target_row()) = x - z.y();
    return out;
}

StackedBlocks apply_H(const NodeLocalVector& z) {
    assert(z.layout().channels.cooperative);
    return measurement_residuals(z, nullptr);
}

NodeLocalVector apply_H_transpose(const StackedBlocks& g, const BlockLayout& layout) {
    assert(g.blocks() == layout.measurement_blocks() && g.dim() == layout.dim);
    NodeLocalVector out(layout);
    if (layout.channels.cooperative) {
        auto x = out.x();
        for (int k = 0; k < layout.neighbors; ++k) {
            x += g.block(layout.position_row(k));
            out.p_plus(k) = -g.block(layout.position_row(k));
        }
        if (layout.channels.target) x += g.block(layout.target_row());
    }
    if (layout.channels.target) out.y() = -g.block(layout.target_row());
    return out;
}

StackedBlocks apply_A(const NodeLocalVector& z) {
    const BlockLayout& L = z.layout();
    StackedBlocks out(L.constraint_blocks(), L.dim);
    if (L.channels.cooperative)
        for (int k = 0; k < L.neighbors; ++k)
            out.block(L.p_constraint_row(k)) = z.x() - z.p_minus(k);
    if (L.channels.target) {
        for (int k = 0; k < L.neighbors; ++k) {
            out.block(L.q_minus_constraint_row(k)) = z.y() - z.q_minus(k);
            out.block(L.q_plus_constraint_row(k)) = z.y() - z.q_plus(k);
        }
    }
    return out;
}

NodeLocalVector apply_A_transpose(const Multipliers& m, const BlockLayout& layout) {
    assert(m.blocks() == layout.constraint_blocks() && m.layout().dim == layout.dim);
    NodeLocalVector out(layout);
    if (layout.channels.cooperative) {
        auto x = out.x();
        for (int k = 0; k < layout.neighbors; ++k) {
            x += m.l1(k);
            out.p_minus(k) = -m.l1(k);
        }
    }
    if (layout.channels.target) {
        auto y = out.y();
        for (int k = 0; k < layout.neighbors; ++k) {
            y += m.l2(k) + m.l3(k);
            out.q_minus(k) = -m.l2(k);
            out.q_plus(k) = -m.l3(k);
        }
    }
    return out;
}

StackedBlocks apply_D(const AuxiliaryDirections& w, const std::vector<double>& d,
                      double r) {
    const BlockLayout& L = w.layout();
    StackedBlocks out(L.measurement_blocks(), L.dim);
    if (L.channels.cooperative) {
        assert(static_cast<int>(d.size()) == L.neighbors);
        for (int k = 0; k < L.neighbors; ++k)
            out.block(L.position_row(k)) = d[k] * w.v(k);
    }
    if (L.channels.target) out.block(L.target_row()) = r * w.u();
    return out;
}

NodeLocalVector apply_cBtB(const NodeLocalVector& z, double c) {
    const BlockLayout& L = z.layout();
    const int N = L.neighbors;
    NodeLocalVector out(L);
    if (L.channels.cooperative) {
        Eigen::VectorXd x_row = ((c + 1.0) * N + (L.channels.target ? 1.0 : 0.0)) *
                                z.x().eval();
        for (int k = 0; k < N; ++k) {
            x_row += c * z.p_minus(k) + z.p_plus(k);
            out.p_minus(k) = c * (z.x() + z.p_minus(k));
            out.p_plus(k) = z.x() + z.p_plus(k);
        }
        if (L.channels.target) x_row += z.y();
        out.x() = x_row;
    }
    if (L.channels.target) {
        Eigen::VectorXd y_row = (2.0 * c * N + 1.0) * z.y().eval();
        if (L.channels.cooperative) y_row += z.x();
        for (int k = 0; k < N; ++k) {
            y_row += c * (z.q_minus(k) + z.q_plus(k));
            out.q_minus(k) = c * (z.y() + z.q_minus(k));
            out.q_plus(k) = c * (z.y() + z.q_plus(k));
        }
        out.y() = y_row;
    }
    return out;
}

NodeLocalVector apply_U_inverse(const NodeLocalVector& v, double c) {
    const BlockLayout& L = v.layout();
    const int N = L.neighbors;
    NodeLocalVector out(L);
    if (L.channels.cooperative) {
        const double x_weight =
            2.0 * ((c + 1.0) * N + (L.channels.target ? 1.0 : 0.0));
        out.x() = v.x() / x_weight;
        for (int k = 0; k < N; ++k) {
            out.p_minus(k) = v.p_minus(k) / (2.0 * c);
            out.p_plus(k) = v.p_plus(k) / 2.0;
        }
    }
    if (L.channels.target) {
        out.y() = v.y() / (2.0 * (2.0 * c * N + 1.0));
        for (int k = 0; k < N; ++k) {
            out.q_minus(k) = v.q_minus(k) / (2.0 * c);
            out.q_plus(k) = v.q_plus(k) / (2.0 * c);
        }
    }
    return out;
}

AuxiliaryDirections project_unit_balls(const AuxiliaryDirections& w) {
    AuxiliaryDirections out = w;
    for (int k = 0; k < out.blocks(); ++k) {
        const double norm = out.block(k).norm();
        if (norm > 1.0) out.block(k) /= norm;
    }
    return out;
}

namespace {

/** Index of `id` inside the sorted adjacency list `nbrs`. */
int neighbor_slot(const std::vector<int>& nbrs, int id) {
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), id);
    assert(it != nbrs.end() && *it == id);
    return static_cast<int>(it - nbrs.begin());
}

}  // namespace

void project_consensus(std::vector<NodeLocalVector>& z_stack, const Graph& graph,
                       const std::map<int, Eigen::VectorXd>& anchor_positions) {
    assert(static_cast<int>(z_stack.size()) == graph.num_nodes);
    // Groups of distinct nodes touch disjoint coordinates, so processing one
    // group completely (gather then overwrite) cannot disturb another.
    for (int j = 0; j < graph.num_nodes; ++j) {
        const BlockLayout& L = z_stack[j].layout();
        const auto& nbrs = graph.adjacency[j];
        const int deg = static_cast<int>(nbrs.size());

        if (L.channels.cooperative) {
            Eigen::VectorXd mean;
            if (graph.is_anchor(j)) {
                mean = anchor_positions.at(j);
            } else {
                mean = z_stack[j].x().eval();
                for (int k = 0; k < deg; ++k) {
                    const int i = nbrs[k];
                    mean += z_stack[i].p_plus(neighbor_slot(graph.adjacency[i], j));
                    mean += z_stack[j].p_minus(k);
                }
                mean /= static_cast<double>(2 * deg + 1);
            }
            z_stack[j].x() = mean;
            for (int k = 0; k < deg; ++k) {
                const int i = nbrs[k];
                z_stack[i].p_plus(neighbor_slot(graph.adjacency[i], j)) = mean;
                z_stack[j].p_minus(k) = mean;
            }
        }
        if (L.channels.target) {
            Eigen::VectorXd mean = z_stack[j].y().eval();
            for (int k = 0; k < deg; ++k) {
                const int i = nbrs[k];
                mean += z_stack[i].q_plus(neighbor_slot(graph.adjacency[i], j));
                mean += z_stack[j].q_minus(k);
            }
            mean /= static_cast<double>(2 * deg + 1);
            z_stack[j].y() = mean;
            for (int k = 0; k < deg; ++k) {
                const int i = nbrs[k];
                z_stack[i].q_plus(neighbor_slot(graph.adjacency[i], j)) = mean;
                z_stack[j].q_minus(k) = mean;
            }
        }
    }
}

double btb_quadratic(const NodeLocalVector& v, double c) {
    return v.flat().dot(apply_cBtB(v, c).flat());
}

}  // namespace admmloc
