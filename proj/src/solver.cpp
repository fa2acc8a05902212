// admmloc: joint solver, per-node updates, and the bulk-synchronous engine.
#include "admmloc/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "admmloc/errors.hpp"
#include "admmloc/operators.hpp"
#include "admmloc/threading.hpp"
#include "engine.hpp"

namespace admmloc {

namespace {

/** Fused tentative update z̃ = U⁻¹(HᵀD w − Aᵀλ + cBᵀB z), anchors clamped. */
void compute_z_tilde_into(const NodeState& s, double c, NodeLocalVector& out) {
    const BlockLayout& L = s.layout();
    const int N = L.neighbors;
    const int n = L.dim;

    if (L.channels.cooperative) {
        // Numerator of the position block, assembled term by term.
        Eigen::VectorXd x_num = Eigen::VectorXd::Zero(n);
        const double x_weight = (c + 1.0) * N + (L.channels.target ? 1.0 : 0.0);
        x_num += x_weight * s.z.x();
        for (int k = 0; k < N; ++k) {
            x_num += s.d[k] * s.w.v(k);
            x_num -= s.lambda.l1(k);
            x_num += c * s.z.p_minus(k) + s.z.p_plus(k);
            out.p_minus(k) = (s.lambda.l1(k) + c * (s.z.x() + s.z.p_minus(k))) / (2.0 * c);
            out.p_plus(k) = (-s.d[k] * s.w.v(k) + s.z.x() + s.z.p_plus(k)) / 2.0;
        }
        if (L.channels.target) {
            x_num += s.r * s.w.u();
            x_num += s.z.y();
        }
        out.x() = x_num / (2.0 * x_weight);
        if (s.anchor) out.x() = s.anchor_position;
    }
    if (L.channels.target) {
        // The own-position term is the x block when it is a variable, the
        // known position otherwise.
        Eigen::VectorXd y_num = Eigen::VectorXd::Zero(n);
        const double y_weight = 2.0 * c * N + 1.0;
        y_num += y_weight * s.z.y();
        y_num += L.channels.cooperative ? s.z.x().eval() : s.anchor_position;
        y_num -= s.r * s.w.u();
        for (int k = 0; k < N; ++k) {
            y_num -= s.lambda.l2(k) + s.lambda.l3(k);
            y_num += c * (s.z.q_minus(k) + s.z.q_plus(k));
            out.q_minus(k) = (s.lambda.l2(k) + c * (s.z.y() + s.z.q_minus(k))) / (2.0 * c);
            out.q_plus(k) = (s.lambda.l3(k) + c * (s.z.y() + s.z.q_plus(k))) / (2.0 * c);
        }
        out.y() = y_num / (2.0 * y_weight);
    }
}

struct MirrorView {
    Eigen::VectorXd p_minus, p_plus, q_minus, q_plus;
};

/**
 * Combine kernel shared by the message-based public entry point and the
 * engine's direct neighbor reads. `mirror(k)` must yield the neighbor's
 * tentative copies aligned to this node: its inbound/outbound position and
 * target copies of node s.id.
 */
template <typename MirrorBlocks>
void combine_into(const NodeState& s, const NodeLocalVector& z_tilde_own,
                  double c, MirrorBlocks&& mirror, NodeLocalVector& out) {
    const BlockLayout& L = s.layout();
    if (L.channels.cooperative) {
        out.x() = s.anchor ? s.anchor_position : z_tilde_own.x().eval();
        for (int k = 0; k < L.neighbors; ++k) {
            auto m = mirror(k);
            // A node's inbound copy pairs with the neighbor's outbound copy
            // of the same coordinate (and vice versa); the weighted average
            // solves the shared-pair projection under the U weights (c, 1).
            out.p_minus(k) = (c * z_tilde_own.p_minus(k) + m.p_plus) / (c + 1.0);
            out.p_plus(k) = (z_tilde_own.p_plus(k) + c * m.p_minus) / (c + 1.0);
        }
    }
    if (L.channels.target) {
        out.y() = z_tilde_own.y();
        for (int k = 0; k < L.neighbors; ++k) {
            auto m = mirror(k);
            // Target copies carry equal weights (c, c), so a plain average.
            out.q_minus(k) = 0.5 * (z_tilde_own.q_minus(k) + m.q_plus);
            out.q_plus(k) = 0.5 * (z_tilde_own.q_plus(k) + m.q_minus);
        }
    }
}

/** Direction update in place: w ← ball-projection of w + (1/rho)·D·residuals. */
void update_w_inplace(NodeState& s, double rho) {
    const BlockLayout& L = s.layout();
    const Eigen::VectorXd* fixed =
        L.channels.cooperative ? nullptr : &s.anchor_position;
    const StackedBlocks res = measurement_residuals(s.z, fixed);
    if (L.channels.cooperative) {
        for (int k = 0; k < L.neighbors; ++k) {
            auto v = s.w.v(k);
            v += (s.d[k] / rho) * res.block(L.position_row(k));
            const double norm = v.norm();
            if (norm > 1.0) v /= norm;
        }
    }
    if (L.channels.target) {
        auto u = s.w.u();
        u += (s.r / rho) * res.block(L.target_row());
        const double norm = u.norm();
        if (norm > 1.0) u /= norm;
    }
}

/** Multiplier ascent in place: λ ← λ + c·A z. */
void update_lambda_inplace(NodeState& s, double c) {
    const BlockLayout& L = s.layout();
    if (L.channels.cooperative)
        for (int k = 0; k < L.neighbors; ++k)
            s.lambda.l1(k) += c * (s.z.x() - s.z.p_minus(k));
    if (L.channels.target) {
        for (int k = 0; k < L.neighbors; ++k) {
            s.lambda.l2(k) += c * (s.z.y() - s.z.q_minus(k));
            s.lambda.l3(k) += c * (s.z.y() - s.z.q_plus(k));
        }
    }
}

void check_positive(double value, const char* name) {
    if (!(value > 0.0))
        throw ValidationError(std::string(name) + " must be > 0");
}

}  // namespace

std::vector<NodeState> init_states(const ScenarioInstance& scenario,
                                   const SolverParams& params, Channels channels) {
    scenario.validate();
    check_positive(params.c, "c");
    check_positive(params.rho, "rho");
    if (params.max_iters < 0) throw ValidationError("max_iters must be >= 0");
    if (params.init_scale < 0) throw ValidationError("init_scale must be >= 0");
    if (!channels.cooperative && !channels.target)
        throw ValidationError("at least one channel must be active");

    const Graph& graph = scenario.graph;
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> uniform(-params.init_scale,
                                                   params.init_scale);

    std::vector<NodeState> states(graph.num_nodes);
    for (int id = 0; id < graph.num_nodes; ++id) {
        NodeState& s = states[id];
        s.id = id;
        s.neighbors = graph.adjacency[id];
        s.mirror.resize(s.neighbors.size());
        s.d.resize(s.neighbors.size());
        for (size_t k = 0; k < s.neighbors.size(); ++k) {
            const auto& their = graph.adjacency[s.neighbors[k]];
            s.mirror[k] = static_cast<int>(
                std::lower_bound(their.begin(), their.end(), id) - their.begin());
            s.d[k] = scenario.distance(id, s.neighbors[k]);
        }
        s.r = scenario.target_ranges[id];
        s.anchor = graph.is_anchor(id);
        if (s.anchor) s.anchor_position = scenario.anchor_positions.at(id);
        if (!channels.cooperative && !s.anchor)
            throw ValidationError(
                "target-only states need a known position for every node");

        const BlockLayout layout{static_cast<int>(s.neighbors.size()),
                                 scenario.dimension, channels};
        s.z = NodeLocalVector(layout);
        for (Eigen::Index i = 0; i < s.z.flat().size(); ++i)
            s.z.flat()[i] = uniform(rng);
        if (channels.cooperative && s.anchor) s.z.x() = s.anchor_position;
        s.w = AuxiliaryDirections(layout);
        s.lambda = Multipliers(layout);
    }
    return states;
}

NodeLocalVector compute_z_tilde(const NodeState& state, double c) {
    check_positive(c, "c");
    NodeLocalVector out(state.layout());
    compute_z_tilde_into(state, c, out);
    return out;
}

NodeLocalVector combine_z_update(const NodeState& state,
                                 const NodeLocalVector& z_tilde_own,
                                 const std::vector<NeighborMessage>& inbound,
                                 double c) {
    check_positive(c, "c");
    const BlockLayout& L = state.layout();
    // One message per neighbor, located by sender id.
    std::vector<const NeighborMessage*> by_neighbor(state.neighbors.size(), nullptr);
    for (const auto& msg : inbound) {
        auto it = std::lower_bound(state.neighbors.begin(), state.neighbors.end(),
                                   msg.sender);
        if (it == state.neighbors.end() || *it != msg.sender)
            throw ValidationError("message from non-neighbor " +
                                  std::to_string(msg.sender));
        by_neighbor[it - state.neighbors.begin()] = &msg;
    }
    for (size_t k = 0; k < by_neighbor.size(); ++k)
        if (by_neighbor[k] == nullptr)
            throw MissingMessage(state.neighbors[k],
                                 "no message from neighbor " +
                                     std::to_string(state.neighbors[k]));

    NodeLocalVector out(L);
    combine_into(state, z_tilde_own, c,
                 [&](int k) {
                     const NeighborMessage& m = *by_neighbor[k];
                     return MirrorView{m.p_minus, m.p_plus, m.q_minus, m.q_plus};
                 },
                 out);
    return out;
}

AuxiliaryDirections update_w(const NodeState& state, const NodeLocalVector& z_new,
                             double rho) {
    check_positive(rho, "rho");
    NodeState scratch = state;
    scratch.z = z_new;
    update_w_inplace(scratch, rho);
    return scratch.w;
}

Multipliers update_lambda(const NodeState& state, const NodeLocalVector& z_new,
                          double c) {
    check_positive(c, "c");
    NodeState scratch = state;
    scratch.z = z_new;
    update_lambda_inplace(scratch, c);
    return scratch.lambda;
}

namespace detail {

SolveResult run_engine(const ScenarioInstance& scenario,
                       std::vector<NodeState>& states, const EngineConfig& cfg,
                       const MetricHooks& hooks) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const int n_nodes = static_cast<int>(states.size());
    const Channels channels = states.empty() ? Channels{} : states[0].layout().channels;
    const bool want_potential = hooks.kappa1.has_value() && hooks.kappa2.has_value();

    WorkerPool pool(cfg.threads);
    std::vector<NodeLocalVector> z_tilde(n_nodes), z_prev(n_nodes);
    std::vector<AuxiliaryDirections> w_prev(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        z_tilde[i] = NodeLocalVector(states[i].layout());
        z_prev[i] = states[i].z;
        w_prev[i] = states[i].w;
    }

    SolveResult result;
    result.messages_per_iteration = 0;
    for (const auto& s : states) result.messages_per_iteration += s.degree();

    auto elapsed_nanos = [&] {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0)
            .count();
    };
    auto collect_positions = [&] {
        std::vector<Eigen::VectorXd> xs(n_nodes);
        for (int i = 0; i < n_nodes; ++i)
            xs[i] = channels.cooperative ? states[i].z.x().eval()
                                         : states[i].anchor_position;
        return xs;
    };
    auto collect_targets = [&] {
        std::vector<Eigen::VectorXd> ys(n_nodes);
        for (int i = 0; i < n_nodes; ++i) ys[i] = states[i].z.y().eval();
        return ys;
    };
    auto make_record = [&](long t) {
        MetricsRecord rec;
        rec.iter = cfg.iter_offset + t;
        if (channels.cooperative && scenario.truth && scenario.graph.num_agents() > 0)
            rec.rmse_sensor = rmse_sensor(collect_positions(), scenario);
        else
            rec.rmse_sensor = cfg.fixed_rmse_sensor;
        if (channels.target && scenario.truth)
            rec.rmse_target = rmse_target(collect_targets(), scenario);
        rec.S = stationarity_S(states);
        rec.W = update_gap_W(states, w_prev);
        rec.P = feasibility_P(states);
        rec.G = optimality_gap_G(states, w_prev);
        if (want_potential)
            rec.potential = potential(states, z_prev, w_prev, cfg.c, cfg.rho,
                                      *hooks.kappa1, *hooks.kappa2);
        rec.wall_nanos = cfg.wall_offset_nanos + elapsed_nanos();
        return rec;
    };
    auto record_due = [&](long t) {
        return t == 1 || t == cfg.max_iters ||
               (cfg.record_every > 0 && t % cfg.record_every == 0);
    };

    long t = 0;
    for (t = 1; t <= cfg.max_iters; ++t) {
        // Phase 1: every node forms its tentative update from its own state.
        pool.parallel_for(n_nodes, [&](int i) {
            compute_z_tilde_into(states[i], cfg.c, z_tilde[i]);
        });

        // Phase 2: exchange copy proposals, combine, update directions and
        // multipliers. Reads only immutable tentative blocks of neighbors.
        const bool snapshot = record_due(t) || cfg.early_exit;
        pool.parallel_for(n_nodes, [&](int i) {
            NodeState& s = states[i];
            if (snapshot) {
                z_prev[i].flat() = s.z.flat();
                w_prev[i].flat() = s.w.flat();
            }
            combine_into(s, z_tilde[i], cfg.c,
                         [&](int k) {
                             const NodeLocalVector& theirs = z_tilde[s.neighbors[k]];
                             const int m = s.mirror[k];
                             MirrorView view;
                             if (s.layout().channels.cooperative) {
                                 view.p_minus = theirs.p_minus(m);
                                 view.p_plus = theirs.p_plus(m);
                             }
                             if (s.layout().channels.target) {
                                 view.q_minus = theirs.q_minus(m);
                                 view.q_plus = theirs.q_plus(m);
                             }
                             return view;
                         },
                         s.z);
            update_w_inplace(s, cfg.rho);
            update_lambda_inplace(s, cfg.c);
        });

        if (record_due(t)) {
            MetricsRecord rec = make_record(t);
            if (hooks.on_record) hooks.on_record(rec);
            result.trace.push_back(std::move(rec));
        }
        if (cfg.early_exit &&
            stationarity_S(states) + feasibility_P(states) < cfg.early_exit_tol) {
            if (!record_due(t)) {
                MetricsRecord rec = make_record(t);
                if (hooks.on_record) hooks.on_record(rec);
                result.trace.push_back(std::move(rec));
            }
            break;
        }
    }
    result.iterations_run = std::min<long>(t, cfg.max_iters);

    result.position_estimates.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i)
        result.position_estimates[i] = channels.cooperative
                                           ? states[i].z.x().eval()
                                           : states[i].anchor_position;
    if (channels.target) {
        result.target_estimates = collect_targets();
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(scenario.dimension);
        for (const auto& y : result.target_estimates) mean += y;
        if (n_nodes > 0) mean /= static_cast<double>(n_nodes);
        result.target_estimate = mean;
    }
    result.wall_seconds = static_cast<double>(elapsed_nanos()) * 1e-9;
    return result;
}

}  // namespace detail

SolveResult run_jcnl(const ScenarioInstance& scenario, const SolverParams& params,
                     const MetricHooks& hooks) {
    if (params.record_every < 1) throw ValidationError("record_every must be >= 1");
    if (params.threads < 1) throw ValidationError("threads must be >= 1");
    std::vector<NodeState> states = init_states(scenario, params, {true, true});
    detail::EngineConfig cfg;
    cfg.c = params.c;
    cfg.rho = params.rho;
    cfg.max_iters = params.max_iters;
    cfg.record_every = params.record_every;
    cfg.threads = params.threads;
    cfg.early_exit = params.early_exit;
    cfg.early_exit_tol = params.early_exit_tol;
    return detail::run_engine(scenario, states, cfg, hooks);
}

}  // namespace admmloc
