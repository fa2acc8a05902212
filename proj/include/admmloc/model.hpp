// admmloc: network model — graphs, scenarios, noise, synthetic generation.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "admmloc/errors.hpp"

namespace admmloc {

/**
 * Connected sensor network topology. Node ids are 0..num_nodes-1; anchor ids
 * are kept sorted; each adjacency list is sorted ascending, which fixes the
 * neighbor-block order used by every per-node vector in the solver.
 */
struct Graph {
    int num_nodes = 0;
    std::vector<int> anchor_ids;            ///< sorted ascending
    std::vector<std::vector<int>> adjacency;  ///< per node, sorted ascending

    bool is_anchor(int id) const;
    int degree(int id) const { return static_cast<int>(adjacency[id].size()); }
    int num_agents() const { return num_nodes - static_cast<int>(anchor_ids.size()); }
    /** Largest node degree. */
    int max_degree() const;
    /** Sum of all node degrees (= 2 · edge count). */
    long degree_sum() const;
    /** Undirected edges as (i, j) pairs with i < j, lexicographically sorted. */
    std::vector<std::pair<int, int>> edges() const;
};

/**
 * Builds and validates a topology from an undirected edge list.
 *
 * Throws SelfLoop, DuplicateEdge, NoAnchor, or DisconnectedGraph. Node or
 * anchor ids outside [0, num_nodes) raise ValidationError.
 */
Graph build_graph(int num_nodes, const std::vector<int>& anchor_ids,
                  const std::vector<std::pair<int, int>>& edges);

/** Distance-measurement noise model. */
struct NoiseModel {
    enum class Kind {
        additive_white_gaussian,  ///< std deviation sigma_add, independent of range
        range_dependent           ///< std deviation sigma_add · true distance
    };
    Kind kind = Kind::additive_white_gaussian;
    double sigma_add = 0.0;  ///< must be >= 0
};

/** Axis-aligned box region; lo and hi have the spatial dimension's length. */
struct Box {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

/** Configuration for synthetic scenario generation. */
struct SyntheticConfig {
    int dimension = 2;        ///< 2 or 3
    int num_agents = 0;
    int num_anchors = 1;      ///< at least 1
    Box region;
    double comm_range = 0.0;  ///< nodes within this distance share an edge
    NoiseModel noise;
    std::uint64_t seed = 0;
    /** Fixed target position; drawn uniformly in the region when absent. */
    std::optional<Eigen::VectorXd> target_position;
};

/** True node positions and target position, kept for evaluation only. */
struct GroundTruth {
    std::vector<Eigen::VectorXd> node_positions;  ///< one per node id
    Eigen::VectorXd target_position;
};

/**
 * One localization problem instance: topology, anchor coordinates, noisy
 * inter-sensor distances (one value per undirected edge), and a noisy range
 * to the passive target from every node (anchors included). Ground truth is
 * optional and used only by evaluation metrics.
 */
struct ScenarioInstance {
    int dimension = 2;  ///< 2 or 3
    Graph graph;
    std::map<int, Eigen::VectorXd> anchor_positions;       ///< id -> position
    std::map<std::pair<int, int>, double> edge_distances;  ///< key (i, j), i < j
    std::vector<double> target_ranges;                     ///< indexed by node id
    std::optional<GroundTruth> truth;

    /** Measured distance for edge {i, j}; ValidationError when absent. */
    double distance(int i, int j) const;
    /** Largest measured value over all edge distances and target ranges. */
    double max_measurement() const;
    /** Checks all cross-field invariants; throws ValidationError. */
    void validate() const;
};

/** max(0, value): measured distances are clamped to be non-negative. */
double clamp_distance(double value);

/**
 * Draws one noisy measurement of a true distance. Gaussian noise with the
 * model's deviation (absolute, or scaled by the true distance for the
 * range-dependent kind), clamped at zero.
 */
double measure_distance(double true_distance, const NoiseModel& noise,
                        std::mt19937_64& rng);

/**
 * Generates a random connected scenario: node positions uniform in the
 * region (agents first, then anchors), edges between all pairs within
 * comm_range, one noise draw per undirected edge plus one per-node target
 * range. Re-draws the whole layout when disconnected, up to 100 attempts
 * (then CannotConnect). Pure function of the config, so equal seeds yield
 * identical scenarios.
 */
ScenarioInstance generate_synthetic(const SyntheticConfig& config);

}  // namespace admmloc
