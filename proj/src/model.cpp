// admmloc: network model implementation.
#include "admmloc/model.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <string>

namespace admmloc {

bool Graph::is_anchor(int id) const {
    return std::binary_search(anchor_ids.begin(), anchor_ids.end(), id);
}

int Graph::max_degree() const {
    int best = 0;
    for (const auto& nbrs : adjacency) best = std::max(best, static_cast<int>(nbrs.size()));
    return best;
}

long Graph::degree_sum() const {
    long total = 0;
    for (const auto& nbrs : adjacency) total += static_cast<long>(nbrs.size());
    return total;
}

std::vector<std::pair<int, int>> Graph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < num_nodes; ++i)
        for (int j : adjacency[i])
            if (i < j) out.emplace_back(i, j);
    return out;
}

namespace {

bool connected(int num_nodes, const std::vector<std::vector<int>>& adjacency) {
    if (num_nodes == 0) return false;
    std::vector<char> seen(num_nodes, 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        int at = frontier.front();
        frontier.pop();
        for (int next : adjacency[at]) {
            if (!seen[next]) {
                seen[next] = 1;
                ++reached;
                frontier.push(next);
            }
        }
    }
    return reached == num_nodes;
}

}  // namespace

Graph build_graph(int num_nodes, const std::vector<int>& anchor_ids,
                  const std::vector<std::pair<int, int>>& edges) {
    if (num_nodes <= 0) throw ValidationError("graph needs at least one node");
    Graph g;
    g.num_nodes = num_nodes;
    g.anchor_ids = anchor_ids;
    std::sort(g.anchor_ids.begin(), g.anchor_ids.end());
    g.anchor_ids.erase(std::unique(g.anchor_ids.begin(), g.anchor_ids.end()),
                       g.anchor_ids.end());
    if (g.anchor_ids.empty())
        throw NoAnchor("at least one anchor node is required");
    for (int id : g.anchor_ids)
        if (id < 0 || id >= num_nodes)
            throw ValidationError("anchor id " + std::to_string(id) + " out of range");

    g.adjacency.assign(num_nodes, {});
    std::set<std::pair<int, int>> seen;
    for (auto [i, j] : edges) {
        if (i < 0 || i >= num_nodes || j < 0 || j >= num_nodes)
            throw ValidationError("edge (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ") out of range");
        if (i == j)
            throw SelfLoop("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") connects a node to itself");
        auto key = std::minmax(i, j);
        if (!seen.insert(key).second)
            throw DuplicateEdge("edge {" + std::to_string(key.first) + ", " +
                                std::to_string(key.second) + "} appears twice");
        g.adjacency[i].push_back(j);
        g.adjacency[j].push_back(i);
    }
    for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());

    if (!connected(num_nodes, g.adjacency))
        throw DisconnectedGraph("the measurement graph is not connected");
    return g;
}

double ScenarioInstance::distance(int i, int j) const {
    auto key = std::minmax(i, j);
    auto it = edge_distances.find({key.first, key.second});
    if (it == edge_distances.end())
        throw ValidationError("no measured distance for edge {" +
                              std::to_string(key.first) + ", " +
                              std::to_string(key.second) + "}");
    return it->second;
}

double ScenarioInstance::max_measurement() const {
    double best = 0.0;
    for (const auto& [edge, d] : edge_distances) best = std::max(best, d);
    for (double r : target_ranges) best = std::max(best, r);
    return best;
}

void ScenarioInstance::validate() const {
    if (dimension != 2 && dimension != 3)
        throw ValidationError("dimension must be 2 or 3");
    if (graph.num_nodes <= 0) throw ValidationError("scenario has no nodes");
    for (int id : graph.anchor_ids) {
        auto it = anchor_positions.find(id);
        if (it == anchor_positions.end())
            throw ValidationError("anchor " + std::to_string(id) + " has no position");
        if (it->second.size() != dimension)
            throw ValidationError("anchor " + std::to_string(id) +
                                  " position has wrong dimension");
    }
    for (const auto& [id, pos] : anchor_positions) {
        if (!graph.is_anchor(id))
            throw ValidationError("node " + std::to_string(id) +
                                  " has an anchor position but is not an anchor");
        (void)pos;
    }
    for (auto [i, j] : graph.edges()) {
        auto it = edge_distances.find({i, j});
        if (it == edge_distances.end())
            throw ValidationError("edge {" + std::to_string(i) + ", " +
                                  std::to_string(j) + "} has no measured distance");
        if (!(it->second >= 0))
            throw ValidationError("negative measured distance on edge {" +
                                  std::to_string(i) + ", " + std::to_string(j) + "}");
    }
    if (edge_distances.size() != graph.edges().size())
        throw ValidationError("edge distance map does not match the edge set");
    if (static_cast<int>(target_ranges.size()) != graph.num_nodes)
        throw ValidationError("every node needs a target range measurement");
    for (double r : target_ranges)
        if (!(r >= 0)) throw ValidationError("negative target range");
    if (truth) {
        if (static_cast<int>(truth->node_positions.size()) != graph.num_nodes)
            throw ValidationError("ground truth must cover every node");
        for (const auto& p : truth->node_positions)
            if (p.size() != dimension)
                throw ValidationError("ground-truth position has wrong dimension");
        if (truth->target_position.size() != dimension)
            throw ValidationError("ground-truth target has wrong dimension");
    }
}

double clamp_distance(double value) { return value < 0.0 ? 0.0 : value; }

double measure_distance(double true_distance, const NoiseModel& noise,
                        std::mt19937_64& rng) {
    if (noise.sigma_add < 0) throw ValidationError("noise deviation must be >= 0");
    const double sigma = noise.kind == NoiseModel::Kind::range_dependent
                             ? noise.sigma_add * true_distance
                             : noise.sigma_add;
    double draw = 0.0;
    if (sigma > 0) {
        std::normal_distribution<double> gauss(0.0, sigma);
        draw = gauss(rng);
    }
    return clamp_distance(true_distance + draw);
}

namespace {

Eigen::VectorXd draw_in_box(const Box& region, std::mt19937_64& rng) {
    Eigen::VectorXd point(region.lo.size());
    for (Eigen::Index k = 0; k < point.size(); ++k) {
        std::uniform_real_distribution<double> coord(region.lo[k], region.hi[k]);
        point[k] = coord(rng);
    }
    return point;
}

}  // namespace

ScenarioInstance generate_synthetic(const SyntheticConfig& config) {
    if (config.dimension != 2 && config.dimension != 3)
        throw ValidationError("dimension must be 2 or 3");
    if (config.num_anchors < 1) throw NoAnchor("at least one anchor is required");
    if (config.num_agents < 0) throw ValidationError("negative agent count");
    if (config.region.lo.size() != config.dimension ||
        config.region.hi.size() != config.dimension)
        throw ValidationError("region bounds must match the dimension");
    for (Eigen::Index k = 0; k < config.region.lo.size(); ++k)
        if (!(config.region.lo[k] <= config.region.hi[k]))
            throw ValidationError("region lower bound exceeds upper bound");
    if (!(config.comm_range > 0)) throw ValidationError("comm_range must be > 0");
    if (config.target_position && config.target_position->size() != config.dimension)
        throw ValidationError("target position must match the dimension");

    const int num_nodes = config.num_agents + config.num_anchors;
    std::mt19937_64 rng(config.seed);
    constexpr int kMaxAttempts = 100;

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        // Agents occupy ids 0..num_agents-1, anchors follow.
        std::vector<Eigen::VectorXd> positions(num_nodes);
        for (int i = 0; i < num_nodes; ++i) positions[i] = draw_in_box(config.region, rng);
        Eigen::VectorXd target = config.target_position
                                     ? *config.target_position
                                     : draw_in_box(config.region, rng);

        std::vector<std::pair<int, int>> edges;
        std::vector<std::vector<int>> adjacency(num_nodes);
        for (int i = 0; i < num_nodes; ++i) {
            for (int j = i + 1; j < num_nodes; ++j) {
                if ((positions[i] - positions[j]).norm() <= config.comm_range) {
                    edges.emplace_back(i, j);
                    adjacency[i].push_back(j);
                    adjacency[j].push_back(i);
                }
            }
        }
        if (!connected(num_nodes, adjacency)) continue;

        std::vector<int> anchor_ids(config.num_anchors);
        for (int a = 0; a < config.num_anchors; ++a) anchor_ids[a] = config.num_agents + a;

        ScenarioInstance scenario;
        scenario.dimension = config.dimension;
        scenario.graph = build_graph(num_nodes, anchor_ids, edges);
        for (int id : anchor_ids) scenario.anchor_positions[id] = positions[id];
        for (auto [i, j] : edges) {
            const double true_d = (positions[i] - positions[j]).norm();
            scenario.edge_distances[{i, j}] = measure_distance(true_d, config.noise, rng);
        }
        scenario.target_ranges.resize(num_nodes);
        for (int i = 0; i < num_nodes; ++i) {
            const double true_r = (positions[i] - target).norm();
            scenario.target_ranges[i] = measure_distance(true_r, config.noise, rng);
        }
        scenario.truth = GroundTruth{std::move(positions), std::move(target)};
        scenario.validate();
        return scenario;
    }
    throw CannotConnect("no connected layout found in " + std::to_string(kMaxAttempts) +
                        " attempts; enlarge comm_range or shrink the region");
}

}  // namespace admmloc
