// admmloc: scenario/metric serialization and the multi-trial experiment driver.
#include "admmloc/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "admmloc/errors.hpp"

namespace admmloc {

namespace {

/** 17 significant digits: enough to reproduce any double exactly. */
std::string format_double(double v) {
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

std::string format_vector(const Eigen::VectorXd& v) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_double(v(i));
    }
    out += "]";
    return out;
}

Eigen::VectorXd parse_vector(const nlohmann::json& j, int dim, const char* field) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw ParseError(std::string(field) + " must be an array of " +
                         std::to_string(dim) + " numbers");
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
        if (!j[i].is_number())
            throw ParseError(std::string(field) + " must contain numbers only");
        v(i) = j[i].get<double>();
    }
    return v;
}

std::string csv_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::string trial_file_name(int trial, const char* algo) {
    std::array<char, 64> buf;
    std::snprintf(buf.data(), buf.size(), "trial_%03d_%s.csv", trial, algo);
    return std::string(buf.data());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw ParseError("failed writing " + path.string());
}

/** Population mean/std of the values behind per-trial optionals, if complete. */
struct OptionalStats {
    std::optional<double> mean, std_dev;
};
OptionalStats stats(const std::vector<std::optional<double>>& values) {
    OptionalStats out;
    if (values.empty()) return out;
    for (const auto& v : values)
        if (!v) return out;
    double mean = 0.0;
    for (const auto& v : values) mean += *v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (const auto& v : values) var += (*v - mean) * (*v - mean);
    var /= static_cast<double>(values.size());
    out.mean = mean;
    out.std_dev = std::sqrt(var);
    return out;
}

std::string summary_block(const AlgorithmSummary& s, bool with_stages) {
    std::string out = "{\n";
    out += "    \"trials\": " + std::to_string(s.trials) + ",\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string("null");
    };
    out += "    \"mean_final_rmse_sensor\": " + opt(s.mean_final_rmse_sensor) + ",\n";
    out += "    \"std_final_rmse_sensor\": " + opt(s.std_final_rmse_sensor) + ",\n";
    out += "    \"mean_final_rmse_target\": " + opt(s.mean_final_rmse_target) + ",\n";
    out += "    \"std_final_rmse_target\": " + opt(s.std_final_rmse_target) + ",\n";
    out += "    \"mean_wall_seconds\": " + format_double(s.mean_wall_seconds);
    if (with_stages) {
        out += ",\n    \"mean_stage1_wall_seconds\": " +
               format_double(s.mean_stage1_wall_seconds);
        out += ",\n    \"mean_stage2_wall_seconds\": " +
               format_double(s.mean_stage2_wall_seconds);
    }
    out += "\n  }";
    return out;
}

}  // namespace

ScenarioInstance scenario_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }

    try {
        ScenarioInstance scenario;
        if (!j.contains("dimension") || !j.at("dimension").is_number_integer())
            throw ParseError("dimension must be an integer");
        scenario.dimension = j.at("dimension").get<int>();
        if (scenario.dimension != 2 && scenario.dimension != 3)
            throw ValidationError("dimension must be 2 or 3");

        if (!j.contains("nodes") || !j.at("nodes").is_array() || j.at("nodes").empty())
            throw ParseError("nodes must be a non-empty array");
        const int num_nodes = static_cast<int>(j.at("nodes").size());
        std::vector<int> anchors;
        std::vector<std::optional<Eigen::VectorXd>> positions(num_nodes);
        std::set<int> seen_ids;
        for (const auto& node : j.at("nodes")) {
            if (!node.contains("id") || !node.at("id").is_number_integer())
                throw ParseError("every node needs an integer id");
            const int id = node.at("id").get<int>();
            if (id < 0 || id >= num_nodes)
                throw ValidationError("node id " + std::to_string(id) +
                                      " outside [0, " + std::to_string(num_nodes) +
                                      ")");
            if (!seen_ids.insert(id).second)
                throw ValidationError("duplicate node id " + std::to_string(id));
            const std::string kind = node.value("kind", std::string());
            if (kind != "anchor" && kind != "agent")
                throw ParseError("node " + std::to_string(id) +
                                 ": kind must be \"anchor\" or \"agent\"");
            if (kind == "anchor") anchors.push_back(id);
            if (node.contains("position"))
                positions[id] = parse_vector(node.at("position"), scenario.dimension,
                                             "node position");
            else if (kind == "anchor")
                throw ValidationError("anchor " + std::to_string(id) +
                                      " needs a position");
        }

        if (!j.contains("edges") || !j.at("edges").is_array())
            throw ParseError("edges must be an array");
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.contains("i") || !e.contains("j") || !e.contains("distance") ||
                !e.at("i").is_number_integer() || !e.at("j").is_number_integer() ||
                !e.at("distance").is_number())
                throw ParseError("every edge needs integer i, j and a distance");
            const int a = e.at("i").get<int>();
            const int b = e.at("j").get<int>();
            edges.emplace_back(a, b);
            const auto key = std::minmax(a, b);
            scenario.edge_distances[{key.first, key.second}] =
                e.at("distance").get<double>();
        }
        scenario.graph = build_graph(num_nodes, anchors, edges);

        for (int id : anchors) scenario.anchor_positions[id] = *positions[id];

        if (!j.contains("target_ranges") || !j.at("target_ranges").is_array())
            throw ParseError("target_ranges must be an array");
        scenario.target_ranges.assign(num_nodes, -1.0);
        for (const auto& tr : j.at("target_ranges")) {
            if (!tr.contains("node") || !tr.contains("r") ||
                !tr.at("node").is_number_integer() || !tr.at("r").is_number())
                throw ParseError("every target range needs an integer node and r");
            const int id = tr.at("node").get<int>();
            if (id < 0 || id >= num_nodes)
                throw ValidationError("target range for unknown node " +
                                      std::to_string(id));
            if (scenario.target_ranges[id] >= 0)
                throw ValidationError("duplicate target range for node " +
                                      std::to_string(id));
            scenario.target_ranges[id] = tr.at("r").get<double>();
        }

        const bool have_all_positions =
            std::all_of(positions.begin(), positions.end(),
                        [](const auto& p) { return p.has_value(); });
        if (j.contains("target_true")) {
            if (!have_all_positions)
                throw ValidationError(
                    "target_true requires a position for every node");
            GroundTruth truth;
            truth.node_positions.reserve(num_nodes);
            for (const auto& p : positions) truth.node_positions.push_back(*p);
            truth.target_position =
                parse_vector(j.at("target_true"), scenario.dimension, "target_true");
            scenario.truth = std::move(truth);
        } else {
            for (int id = 0; id < num_nodes; ++id)
                if (positions[id] && !scenario.graph.is_anchor(id))
                    throw ValidationError(
                        "agent positions are only meaningful together with "
                        "target_true");
        }

        scenario.validate();
        return scenario;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }
}

std::string scenario_to_json(const ScenarioInstance& scenario) {
    scenario.validate();
    std::string out = "{\n";
    out += "  \"dimension\": " + std::to_string(scenario.dimension) + ",\n";

    out += "  \"nodes\": [\n";
    for (int id = 0; id < scenario.graph.num_nodes; ++id) {
        const bool anchor = scenario.graph.is_anchor(id);
        out += "    {\"id\": " + std::to_string(id) + ", \"kind\": \"" +
               (anchor ? "anchor" : "agent") + "\"";
        if (anchor)
            out += ", \"position\": " +
                   format_vector(scenario.anchor_positions.at(id));
        else if (scenario.truth)
            out += ", \"position\": " +
                   format_vector(scenario.truth->node_positions[id]);
        out += id + 1 < scenario.graph.num_nodes ? "},\n" : "}\n";
    }
    out += "  ],\n";

    const auto edges = scenario.graph.edges();
    out += "  \"edges\": [\n";
    for (size_t k = 0; k < edges.size(); ++k) {
        out += "    {\"i\": " + std::to_string(edges[k].first) +
               ", \"j\": " + std::to_string(edges[k].second) + ", \"distance\": " +
               format_double(scenario.distance(edges[k].first, edges[k].second)) +
               (k + 1 < edges.size() ? "},\n" : "}\n");
    }
    out += "  ],\n";

    out += "  \"target_ranges\": [\n";
    for (int id = 0; id < scenario.graph.num_nodes; ++id) {
        out += "    {\"node\": " + std::to_string(id) +
               ", \"r\": " + format_double(scenario.target_ranges[id]) +
               (id + 1 < scenario.graph.num_nodes ? "},\n" : "}\n");
    }
    out += "  ]";

    if (scenario.truth)
        out += ",\n  \"target_true\": " +
               format_vector(scenario.truth->target_position);
    out += "\n}\n";
    return out;
}

ScenarioInstance load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return scenario_from_json(buffer.str());
}

void save_scenario(const std::filesystem::path& path,
                   const ScenarioInstance& scenario) {
    write_text_file(path, scenario_to_json(scenario));
}

std::string metrics_to_csv(const std::vector<MetricsRecord>& trace) {
    std::string out = "iter,rmse_sensor,rmse_target,S,W,P,G,potential,wall_nanos\n";
    for (const MetricsRecord& r : trace) {
        out += std::to_string(r.iter) + ',';
        out += csv_field(r.rmse_sensor) + ',';
        out += csv_field(r.rmse_target) + ',';
        out += format_double(r.S) + ',';
        out += format_double(r.W) + ',';
        out += format_double(r.P) + ',';
        out += format_double(r.G) + ',';
        out += csv_field(r.potential) + ',';
        out += std::to_string(r.wall_nanos) + '\n';
    }
    return out;
}

void save_metrics(const std::filesystem::path& path,
                  const std::vector<MetricsRecord>& trace) {
    write_text_file(path, metrics_to_csv(trace));
}

std::string summary_to_json(const ExperimentSummary& summary) {
    std::string out = "{\n";
    bool first = true;
    if (summary.jcnl) {
        out += "  \"jcnl\": " + summary_block(*summary.jcnl, false);
        first = false;
    }
    if (summary.scnl) {
        if (!first) out += ",\n";
        out += "  \"scnl\": " + summary_block(*summary.scnl, true);
    }
    out += "\n}\n";
    return out;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    if (config.trials < 1) throw ValidationError("trials must be >= 1");
    if (config.output_dir.empty()) throw ValidationError("output_dir is required");
    std::filesystem::create_directories(config.output_dir);

    const bool want_jcnl = config.algorithm != ExperimentConfig::Algorithm::scnl;
    const bool want_scnl = config.algorithm != ExperimentConfig::Algorithm::jcnl;
    const bool both = config.algorithm == ExperimentConfig::Algorithm::both;

    std::optional<ScenarioInstance> fixed_scenario;
    if (const auto* path = std::get_if<std::filesystem::path>(&config.scenario_source))
        fixed_scenario = load_scenario(*path);

    std::vector<std::optional<double>> jcnl_rmse_s, jcnl_rmse_t, scnl_rmse_s,
        scnl_rmse_t;
    double jcnl_wall = 0.0, scnl_wall = 0.0, stage1_wall = 0.0, stage2_wall = 0.0;

    for (int trial = 0; trial < config.trials; ++trial) {
        ScenarioInstance scenario;
        if (fixed_scenario) {
            scenario = *fixed_scenario;
        } else {
            SyntheticConfig synth = std::get<SyntheticConfig>(config.scenario_source);
            synth.seed += static_cast<std::uint64_t>(trial);
            scenario = generate_synthetic(synth);
        }

        if (want_jcnl) {
            SolverParams params = config.solver;
            params.seed += static_cast<std::uint64_t>(trial);
            const SolveResult r = run_jcnl(scenario, params);
            save_metrics(config.output_dir / trial_file_name(trial, "jcnl"), r.trace);
            jcnl_wall += r.wall_seconds;
            jcnl_rmse_s.push_back(r.trace.empty() ? std::nullopt
                                                  : r.trace.back().rmse_sensor);
            jcnl_rmse_t.push_back(r.trace.empty() ? std::nullopt
                                                  : r.trace.back().rmse_target);
        }
        if (want_scnl) {
            ScnlParams params = config.two_stage;
            // A paired comparison must consume the same initialization seed.
            params.seed = (both ? config.solver.seed : params.seed) +
                          static_cast<std::uint64_t>(trial);
            const SolveResult r = run_scnl(scenario, params);
            save_metrics(config.output_dir / trial_file_name(trial, "scnl"), r.trace);
            scnl_wall += r.wall_seconds;
            stage1_wall += r.stage1_wall_seconds;
            stage2_wall += r.stage2_wall_seconds;
            scnl_rmse_s.push_back(r.trace.empty() ? std::nullopt
                                                  : r.trace.back().rmse_sensor);
            scnl_rmse_t.push_back(r.trace.empty() ? std::nullopt
                                                  : r.trace.back().rmse_target);
        }
    }

    ExperimentSummary summary;
    const double trials = static_cast<double>(config.trials);
    if (want_jcnl) {
        AlgorithmSummary s;
        s.trials = config.trials;
        const OptionalStats ss = stats(jcnl_rmse_s), st = stats(jcnl_rmse_t);
        s.mean_final_rmse_sensor = ss.mean;
        s.std_final_rmse_sensor = ss.std_dev;
        s.mean_final_rmse_target = st.mean;
        s.std_final_rmse_target = st.std_dev;
        s.mean_wall_seconds = jcnl_wall / trials;
        summary.jcnl = s;
    }
    if (want_scnl) {
        AlgorithmSummary s;
        s.trials = config.trials;
        const OptionalStats ss = stats(scnl_rmse_s), st = stats(scnl_rmse_t);
        s.mean_final_rmse_sensor = ss.mean;
        s.std_final_rmse_sensor = ss.std_dev;
        s.mean_final_rmse_target = st.mean;
        s.std_final_rmse_target = st.std_dev;
        s.mean_wall_seconds = scnl_wall / trials;
        s.mean_stage1_wall_seconds = stage1_wall / trials;
        s.mean_stage2_wall_seconds = stage2_wall / trials;
        summary.scnl = s;
    }

    write_text_file(config.output_dir / "summary.json", summary_to_json(summary));
    return summary;
}

}  // namespace admmloc
