// admmloc command-line interface: scenario generation, solver runs,
// algorithm comparison, and parameter-threshold reports.
#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "admmloc/errors.hpp"
#include "admmloc/experiment.hpp"
#include "admmloc/model.hpp"
#include "admmloc/solver.hpp"
#include "admmloc/two_stage.hpp"

namespace {

struct GenerateOptions {
    int agents = 10;
    int anchors = 2;
    int dimension = 2;
    double lo = 0.0;
    double hi = 1.0;
    double comm_range = 0.5;
    std::string noise_kind = "awgn";
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> target;
    std::string out;
    bool benchmark_like = false;
};

admmloc::NoiseModel::Kind parse_noise_kind(const std::string& name) {
    if (name == "awgn") return admmloc::NoiseModel::Kind::additive_white_gaussian;
    if (name == "range") return admmloc::NoiseModel::Kind::range_dependent;
    throw admmloc::ValidationError("unknown noise kind '" + name +
                                   "' (use awgn or range)");
}

int run_generate(const GenerateOptions& opt, const CLI::App& cmd) {
    GenerateOptions o = opt;
    if (o.benchmark_like) {
        // Canonical large instance: 500 sensors and 10 anchors in the unit
        // square centered at the origin, target at the origin.
        if (cmd.count("--agents") == 0) o.agents = 500;
        if (cmd.count("--anchors") == 0) o.anchors = 10;
        if (cmd.count("--dim") == 0) o.dimension = 2;
        if (cmd.count("--lo") == 0) o.lo = -0.5;
        if (cmd.count("--hi") == 0) o.hi = 0.5;
        if (cmd.count("--comm-range") == 0) o.comm_range = 0.1;
        if (cmd.count("--target") == 0) o.target = {0.0, 0.0};
    }

    admmloc::SyntheticConfig config;
    config.dimension = o.dimension;
    config.num_agents = o.agents;
    config.num_anchors = o.anchors;
    config.region.lo = Eigen::VectorXd::Constant(o.dimension, o.lo);
    config.region.hi = Eigen::VectorXd::Constant(o.dimension, o.hi);
    config.comm_range = o.comm_range;
    config.noise.kind = parse_noise_kind(o.noise_kind);
    config.noise.sigma_add = o.sigma;
    config.seed = o.seed;
    if (!o.target.empty()) {
        if (static_cast<int>(o.target.size()) != o.dimension)
            throw admmloc::ValidationError("--target needs one value per dimension");
        Eigen::VectorXd t(o.dimension);
        for (int i = 0; i < o.dimension; ++i) t(i) = o.target[i];
        config.target_position = t;
    }

    const admmloc::ScenarioInstance scenario = admmloc::generate_synthetic(config);
    admmloc::save_scenario(o.out, scenario);
    std::cout << "wrote " << o.out << ": " << scenario.graph.num_nodes << " nodes, "
              << scenario.graph.edges().size() << " edges\n";
    return 0;
}

struct SolveOptions {
    std::string scenario;
    std::string algo = "jcnl";
    double c = 0.5;
    double rho = 1.0;
    long iters = 100;
    int stage1_iters = 100;
    int stage2_iters = 100;
    std::uint64_t seed = 0;
    int record_every = 1;
    double init_scale = 1.0;
    int threads = 1;
    std::optional<double> kappa1, kappa2;
    std::string out;
};

void print_result(const admmloc::SolveResult& result, const std::string& algo) {
    std::cout << algo << ": " << result.iterations_run << " iterations, "
              << result.wall_seconds << " s wall";
    if (!result.trace.empty()) {
        const admmloc::MetricsRecord& last = result.trace.back();
        if (last.rmse_sensor) std::cout << ", rmse_sensor " << *last.rmse_sensor;
        if (last.rmse_target) std::cout << ", rmse_target " << *last.rmse_target;
    }
    std::cout << "\n";
}

int run_solve(const SolveOptions& opt) {
    const admmloc::ScenarioInstance scenario = admmloc::load_scenario(opt.scenario);
    admmloc::MetricHooks hooks;
    hooks.kappa1 = opt.kappa1;
    hooks.kappa2 = opt.kappa2;

    admmloc::SolveResult result;
    if (opt.algo == "jcnl") {
        admmloc::SolverParams params;
        params.c = opt.c;
        params.rho = opt.rho;
        params.max_iters = opt.iters;
        params.seed = opt.seed;
        params.record_every = opt.record_every;
        params.init_scale = opt.init_scale;
        params.threads = opt.threads;
        result = admmloc::run_jcnl(scenario, params, hooks);
    } else if (opt.algo == "scnl") {
        admmloc::ScnlParams params;
        params.c = opt.c;
        params.rho = opt.rho;
        params.stage1_iters = opt.stage1_iters;
        params.stage2_iters = opt.stage2_iters;
        params.seed = opt.seed;
        params.record_every = opt.record_every;
        params.init_scale = opt.init_scale;
        params.threads = opt.threads;
        result = admmloc::run_scnl(scenario, params, hooks);
    } else {
        throw admmloc::ValidationError("unknown algorithm '" + opt.algo +
                                       "' (use jcnl or scnl)");
    }

    if (!opt.out.empty()) admmloc::save_metrics(opt.out, result.trace);
    print_result(result, opt.algo);
    return 0;
}

struct CompareOptions {
    std::string scenario;
    int trials = 1;
    double c = 0.5;
    double rho = 1.0;
    long iters = 100;
    int stage1_iters = 50;
    int stage2_iters = 50;
    std::uint64_t seed = 0;
    int record_every = 1;
    double init_scale = 1.0;
    int threads = 1;
    std::string out_dir;
};

int run_compare(const CompareOptions& opt) {
    admmloc::ExperimentConfig config;
    config.scenario_source = std::filesystem::path(opt.scenario);
    config.algorithm = admmloc::ExperimentConfig::Algorithm::both;
    config.solver.c = opt.c;
    config.solver.rho = opt.rho;
    config.solver.max_iters = opt.iters;
    config.solver.seed = opt.seed;
    config.solver.record_every = opt.record_every;
    config.solver.init_scale = opt.init_scale;
    config.solver.threads = opt.threads;
    config.two_stage.c = opt.c;
    config.two_stage.rho = opt.rho;
    config.two_stage.stage1_iters = opt.stage1_iters;
    config.two_stage.stage2_iters = opt.stage2_iters;
    config.two_stage.seed = opt.seed;
    config.two_stage.record_every = opt.record_every;
    config.two_stage.init_scale = opt.init_scale;
    config.two_stage.threads = opt.threads;
    config.trials = opt.trials;
    config.output_dir = opt.out_dir;

    const admmloc::ExperimentSummary summary = admmloc::run_experiment(config);
    std::cout << admmloc::summary_to_json(summary);
    return 0;
}

struct ThresholdOptions {
    std::string scenario;
    double c = 0.5;
    std::optional<double> kappa1, kappa2, rho;
};

int run_thresholds(const ThresholdOptions& opt) {
    const admmloc::ScenarioInstance scenario = admmloc::load_scenario(opt.scenario);
    const admmloc::ThresholdReport rep = admmloc::parameter_thresholds(
        scenario, opt.c, opt.kappa1, opt.kappa2, opt.rho);
    std::cout << "max_degree " << rep.max_degree << "\n"
              << "degree_sum " << rep.degree_sum << "\n"
              << "max_measurement " << rep.max_measurement << "\n"
              << "tau_tilde_min " << rep.tau_tilde_min << "\n"
              << "kappa1_min " << rep.kappa1_min << "\n"
              << "kappa2_min " << rep.kappa2_min << "\n"
              << "rho_min " << rep.rho_min << "\n";
    auto verdict = [](const std::optional<bool>& ok) {
        return !ok ? "unchecked" : (*ok ? "satisfied" : "NOT satisfied");
    };
    std::cout << "kappa1 " << verdict(rep.kappa1_ok) << "\n"
              << "kappa2 " << verdict(rep.kappa2_ok) << "\n"
              << "rho " << verdict(rep.rho_ok) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed range-based localization solver"};
    app.require_subcommand(1);

    GenerateOptions gen;
    CLI::App* generate = app.add_subcommand("generate", "Generate a synthetic scenario");
    generate->add_option("--agents", gen.agents, "Number of agent nodes");
    generate->add_option("--anchors", gen.anchors, "Number of anchor nodes");
    generate->add_option("--dim", gen.dimension, "Spatial dimension (2 or 3)");
    generate->add_option("--lo", gen.lo, "Region lower bound per axis");
    generate->add_option("--hi", gen.hi, "Region upper bound per axis");
    generate->add_option("--comm-range", gen.comm_range, "Communication range");
    generate->add_option("--noise", gen.noise_kind, "Noise kind: awgn or range");
    generate->add_option("--sigma", gen.sigma, "Noise deviation");
    generate->add_option("--seed", gen.seed, "Generator seed");
    generate->add_option("--target", gen.target,
                         "Fixed target coordinates (default: random)");
    generate->add_option("--out", gen.out, "Output scenario file")->required();
    generate->add_flag("--benchmark-like", gen.benchmark_like,
                       "Preset: 500 agents, 10 anchors, unit square centered at "
                       "the origin, target at the origin");

    SolveOptions sol;
    CLI::App* solve = app.add_subcommand("solve", "Run one solver on a scenario");
    solve->add_option("--scenario", sol.scenario, "Scenario file")->required();
    solve->add_option("--algo", sol.algo, "Algorithm: jcnl or scnl");
    solve->add_option("--c", sol.c, "Consensus penalty weight");
    solve->add_option("--rho", sol.rho, "Direction proximal weight");
    solve->add_option("--iters", sol.iters, "Joint-run iterations");
    solve->add_option("--stage1-iters", sol.stage1_iters, "Two-stage: stage-1 iterations");
    solve->add_option("--stage2-iters", sol.stage2_iters, "Two-stage: stage-2 iterations");
    solve->add_option("--seed", sol.seed, "Initialization seed");
    solve->add_option("--record-every", sol.record_every, "Trace recording stride");
    solve->add_option("--init-scale", sol.init_scale, "Uniform init half-width");
    solve->add_option("--threads", sol.threads, "Worker threads");
    solve->add_option("--kappa1", sol.kappa1, "Potential weight (enables the column)");
    solve->add_option("--kappa2", sol.kappa2, "Potential weight (enables the column)");
    solve->add_option("--out", sol.out, "Metrics CSV path");

    CompareOptions cmp;
    CLI::App* compare = app.add_subcommand(
        "compare", "Run both algorithms on the same scenario and seeds");
    compare->add_option("--scenario", cmp.scenario, "Scenario file")->required();
    compare->add_option("--trials", cmp.trials, "Monte-Carlo trials");
    compare->add_option("--c", cmp.c, "Consensus penalty weight");
    compare->add_option("--rho", cmp.rho, "Direction proximal weight");
    compare->add_option("--iters", cmp.iters, "Joint-run iterations");
    compare->add_option("--stage1-iters", cmp.stage1_iters, "Stage-1 iterations");
    compare->add_option("--stage2-iters", cmp.stage2_iters, "Stage-2 iterations");
    compare->add_option("--seed", cmp.seed, "Base seed (trial t adds t)");
    compare->add_option("--record-every", cmp.record_every, "Trace recording stride");
    compare->add_option("--init-scale", cmp.init_scale, "Uniform init half-width");
    compare->add_option("--threads", cmp.threads, "Worker threads");
    compare->add_option("--out-dir", cmp.out_dir, "Output directory")->required();

    ThresholdOptions thr;
    CLI::App* thresholds = app.add_subcommand(
        "thresholds", "Print sufficient parameter levels for a scenario");
    thresholds->add_option("--scenario", thr.scenario, "Scenario file")->required();
    thresholds->add_option("--c", thr.c, "Consensus penalty weight")->required();
    thresholds->add_option("--kappa1", thr.kappa1, "Value to check");
    thresholds->add_option("--kappa2", thr.kappa2, "Value to check");
    thresholds->add_option("--rho", thr.rho, "Value to check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return run_generate(gen, *generate);
        if (solve->parsed()) return run_solve(sol);
        if (compare->parsed()) return run_compare(cmp);
        if (thresholds->parsed()) return run_thresholds(thr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
