// admmloc: scenario/metric serialization and the multi-trial experiment driver.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "admmloc/diagnostics.hpp"
#include "admmloc/model.hpp"
#include "admmloc/solver.hpp"
#include "admmloc/two_stage.hpp"

namespace admmloc {

/** A full experiment: scenario source, algorithm choice, trial count, output. */
struct ExperimentConfig {
    enum class Algorithm { jcnl, scnl, both };

    /** Scenario file to load, or a synthetic config generated per trial. */
    std::variant<std::filesystem::path, SyntheticConfig> scenario_source;
    Algorithm algorithm = Algorithm::jcnl;
    SolverParams solver;    ///< joint-run parameters
    ScnlParams two_stage;   ///< two-stage parameters
    int trials = 1;         ///< >= 1; trial t uses seed base_seed + t
    std::filesystem::path output_dir;
};

/** Per-algorithm aggregate over an experiment's trials. */
struct AlgorithmSummary {
    int trials = 0;
    /** Mean/std (population) of the final trace row's RMSE values. */
    std::optional<double> mean_final_rmse_sensor;
    std::optional<double> std_final_rmse_sensor;
    std::optional<double> mean_final_rmse_target;
    std::optional<double> std_final_rmse_target;
    double mean_wall_seconds = 0.0;
    double mean_stage1_wall_seconds = 0.0;  ///< two-stage only
    double mean_stage2_wall_seconds = 0.0;  ///< two-stage only
};

struct ExperimentSummary {
    std::optional<AlgorithmSummary> jcnl;
    std::optional<AlgorithmSummary> scnl;
};

/** Parses a scenario from its JSON text. Throws ParseError/ValidationError. */
ScenarioInstance scenario_from_json(const std::string& text);

/** Serializes a scenario to JSON (stable key order, 17 significant digits). */
std::string scenario_to_json(const ScenarioInstance& scenario);

/** Reads a scenario file. Throws ParseError/ValidationError. */
ScenarioInstance load_scenario(const std::filesystem::path& path);

/** Writes a scenario file (format of scenario_to_json). */
void save_scenario(const std::filesystem::path& path, const ScenarioInstance& scenario);

/**
 * Renders a metric trace as CSV with the fixed header
 * iter,rmse_sensor,rmse_target,S,W,P,G,potential,wall_nanos.
 * Absent optionals are empty fields; an empty trace yields only the header.
 */
std::string metrics_to_csv(const std::vector<MetricsRecord>& trace);

/** Writes metrics_to_csv to a file. */
void save_metrics(const std::filesystem::path& path,
                  const std::vector<MetricsRecord>& trace);

/** Renders the experiment summary as JSON. */
std::string summary_to_json(const ExperimentSummary& summary);

/**
 * Runs the configured trials. Trial t derives its seeds (and, for synthetic
 * sources, its scenario) from base seed + t; with Algorithm::both, the two
 * algorithms consume the identical scenario and initialization seed per
 * trial. Writes one CSV per trial and algorithm (trial_NNN_<algo>.csv) plus
 * summary.json into output_dir, and returns the summary.
 */
ExperimentSummary run_experiment(const ExperimentConfig& config);

}  // namespace admmloc
