#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bnptrack/config.hpp"
#include "bnptrack/csv.hpp"

namespace bnpt {

// Everything produced by one Monte-Carlo replication.
struct RunResult {
    GroundTruth truth;
    SimulatedMeasurements measurements;
    TrackSet tracks;
    ScoreSeries score;     // tracker
    ScoreSeries baseline;  // raw measurements reported as tracks
};

// Replication r: truth and measurements from stream r of the scenario seed,
// the chain from stream r of the chain seed.
RunResult run_replication(const ExperimentConfig& cfg, int r);

// Score of the no-inference baseline.
ScoreSeries baseline_score(const GroundTruth& truth, const SimulatedMeasurements& sim, const OSPAConfig& cfg);

struct ExperimentOptions {
    bool write_outputs = true;
    bool resume = true;  // reuse per-run checkpoints whose config hash matches
    std::function<void(int run, bool resumed)> on_run_done;
};

struct ExperimentSummary {
    std::string config_hash;
    std::vector<ScoreSeries> runs;  // per run, as written to the checkpoints
    std::vector<ScoreSeries> baseline_runs;
    ScoreSeries aggregate;
    ScoreSeries baseline_aggregate;
    double mean_ospa = 0.0;  // over steps of the aggregate
    double baseline_mean_ospa = 0.0;
    int resumed_runs = 0;
    double wall_seconds = 0.0;
};

// Output layout under cfg.output_dir:
//   config.json, manifest.json
//   truth.csv, measurements.csv, tracks.csv   (run 0)
//   ospa.csv, baseline_ospa.csv               (Monte-Carlo aggregates)
//   trajectories.svg, cardinality.svg, ospa.svg
//   runs/run_NNNN/{run.json, score.csv, baseline.csv, tracks.csv}
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opt = {});

// SVG renderings of CSV outputs, chosen by the schema row:
// truth + tracks -> x/y against step; ospa -> OSPA components and cardinality.
void plot_trajectories(const CsvTable& truth, const CsvTable* tracks, const std::string& path);
void plot_ospa(const CsvTable& ospa, const std::string& path);
void plot_cardinality(const CsvTable& ospa, const std::string& path);

std::string version_string();

}  // namespace bnpt
