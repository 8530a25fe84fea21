#pragma once

#include <cstdint>
#include <string>

#include "bnptrack/gibbs.hpp"
#include "bnptrack/metrics.hpp"
#include "bnptrack/simulator.hpp"

namespace bnpt {

struct ExperimentConfig {
    ScenarioConfig scenario;
    TrackerConfig tracker;
    ChainConfig chain;
    OSPAConfig metrics;
    int mc_runs = 1;
    int threads = 0;  // 0 = hardware concurrency
    std::string output_dir = "out";

    void validate() const;  // throws ConfigError naming the offending field
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// "ddp-emm" / "dpy-stp"
std::string tracker_name(PriorKind kind);
PriorKind tracker_kind(const std::string& name);

// Prior settings suited to a scenario: NIW scale matched to the measurement
// noise, Gamma hyperprior on alpha, kinematic parameter kernel.
TrackerConfig default_tracker(const ScenarioConfig& scenario, PriorKind kind);

// JSON text. The scenario may be a preset name or an object, optionally with
// a "preset" key whose fields the remaining keys override. Missing tracker
// fields take default_tracker values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace bnpt
