#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bnptrack/gibbs.hpp"
#include "bnptrack/kinematics.hpp"

namespace bnpt {

// Object present on steps [birth, death); `initial` is its state at `birth`.
struct ObjectSpec {
    int birth = 0;
    int death = 0;
    TargetState initial;
    friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

struct SensorWindow {
    double range_min = 0.0, range_max = 2000.0;
    double bearing_min = -M_PI / 2, bearing_max = M_PI / 2;
    double x_min = -1000.0, x_max = 1000.0;
    double y_min = -1000.0, y_max = 1000.0;
    friend bool operator==(const SensorWindow&, const SensorWindow&) = default;
};

struct NoiseConfig {
    double sigma_r2 = 25.0;
    double sigma_phi2 = (M_PI / 180.0) * (M_PI / 180.0);
    double sigma_pos2 = 25.0;  // per axis, position sensor
    friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

// How snr_db sets the measurement noise.
enum class SnrModel {
    anchored,      // variances scaled by 10^((snr_reference_db - snr_db)/10)
    signal_power,  // variances scaled so 10 log10(mean |h(x)|^2 / mean noise power) = snr_db
};

struct ScenarioConfig {
    std::string name = "custom";
    int steps = 100;
    std::vector<ObjectSpec> objects;
    MotionModel motion = MotionModel::constant_velocity;
    double sigma_w = 0.0;  // truth process noise, m/s^2
    double sigma_u = 0.0;  // truth turn-rate noise, rad/s
    double dt = 1.0;
    SensorKind sensor = SensorKind::position;
    SensorWindow window;
    NoiseConfig noise;
    std::optional<double> snr_db;
    SnrModel snr_model = SnrModel::anchored;
    double snr_reference_db = -3.0;
    double clutter_rate = 0.0;
    double detection_probability = 1.0;
    double p_survive = 0.95;
    std::uint64_t seed = 1;

    void validate() const;  // throws ConfigError naming the field
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct TruthEntry {
    int object_id = 0;
    TargetState state;
};

struct GroundTruth {
    std::vector<std::vector<TruthEntry>> steps;
    std::size_t cardinality(std::size_t k) const { return steps.at(k).size(); }
};

struct MeasurementFrame {
    std::size_t step = 0;
    SensorKind sensor = SensorKind::position;
    std::vector<Measurement> measurements;
};

struct SimulatedMeasurements {
    std::vector<MeasurementFrame> frames;
    std::vector<std::vector<int>> sources;  // generating object id per measurement, -1 for clutter
    NoiseConfig noise;                      // noise actually applied
};

GroundTruth simulate_truth(const ScenarioConfig& cfg, Rng& rng);
SimulatedMeasurements simulate_measurements(const GroundTruth& truth, const ScenarioConfig& cfg, Rng& rng);

// Noise after applying the SNR setting.
NoiseConfig effective_noise(const ScenarioConfig& cfg, const GroundTruth& truth);

// Cartesian positions of each frame, as consumed by the trackers.
std::vector<FeatureFrame> feature_frames(const std::vector<MeasurementFrame>& frames);

std::vector<std::string> scenario_preset_names();
ScenarioConfig scenario_preset(const std::string& name);  // throws ConfigError for unknown names

}  // namespace bnpt
