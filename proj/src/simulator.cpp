#include "bnptrack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bnptrack/errors.hpp"

namespace bnpt {

void ScenarioConfig::validate() const {
    if (steps < 1) throw ConfigError("scenario.steps", "must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("scenario.dt", "must be positive");
    if (!(sigma_w >= 0.0)) throw ConfigError("scenario.sigma_w", "must be non-negative");
    if (!(sigma_u >= 0.0)) throw ConfigError("scenario.sigma_u", "must be non-negative");
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const auto& o = objects[i];
        const std::string f = "scenario.objects[" + std::to_string(i) + "]";
        if (o.birth < 0 || o.birth >= o.death || o.death > steps)
            throw ConfigError(f + ".birth", "schedule must satisfy 0 <= birth < death <= steps");
        if (motion == MotionModel::coordinated_turn && !o.initial.omega)
            throw ConfigError(f + ".omega", "coordinated-turn scenarios need an initial turn rate");
    }
    if (!(window.range_min >= 0.0 && window.range_min < window.range_max))
        throw ConfigError("scenario.window.range", "bounds must satisfy 0 <= min < max");
    if (!(window.bearing_min < window.bearing_max) || window.bearing_min < -M_PI || window.bearing_max > M_PI)
        throw ConfigError("scenario.window.bearing", "bounds must be ordered within [-pi, pi]");
    if (!(window.x_min < window.x_max)) throw ConfigError("scenario.window.x", "bounds must be ordered");
    if (!(window.y_min < window.y_max)) throw ConfigError("scenario.window.y", "bounds must be ordered");
    if (!(noise.sigma_r2 > 0.0)) throw ConfigError("scenario.noise.sigma_r2", "must be positive");
    if (!(noise.sigma_phi2 > 0.0)) throw ConfigError("scenario.noise.sigma_phi2", "must be positive");
    if (!(noise.sigma_pos2 > 0.0)) throw ConfigError("scenario.noise.sigma_pos2", "must be positive");
    if (snr_db && !std::isfinite(*snr_db)) throw ConfigError("scenario.snr_db", "must be finite");
    if (!(clutter_rate >= 0.0)) throw ConfigError("scenario.clutter_rate", "must be non-negative");
    if (!(detection_probability >= 0.0 && detection_probability <= 1.0))
        throw ConfigError("scenario.detection_probability", "must lie in [0, 1]");
    if (!(p_survive >= 0.0 && p_survive <= 1.0)) throw ConfigError("scenario.p_survive", "must lie in [0, 1]");
}

GroundTruth simulate_truth(const ScenarioConfig& cfg, Rng& rng) {
    cfg.validate();
    KernelConfig kc;
    kc.sigma_w = cfg.sigma_w;
    kc.sigma_u = cfg.sigma_u;
    kc.dt = cfg.dt;
    kc.motion = cfg.motion;
    GroundTruth truth;
    truth.steps.resize(cfg.steps);
    std::vector<TargetState> current(cfg.objects.size());
    for (int k = 0; k < cfg.steps; ++k) {
        for (std::size_t i = 0; i < cfg.objects.size(); ++i) {
            const ObjectSpec& o = cfg.objects[i];
            if (k < o.birth || k >= o.death) continue;
            if (k == o.birth) {
                current[i] = o.initial;
                if (cfg.motion == MotionModel::constant_velocity) current[i].omega.reset();
            } else {
                current[i] = propagate_state(current[i], kc, rng);
            }
            truth.steps[k].push_back(TruthEntry{static_cast<int>(i), current[i]});
        }
    }
    return truth;
}

namespace {

Eigen::Vector2d ideal_measurement(const TargetState& s, SensorKind kind) {
    if (kind == SensorKind::position) return {s.x, s.y};
    return range_bearing_of(s.x, s.y);
}

}  // namespace

NoiseConfig effective_noise(const ScenarioConfig& cfg, const GroundTruth& truth) {
    NoiseConfig n = cfg.noise;
    if (!cfg.snr_db) return n;
    double scale = 1.0;
    if (cfg.snr_model == SnrModel::anchored) {
        scale = std::pow(10.0, (cfg.snr_reference_db - *cfg.snr_db) / 10.0);
    } else {
        double power = 0.0;
        std::size_t count = 0;
        for (const auto& step : truth.steps)
            for (const auto& e : step) {
                power += ideal_measurement(e.state, cfg.sensor).squaredNorm() / 2.0;
                ++count;
            }
        if (count == 0) return n;
        power /= static_cast<double>(count);
        const double nominal = cfg.sensor == SensorKind::position ? n.sigma_pos2 : 0.5 * (n.sigma_r2 + n.sigma_phi2);
        scale = power / (nominal * std::pow(10.0, *cfg.snr_db / 10.0));
    }
    n.sigma_r2 *= scale;
    n.sigma_phi2 *= scale;
    n.sigma_pos2 *= scale;
    return n;
}

SimulatedMeasurements simulate_measurements(const GroundTruth& truth, const ScenarioConfig& cfg, Rng& rng) {
    cfg.validate();
    SimulatedMeasurements out;
    out.noise = effective_noise(cfg, truth);
    const NoiseConfig& n = out.noise;
    const SensorWindow& w = cfg.window;
    for (std::size_t k = 0; k < truth.steps.size(); ++k) {
        std::vector<std::pair<int, Measurement>> items;
        for (const auto& e : truth.steps[k]) {
            if (cfg.detection_probability < 1.0 && !(uniform01(rng) < cfg.detection_probability)) continue;
            Measurement z;
            if (cfg.sensor == SensorKind::position) {
                z = Measurement::position(e.state.x + std::sqrt(n.sigma_pos2) * sample_normal(rng),
                                          e.state.y + std::sqrt(n.sigma_pos2) * sample_normal(rng));
            } else {
                Eigen::Vector2d br = range_bearing_of(e.state.x, e.state.y);
                z = Measurement::range_bearing(br[0] + std::sqrt(n.sigma_phi2) * sample_normal(rng),
                                               br[1] + std::sqrt(n.sigma_r2) * sample_normal(rng));
            }
            items.emplace_back(e.object_id, z);
        }
        if (cfg.clutter_rate > 0.0) {
            std::poisson_distribution<int> pois(cfg.clutter_rate);
            const int nc = pois(rng);
            for (int c = 0; c < nc; ++c) {
                Measurement z;
                if (cfg.sensor == SensorKind::position)
                    z = Measurement::position(w.x_min + (w.x_max - w.x_min) * uniform01(rng),
                                              w.y_min + (w.y_max - w.y_min) * uniform01(rng));
                else
                    z = Measurement::range_bearing(w.bearing_min + (w.bearing_max - w.bearing_min) * uniform01(rng),
                                                   w.range_min + (w.range_max - w.range_min) * uniform01(rng));
                items.emplace_back(-1, z);
            }
        }
        // Fisher-Yates on our own uniforms keeps the order reproducible.
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
            std::swap(items[i - 1], items[std::min(j, i - 1)]);
        }
        MeasurementFrame f;
        f.step = k;
        f.sensor = cfg.sensor;
        std::vector<int> src;
        for (auto& [id, z] : items) {
            f.measurements.push_back(z);
            src.push_back(id);
        }
        out.frames.push_back(std::move(f));
        out.sources.push_back(std::move(src));
    }
    return out;
}

std::vector<FeatureFrame> feature_frames(const std::vector<MeasurementFrame>& frames) {
    std::vector<FeatureFrame> out;
    out.reserve(frames.size());
    for (const auto& f : frames) {
        FeatureFrame ff;
        ff.reserve(f.measurements.size());
        for (const auto& z : f.measurements) ff.push_back(measurement_position(z, f.sensor));
        out.push_back(std::move(ff));
    }
    return out;
}

std::vector<std::string> scenario_preset_names() { return {"radar10", "cars5", "linear5"}; }

namespace {

ScenarioConfig radar10() {
    ScenarioConfig c;
    c.name = "radar10";
    c.steps = 100;
    c.motion = MotionModel::coordinated_turn;
    c.sensor = SensorKind::range_bearing;
    c.snr_db = -3.0;
    c.p_survive = 0.95;
    const double w = 2.0 * M_PI / 180.0;
    // Crossing trajectories from the scene edges; states at birth.
    c.objects = {
        {0, 100, {1000 + 3.8676, 1500 - 11.7457, -10, -10, w / 8}},
        {10, 100, {-250 - 5.8857, 1000 + 11.4102, 20, 3, -w / 3}},
        {10, 100, {-1500 - 7.3806, 250 + 6.7993, 11, 10, -w / 2}},
        {10, 60, {-1500, 250, 43, 0, 0.0}},
        {20, 80, {250 - 3.8676, 750 - 11.0747, 11, 5, w / 4}},
        {40, 100, {-250 + 7.3806, 1000 - 6.7993, -12, -12, w / 2}},
        {40, 100, {1000, 1500, 0, -10, w / 4}},
        {40, 80, {250, 750, -50, 0, -w / 4}},
        {60, 100, {1000, 1500, -45, 0, -w / 4}},
        {60, 100, {250, 750, -36, 22, w / 4}},
    };
    return c;
}

ScenarioConfig cars5() {
    ScenarioConfig c;
    c.name = "cars5";
    c.steps = 100;
    c.motion = MotionModel::coordinated_turn;
    c.sensor = SensorKind::range_bearing;
    c.snr_db = -3.0;
    c.p_survive = 0.95;
    // Cars enter at the same point and follow the car ahead along a gentle arc.
    const TargetState entry{-900.0, 700.0, 12.0, 0.0, 0.008};
    c.objects = {
        {0, 100, entry}, {8, 100, entry}, {16, 90, entry}, {24, 85, entry}, {32, 100, entry},
    };
    return c;
}

ScenarioConfig linear5() {
    ScenarioConfig c;
    c.name = "linear5";
    c.steps = 100;
    c.motion = MotionModel::constant_velocity;
    c.sensor = SensorKind::position;
    c.window = SensorWindow{0.0, 2000.0, -M_PI / 2, M_PI / 2, -1000.0, 1000.0, 0.0, 2000.0};
    c.snr_db = -3.0;
    c.p_survive = 0.95;
    c.objects = {
        {0, 70, {-600.0, 200.0, 8.0, 4.0, std::nullopt}},
        {5, 100, {600.0, 300.0, -6.0, 5.0, std::nullopt}},
        {10, 100, {-400.0, 1200.0, 7.0, -3.0, std::nullopt}},
        {20, 45, {200.0, 1500.0, -5.0, -6.0, std::nullopt}},
        {30, 80, {700.0, 1000.0, -4.0, 8.0, std::nullopt}},
    };
    return c;
}

}  // namespace

ScenarioConfig scenario_preset(const std::string& name) {
    if (name == "radar10") return radar10();
    if (name == "cars5") return cars5();
    if (name == "linear5") return linear5();
    throw ConfigError("scenario", "unknown preset '" + name + "'");
}

}  // namespace bnpt
