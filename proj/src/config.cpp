#include "bnptrack/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bnptrack/errors.hpp"

namespace bnpt {

using nlohmann::json;

namespace {

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> known) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError(join(path, it.key()), "unknown field");
    }
}

double as_double(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

template <class Int>
Int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
        if (j.is_number_unsigned()) return static_cast<Int>(j.get<std::uint64_t>());
        if (j.get<std::int64_t>() < 0) throw ConfigError(path, "must be non-negative");
        return static_cast<Int>(j.get<std::int64_t>());
    } else {
        return static_cast<Int>(j.get<std::int64_t>());
    }
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

void read(const json& j, const char* key, double& out, const std::string& path) {
    if (const json* v = find(j, key)) out = as_double(*v, join(path, key));
}
void read(const json& j, const char* key, int& out, const std::string& path) {
    if (const json* v = find(j, key)) out = as_int<int>(*v, join(path, key));
}
void read(const json& j, const char* key, std::uint64_t& out, const std::string& path) {
    if (const json* v = find(j, key)) out = as_int<std::uint64_t>(*v, join(path, key));
}
void read(const json& j, const char* key, bool& out, const std::string& path) {
    if (const json* v = find(j, key)) out = as_bool(*v, join(path, key));
}
void read(const json& j, const char* key, std::string& out, const std::string& path) {
    if (const json* v = find(j, key)) out = as_string(*v, join(path, key));
}

Vector as_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = as_double(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

Matrix as_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected an array of rows");
    const std::size_t rows = j.size();
    Matrix m;
    for (std::size_t r = 0; r < rows; ++r) {
        Vector row = as_vector(j[r], path + "[" + std::to_string(r) + "]");
        if (r == 0) m.resize(static_cast<Eigen::Index>(rows), row.size());
        if (row.size() != m.cols()) throw ConfigError(path, "rows have different lengths");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

json to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json to_json(const Matrix& m) {
    json a = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vector(m.row(r).transpose())));
    return a;
}

const char* motion_name(MotionModel m) {
    return m == MotionModel::coordinated_turn ? "coordinated_turn" : "constant_velocity";
}
MotionModel motion_of(const json& j, const std::string& path) {
    const std::string s = as_string(j, path);
    if (s == "coordinated_turn") return MotionModel::coordinated_turn;
    if (s == "constant_velocity") return MotionModel::constant_velocity;
    throw ConfigError(path, "expected coordinated_turn or constant_velocity");
}

const char* sensor_name(SensorKind s) { return s == SensorKind::range_bearing ? "range_bearing" : "position"; }
SensorKind sensor_of(const json& j, const std::string& path) {
    const std::string s = as_string(j, path);
    if (s == "range_bearing") return SensorKind::range_bearing;
    if (s == "position") return SensorKind::position;
    throw ConfigError(path, "expected range_bearing or position");
}

const char* snr_model_name(SnrModel m) { return m == SnrModel::anchored ? "anchored" : "signal_power"; }
SnrModel snr_model_of(const json& j, const std::string& path) {
    const std::string s = as_string(j, path);
    if (s == "anchored") return SnrModel::anchored;
    if (s == "signal_power") return SnrModel::signal_power;
    throw ConfigError(path, "expected anchored or signal_power");
}

const char* kernel_name(ParamKernel k) { return k == ParamKernel::kinematic ? "kinematic" : "random_walk"; }
ParamKernel kernel_of(const json& j, const std::string& path) {
    const std::string s = as_string(j, path);
    if (s == "kinematic") return ParamKernel::kinematic;
    if (s == "random_walk") return ParamKernel::random_walk;
    throw ConfigError(path, "expected kinematic or random_walk");
}

// ---- scenario ----

json scenario_json(const ScenarioConfig& s) {
    json objects = json::array();
    for (const auto& o : s.objects) {
        json st = {{"x", o.initial.x}, {"y", o.initial.y}, {"vx", o.initial.vx}, {"vy", o.initial.vy}};
        st["omega"] = o.initial.omega ? json(*o.initial.omega) : json(nullptr);
        objects.push_back({{"birth", o.birth}, {"death", o.death}, {"initial", st}});
    }
    json j;
    j["name"] = s.name;
    j["steps"] = s.steps;
    j["objects"] = objects;
    j["motion"] = motion_name(s.motion);
    j["sigma_w"] = s.sigma_w;
    j["sigma_u"] = s.sigma_u;
    j["dt"] = s.dt;
    j["sensor"] = sensor_name(s.sensor);
    j["window"] = {{"range_min", s.window.range_min}, {"range_max", s.window.range_max},
                   {"bearing_min", s.window.bearing_min}, {"bearing_max", s.window.bearing_max},
                   {"x_min", s.window.x_min}, {"x_max", s.window.x_max},
                   {"y_min", s.window.y_min}, {"y_max", s.window.y_max}};
    j["noise"] = {{"sigma_r2", s.noise.sigma_r2}, {"sigma_phi2", s.noise.sigma_phi2}, {"sigma_pos2", s.noise.sigma_pos2}};
    j["snr_db"] = s.snr_db ? json(*s.snr_db) : json(nullptr);
    j["snr_model"] = snr_model_name(s.snr_model);
    j["snr_reference_db"] = s.snr_reference_db;
    j["clutter_rate"] = s.clutter_rate;
    j["detection_probability"] = s.detection_probability;
    j["p_survive"] = s.p_survive;
    j["seed"] = s.seed;
    return j;
}

ScenarioConfig parse_scenario(const json& j, const std::string& path) {
    if (j.is_string()) return scenario_preset(as_string(j, path));
    expect_object(j, path);
    reject_unknown(j, path,
                   {"preset", "name", "steps", "objects", "motion", "sigma_w", "sigma_u", "dt", "sensor", "window",
                    "noise", "snr_db", "snr_model", "snr_reference_db", "clutter_rate", "detection_probability",
                    "p_survive", "seed"});
    ScenarioConfig s;
    if (const json* p = find(j, "preset")) {
        try {
            s = scenario_preset(as_string(*p, join(path, "preset")));
        } catch (const ConfigError& e) {
            throw ConfigError(join(path, "preset"), e.what());
        }
    }
    read(j, "name", s.name, path);
    read(j, "steps", s.steps, path);
    if (const json* v = find(j, "objects")) {
        const std::string op = join(path, "objects");
        if (!v->is_array()) throw ConfigError(op, "expected an array");
        s.objects.clear();
        for (std::size_t i = 0; i < v->size(); ++i) {
            const json& o = (*v)[i];
            const std::string p = op + "[" + std::to_string(i) + "]";
            expect_object(o, p);
            reject_unknown(o, p, {"birth", "death", "initial"});
            ObjectSpec spec;
            for (const char* k : {"birth", "death", "initial"})
                if (!find(o, k)) throw ConfigError(join(p, k), "missing");
            spec.birth = as_int<int>(o["birth"], join(p, "birth"));
            spec.death = as_int<int>(o["death"], join(p, "death"));
            const json& st = o["initial"];
            const std::string sp = join(p, "initial");
            expect_object(st, sp);
            reject_unknown(st, sp, {"x", "y", "vx", "vy", "omega"});
            read(st, "x", spec.initial.x, sp);
            read(st, "y", spec.initial.y, sp);
            read(st, "vx", spec.initial.vx, sp);
            read(st, "vy", spec.initial.vy, sp);
            if (const json* w = find(st, "omega"); w && !w->is_null()) spec.initial.omega = as_double(*w, join(sp, "omega"));
            s.objects.push_back(spec);
        }
    }
    if (const json* v = find(j, "motion")) s.motion = motion_of(*v, join(path, "motion"));
    read(j, "sigma_w", s.sigma_w, path);
    read(j, "sigma_u", s.sigma_u, path);
    read(j, "dt", s.dt, path);
    if (const json* v = find(j, "sensor")) s.sensor = sensor_of(*v, join(path, "sensor"));
    if (const json* w = find(j, "window")) {
        const std::string wp = join(path, "window");
        expect_object(*w, wp);
        reject_unknown(*w, wp, {"range_min", "range_max", "bearing_min", "bearing_max", "x_min", "x_max", "y_min", "y_max"});
        read(*w, "range_min", s.window.range_min, wp);
        read(*w, "range_max", s.window.range_max, wp);
        read(*w, "bearing_min", s.window.bearing_min, wp);
        read(*w, "bearing_max", s.window.bearing_max, wp);
        read(*w, "x_min", s.window.x_min, wp);
        read(*w, "x_max", s.window.x_max, wp);
        read(*w, "y_min", s.window.y_min, wp);
        read(*w, "y_max", s.window.y_max, wp);
    }
    if (const json* n = find(j, "noise")) {
        const std::string np = join(path, "noise");
        expect_object(*n, np);
        reject_unknown(*n, np, {"sigma_r2", "sigma_phi2", "sigma_pos2"});
        read(*n, "sigma_r2", s.noise.sigma_r2, np);
        read(*n, "sigma_phi2", s.noise.sigma_phi2, np);
        read(*n, "sigma_pos2", s.noise.sigma_pos2, np);
    }
    if (const json* v = find(j, "snr_db")) {
        if (v->is_null()) s.snr_db.reset();
        else s.snr_db = as_double(*v, join(path, "snr_db"));
    }
    if (const json* v = find(j, "snr_model")) s.snr_model = snr_model_of(*v, join(path, "snr_model"));
    read(j, "snr_reference_db", s.snr_reference_db, path);
    read(j, "clutter_rate", s.clutter_rate, path);
    read(j, "detection_probability", s.detection_probability, path);
    read(j, "p_survive", s.p_survive, path);
    read(j, "seed", s.seed, path);
    return s;
}

// ---- tracker ----

json tracker_json(const TrackerConfig& t) {
    json j;
    j["kind"] = tracker_name(t.prior.kind);
    j["alpha"] = t.prior.alpha;
    j["d"] = t.prior.d;
    j["alpha_prior"] = t.prior.alpha_prior ? json{{"a", t.prior.alpha_prior->a}, {"b", t.prior.alpha_prior->b}}
                                           : json(nullptr);
    j["niw"] = {{"mu0", to_json(t.base.mu0)}, {"lambda", t.base.lambda}, {"nu", t.base.nu}, {"psi", to_json(t.base.psi)}};
    j["p_survive"] = t.p_survive;
    j["resample_survival"] = t.resample_survival;
    j["kernel"] = {{"type", kernel_name(t.kernel.kernel)},
                   {"motion", motion_name(t.kernel.motion)},
                   {"sigma_w", t.kernel.sigma_w},
                   {"sigma_u", t.kernel.sigma_u},
                   {"dt", t.kernel.dt},
                   {"param_walk_cov", to_json(t.kernel.param_walk_cov)},
                   {"birth_velocity_sd", t.kernel.birth_velocity_sd}};
    return j;
}

TrackerConfig parse_tracker(const json* jp, const ScenarioConfig& scenario, const std::string& path) {
    if (!jp) return default_tracker(scenario, PriorKind::ddp);
    const json& j = *jp;
    if (j.is_string()) {
        try {
            return default_tracker(scenario, tracker_kind(j.get<std::string>()));
        } catch (const ParameterError& e) {
            throw ConfigError(path, e.what());
        }
    }
    expect_object(j, path);
    reject_unknown(j, path, {"kind", "alpha", "d", "alpha_prior", "niw", "p_survive", "resample_survival", "kernel"});
    PriorKind kind = PriorKind::ddp;
    if (const json* k = find(j, "kind")) {
        try {
            kind = tracker_kind(as_string(*k, join(path, "kind")));
        } catch (const ParameterError& e) {
            throw ConfigError(join(path, "kind"), e.what());
        }
    }
    TrackerConfig t = default_tracker(scenario, kind);
    read(j, "alpha", t.prior.alpha, path);
    read(j, "d", t.prior.d, path);
    if (const json* a = find(j, "alpha_prior")) {
        const std::string ap = join(path, "alpha_prior");
        if (a->is_null()) {
            t.prior.alpha_prior.reset();
        } else {
            expect_object(*a, ap);
            reject_unknown(*a, ap, {"a", "b"});
            GammaPrior g = t.prior.alpha_prior.value_or(GammaPrior{});
            read(*a, "a", g.a, ap);
            read(*a, "b", g.b, ap);
            t.prior.alpha_prior = g;
        }
    }
    if (const json* n = find(j, "niw")) {
        const std::string np = join(path, "niw");
        expect_object(*n, np);
        reject_unknown(*n, np, {"mu0", "lambda", "nu", "psi"});
        if (const json* v = find(*n, "mu0")) {
            // a scalar fills every coordinate
            if (v->is_number()) t.base.mu0.setConstant(as_double(*v, join(np, "mu0")));
            else t.base.mu0 = as_vector(*v, join(np, "mu0"));
        }
        read(*n, "lambda", t.base.lambda, np);
        read(*n, "nu", t.base.nu, np);
        if (const json* v = find(*n, "psi")) t.base.psi = as_matrix(*v, join(np, "psi"));
    }
    read(j, "p_survive", t.p_survive, path);
    read(j, "resample_survival", t.resample_survival, path);
    if (const json* k = find(j, "kernel")) {
        const std::string kp = join(path, "kernel");
        expect_object(*k, kp);
        reject_unknown(*k, kp, {"type", "motion", "sigma_w", "sigma_u", "dt", "param_walk_cov", "birth_velocity_sd"});
        if (const json* v = find(*k, "type")) t.kernel.kernel = kernel_of(*v, join(kp, "type"));
        if (const json* v = find(*k, "motion")) t.kernel.motion = motion_of(*v, join(kp, "motion"));
        read(*k, "sigma_w", t.kernel.sigma_w, kp);
        read(*k, "sigma_u", t.kernel.sigma_u, kp);
        read(*k, "dt", t.kernel.dt, kp);
        if (const json* v = find(*k, "param_walk_cov")) t.kernel.param_walk_cov = as_matrix(*v, join(kp, "param_walk_cov"));
        read(*k, "birth_velocity_sd", t.kernel.birth_velocity_sd, kp);
    }
    return t;
}

// Rethrow library validation errors as ConfigError under `field`.
template <class F>
void check(const std::string& field, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(field, e.what());
    }
}

}  // namespace

std::string tracker_name(PriorKind kind) { return kind == PriorKind::ddp ? "ddp-emm" : "dpy-stp"; }

PriorKind tracker_kind(const std::string& name) {
    if (name == "ddp-emm") return PriorKind::ddp;
    if (name == "dpy-stp") return PriorKind::dpy;
    throw ParameterError("unknown tracker '" + name + "' (expected ddp-emm or dpy-stp)");
}

TrackerConfig default_tracker(const ScenarioConfig& scenario, PriorKind kind) {
    TrackerConfig t;
    t.prior.kind = kind;
    t.prior.alpha = 1.0;
    t.prior.d = kind == PriorKind::dpy ? 0.5 : 0.0;
    double mu0 = 0.0, nu = 100.0, b = 0.2, sigma_w = 0.5;
    if (scenario.name == "radar10") mu0 = 0.001, nu = 50.0, b = 0.1, sigma_w = 15.0;
    else if (scenario.name == "cars5") mu0 = 0.01, nu = 100.0, b = 0.3, sigma_w = 15.0;
    else if (scenario.name == "linear5") mu0 = 0.0, nu = 100.0, b = 0.2, sigma_w = 0.5;
    else if (scenario.motion == MotionModel::coordinated_turn) sigma_w = 15.0;
    t.prior.alpha_prior = GammaPrior{1.0, b};

    // Typical Cartesian noise variance per axis; range-bearing is taken at 1 km.
    Rng rng = make_rng(scenario.seed, 0);
    const NoiseConfig noise = effective_noise(scenario, simulate_truth(scenario, rng));
    const double var = scenario.sensor == SensorKind::range_bearing
                           ? 0.5 * (noise.sigma_r2 + 1000.0 * 1000.0 * noise.sigma_phi2)
                           : noise.sigma_pos2;
    t.base.mu0 = Vector::Constant(2, mu0);
    t.base.nu = nu;
    t.base.psi = (nu - 3.0) * var * Matrix::Identity(2, 2);
    t.base.lambda = var / (1000.0 * 1000.0);  // prior mean spread ~1 km
    t.p_survive = scenario.p_survive;
    t.resample_survival = true;
    t.kernel.kernel = ParamKernel::kinematic;
    t.kernel.motion = scenario.motion;
    t.kernel.sigma_w = sigma_w;
    t.kernel.dt = scenario.dt;
    t.kernel.param_walk_cov = Matrix::Zero(2, 2);
    return t;
}

void ExperimentConfig::validate() const {
    scenario.validate();
    check("tracker", [&] { tracker.validate(); });
    if (tracker.base.dim() != 2) throw ConfigError("tracker.niw.mu0", "features are 2-D positions");
    if (tracker.base.psi.rows() != tracker.base.dim() || tracker.base.psi.cols() != tracker.base.dim())
        throw ConfigError("tracker.niw.psi", "dimension does not match mu0");
    check("chain", [&] { chain.validate(); });
    check("metrics", [&] { metrics.validate(); });
    if (mc_runs < 1) throw ConfigError("mc_runs", "must be >= 1");
    if (threads < 0) throw ConfigError("threads", "must be >= 0");
    if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    expect_object(j, "config");
    reject_unknown(j, "", {"scenario", "tracker", "chain", "metrics", "mc_runs", "threads", "output_dir"});
    ExperimentConfig cfg;
    const json* s = find(j, "scenario");
    if (!s) throw ConfigError("scenario", "missing");
    cfg.scenario = parse_scenario(*s, "scenario");
    cfg.scenario.validate();
    cfg.tracker = parse_tracker(find(j, "tracker"), cfg.scenario, "tracker");
    if (const json* c = find(j, "chain")) {
        expect_object(*c, "chain");
        reject_unknown(*c, "chain", {"n_sweeps", "burn_in", "thin", "seed"});
        read(*c, "n_sweeps", cfg.chain.n_sweeps, "chain");
        read(*c, "burn_in", cfg.chain.burn_in, "chain");
        read(*c, "thin", cfg.chain.thin, "chain");
        read(*c, "seed", cfg.chain.seed, "chain");
    }
    if (const json* m = find(j, "metrics")) {
        expect_object(*m, "metrics");
        reject_unknown(*m, "metrics", {"p", "c"});
        read(*m, "p", cfg.metrics.p, "metrics");
        read(*m, "c", cfg.metrics.c, "metrics");
    }
    read(j, "mc_runs", cfg.mc_runs, "");
    read(j, "threads", cfg.threads, "");
    read(j, "output_dir", cfg.output_dir, "");
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["scenario"] = scenario_json(cfg.scenario);
    j["tracker"] = tracker_json(cfg.tracker);
    j["chain"] = {{"n_sweeps", cfg.chain.n_sweeps}, {"burn_in", cfg.chain.burn_in}, {"thin", cfg.chain.thin},
                  {"seed", cfg.chain.seed}};
    j["metrics"] = {{"p", cfg.metrics.p}, {"c", cfg.metrics.c}};
    j["mc_runs"] = cfg.mc_runs;
    j["threads"] = cfg.threads;
    j["output_dir"] = cfg.output_dir;
    return j.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
    // threads and output_dir do not affect results
    ExperimentConfig c = cfg;
    c.threads = 0;
    c.output_dir = "out";
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : serialize_config(c)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

}  // namespace bnpt
