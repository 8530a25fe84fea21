#include "bnptrack/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bnptrack/errors.hpp"
#include "bnptrack/svg.hpp"

namespace bnpt {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version_string() {
#ifdef BNPTRACK_VERSION
    return std::string("v") + BNPTRACK_VERSION;
#else
    return "v0.0.0-unknown";
#endif
}

ScoreSeries baseline_score(const GroundTruth& truth, const SimulatedMeasurements& sim, const OSPAConfig& cfg) {
    std::vector<std::vector<Point>> est(truth.steps.size());
    for (std::size_t k = 0; k < sim.frames.size() && k < est.size(); ++k)
        for (const auto& z : sim.frames[k].measurements)
            est[k].push_back(measurement_position(z, sim.frames[k].sensor));
    return score_sets(truth_positions(truth), est, cfg);
}

RunResult run_replication(const ExperimentConfig& cfg, int r) {
    RunResult out;
    Rng rng = make_rng(cfg.scenario.seed, static_cast<std::uint64_t>(r));
    out.truth = simulate_truth(cfg.scenario, rng);
    out.measurements = simulate_measurements(out.truth, cfg.scenario, rng);
    const ChainResult chain =
        run_chain(feature_frames(out.measurements.frames), cfg.tracker, cfg.chain, static_cast<std::uint64_t>(r));
    out.tracks = extract_tracks(chain.samples);
    out.score = score_run(out.truth, out.tracks, cfg.metrics);
    out.baseline = baseline_score(out.truth, out.measurements, cfg.metrics);
    return out;
}

namespace {

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + p.string());
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class Writer>
std::string to_csv(Writer&& w) {
    std::ostringstream os;
    w(os);
    return os.str();
}

ScoreSeries parse_score(const std::string& text) {
    std::istringstream is(text);
    return score_from_csv(read_csv(is));
}

fs::path run_dir(const fs::path& root, int r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%04d", r);
    return root / "runs" / buf;
}

// A checkpoint counts only if its run.json names this config hash and every file is present.
bool load_checkpoint(const fs::path& dir, const std::string& hash, ScoreSeries& score, ScoreSeries& base) {
    const fs::path meta = dir / "run.json";
    if (!fs::exists(meta) || !fs::exists(dir / "score.csv") || !fs::exists(dir / "baseline.csv") ||
        !fs::exists(dir / "tracks.csv"))
        return false;
    try {
        const json j = json::parse(read_text(meta));
        if (j.value("config_hash", std::string()) != hash) return false;
        score = parse_score(read_text(dir / "score.csv"));
        base = parse_score(read_text(dir / "baseline.csv"));
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::vector<double> numeric_column(const CsvTable& t, const std::string& name) {
    const int c = t.column(name);
    if (c < 0) throw std::runtime_error("csv lacks column " + name);
    std::vector<double> out;
    for (const auto& r : t.rows) {
        const std::string& cell = r.at(static_cast<std::size_t>(c));
        out.push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell));
    }
    return out;
}

}  // namespace

void plot_trajectories(const CsvTable& truth, const CsvTable* tracks, const std::string& path) {
    PlotPanel px{"x position against step", "step k", "x (m)", {}};
    PlotPanel py{"y position against step", "step k", "y (m)", {}};
    const auto step = numeric_column(truth, "step"), id = numeric_column(truth, "object_id");
    const auto x = numeric_column(truth, "x"), y = numeric_column(truth, "y");
    std::map<int, std::size_t> series;
    for (std::size_t i = 0; i < step.size(); ++i) {
        const int o = static_cast<int>(id[i]);
        auto [it, fresh] = series.try_emplace(o, px.series.size());
        if (fresh) {
            const std::string name = series.size() <= 10 ? "object " + std::to_string(o) : "";
            px.series.push_back({name, {}, {}, palette(static_cast<std::size_t>(o)), false, false});
            py.series.push_back({name, {}, {}, palette(static_cast<std::size_t>(o)), false, false});
        }
        px.series[it->second].x.push_back(step[i]);
        px.series[it->second].y.push_back(x[i]);
        py.series[it->second].x.push_back(step[i]);
        py.series[it->second].y.push_back(y[i]);
    }
    if (tracks) {
        PlotSeries ex{"estimates", numeric_column(*tracks, "step"), numeric_column(*tracks, "x"), "#000000", true, false};
        PlotSeries ey{"estimates", ex.x, numeric_column(*tracks, "y"), "#000000", true, false};
        px.series.push_back(std::move(ex));
        py.series.push_back(std::move(ey));
    }
    write_svg(path, {px, py});
}

void plot_ospa(const CsvTable& ospa, const std::string& path) {
    const auto k = numeric_column(ospa, "step");
    PlotPanel top{"OSPA distance", "step k", "OSPA (m)", {}};
    top.series.push_back({"total", k, numeric_column(ospa, "ospa_total"), palette(0), false, false});
    PlotPanel loc{"OSPA location component", "step k", "OSPA (m)", {}};
    loc.series.push_back({"location", k, numeric_column(ospa, "ospa_loc"), palette(2), false, false});
    PlotPanel card{"OSPA cardinality component", "step k", "OSPA (m)", {}};
    card.series.push_back({"cardinality", k, numeric_column(ospa, "ospa_card"), palette(1), false, false});
    write_svg(path, {top, loc, card});
}

void plot_cardinality(const CsvTable& ospa, const std::string& path) {
    const auto k = numeric_column(ospa, "step");
    PlotPanel p{"Cardinality", "step k", "number of objects", {}};
    p.series.push_back({"true", k, numeric_column(ospa, "card_true"), "#000000", false, false});
    p.series.push_back({"estimated (mean)", k, numeric_column(ospa, "card_est_mean"), palette(1), false, true});
    write_svg(path, {p});
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opt) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentSummary summary;
    summary.config_hash = config_hash(cfg);
    const int R = cfg.mc_runs;
    const fs::path root = cfg.output_dir;
    if (opt.write_outputs) fs::create_directories(root / "runs");

    // Every run goes through the same text form so fresh and resumed runs aggregate identically.
    std::vector<std::string> score_text(R), base_text(R);
    std::vector<char> resumed(R, 0);
    if (opt.write_outputs && opt.resume) {
        for (int r = 0; r < R; ++r) {
            ScoreSeries s, b;
            if (load_checkpoint(run_dir(root, r), summary.config_hash, s, b)) {
                resumed[r] = 1;
                score_text[r] = read_text(run_dir(root, r) / "score.csv");
                base_text[r] = read_text(run_dir(root, r) / "baseline.csv");
            }
        }
    }

    std::vector<std::exception_ptr> errors(R);
    std::atomic<int> next{0};
    std::mutex notify;
    auto worker = [&] {
        for (int r = next++; r < R; r = next++) {
            if (resumed[r]) {
                if (opt.on_run_done) {
                    std::lock_guard lock(notify);
                    opt.on_run_done(r, true);
                }
                continue;
            }
            try {
                const RunResult res = run_replication(cfg, r);
                score_text[r] = to_csv([&](std::ostream& os) { write_score_csv(os, res.score); });
                base_text[r] = to_csv([&](std::ostream& os) { write_score_csv(os, res.baseline); });
                if (opt.write_outputs) {
                    const fs::path dir = run_dir(root, r);
                    fs::create_directories(dir);
                    write_text(dir / "score.csv", score_text[r]);
                    write_text(dir / "baseline.csv", base_text[r]);
                    write_text(dir / "tracks.csv", to_csv([&](std::ostream& os) { write_tracks_csv(os, res.tracks); }));
                    // written last: marks the checkpoint complete
                    write_text(dir / "run.json",
                               json{{"config_hash", summary.config_hash}, {"run", r}}.dump(2) + "\n");
                }
                if (opt.on_run_done) {
                    std::lock_guard lock(notify);
                    opt.on_run_done(r, false);
                }
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, R);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (int r = 0; r < R; ++r) {
        summary.runs.push_back(parse_score(score_text[r]));
        summary.baseline_runs.push_back(parse_score(base_text[r]));
        summary.resumed_runs += resumed[r];
    }
    summary.aggregate = aggregate_mc(summary.runs);
    summary.baseline_aggregate = aggregate_mc(summary.baseline_runs);
    summary.mean_ospa = mean_of(summary.aggregate.ospa_total);
    summary.baseline_mean_ospa = mean_of(summary.baseline_aggregate.ospa_total);

    if (opt.write_outputs) {
        write_text(root / "config.json", serialize_config(cfg));
        // run 0 artifacts; truth and measurements are cheap to regenerate
        Rng rng = make_rng(cfg.scenario.seed, 0);
        const GroundTruth truth = simulate_truth(cfg.scenario, rng);
        const SimulatedMeasurements sim = simulate_measurements(truth, cfg.scenario, rng);
        const std::string truth_csv = to_csv([&](std::ostream& os) { write_truth_csv(os, truth); });
        write_text(root / "truth.csv", truth_csv);
        write_text(root / "measurements.csv", to_csv([&](std::ostream& os) { write_measurements_csv(os, sim); }));
        const std::string tracks_csv = read_text(run_dir(root, 0) / "tracks.csv");
        write_text(root / "tracks.csv", tracks_csv);
        const std::string ospa_csv = to_csv([&](std::ostream& os) { write_score_csv(os, summary.aggregate); });
        write_text(root / "ospa.csv", ospa_csv);
        write_text(root / "baseline_ospa.csv",
                   to_csv([&](std::ostream& os) { write_score_csv(os, summary.baseline_aggregate); }));

        std::istringstream ts(truth_csv), ks(tracks_csv), os(ospa_csv);
        const CsvTable truth_t = read_csv(ts), tracks_t = read_csv(ks), ospa_t = read_csv(os);
        plot_trajectories(truth_t, &tracks_t, (root / "trajectories.svg").string());
        plot_cardinality(ospa_t, (root / "cardinality.svg").string());
        plot_ospa(ospa_t, (root / "ospa.svg").string());
    }

    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.write_outputs) {
        json m;
        m["config_hash"] = summary.config_hash;
        m["version"] = version_string();
        m["tracker"] = tracker_name(cfg.tracker.prior.kind);
        m["scenario"] = cfg.scenario.name;
        m["scenario_seed"] = cfg.scenario.seed;
        m["chain_seed"] = cfg.chain.seed;
        m["mc_runs"] = R;
        m["resumed_runs"] = summary.resumed_runs;
        m["mean_ospa"] = summary.mean_ospa;
        m["baseline_mean_ospa"] = summary.baseline_mean_ospa;
        m["wall_seconds"] = summary.wall_seconds;
        write_text(root / "manifest.json", m.dump(2) + "\n");
    }
    return summary;
}

}  // namespace bnpt
