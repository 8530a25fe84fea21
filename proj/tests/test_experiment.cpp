#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bnptrack/config.hpp"
#include "bnptrack/errors.hpp"
#include "bnptrack/experiment.hpp"

using namespace bnpt;
namespace fs = std::filesystem;

namespace {

std::string field_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.field;
    }
    return "<accepted>";
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("bnptrack_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// linear5 with a short chain: a few seconds for a handful of runs
ExperimentConfig small_experiment(const fs::path& out, int runs, int threads) {
    ExperimentConfig cfg = parse_config(R"({"scenario": {"preset": "linear5", "steps": 40,
        "objects": [{"birth": 0, "death": 30, "initial": {"x": 0, "y": 0, "vx": 1, "vy": 0.5}},
                    {"birth": 5, "death": 40, "initial": {"x": 20, "y": -10, "vx": -0.5, "vy": 1}}]},
        "tracker": "dpy-stp", "chain": {"n_sweeps": 60, "burn_in": 20, "thin": 2, "seed": 9}})");
    cfg.mc_runs = runs;
    cfg.threads = threads;
    cfg.output_dir = out.string();
    return cfg;
}

const char* const kCsvs[] = {"truth.csv", "measurements.csv", "tracks.csv", "ospa.csv", "baseline_ospa.csv"};

int cli(const std::string& args) {
    const int status = std::system((std::string(BNPTRACK_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("configurations survive a serialize/parse round trip") {
    for (const auto& preset : scenario_preset_names()) {
        for (const char* tracker : {"ddp-emm", "dpy-stp"}) {
            const ExperimentConfig cfg =
                parse_config(std::string(R"({"scenario": ")") + preset + R"(", "tracker": ")" + tracker + R"("})");
            const ExperimentConfig back = parse_config(serialize_config(cfg));
            CHECK(back == cfg);
            CHECK(serialize_config(back) == serialize_config(cfg));
        }
    }
    const ExperimentConfig custom = small_experiment("somewhere", 3, 2);
    CHECK(parse_config(serialize_config(custom)) == custom);
}

TEST_CASE("preset names resolve and object fields override them") {
    const ExperimentConfig a = parse_config(R"({"scenario": "radar10"})");
    CHECK(a.scenario == scenario_preset("radar10"));
    CHECK(a.tracker == default_tracker(a.scenario, PriorKind::ddp));
    const ExperimentConfig b = parse_config(R"({"scenario": {"preset": "radar10", "clutter_rate": 3, "seed": 17}})");
    CHECK(b.scenario.clutter_rate == 3.0);
    CHECK(b.scenario.seed == 17);
    CHECK(b.scenario.objects == a.scenario.objects);
    const ExperimentConfig c = parse_config(R"({"scenario": "cars5", "tracker": {"kind": "ddp-emm", "alpha": 2.5}})");
    CHECK(c.tracker.prior.kind == PriorKind::ddp);
    CHECK(c.tracker.prior.alpha == 2.5);
    CHECK(c.tracker.base.nu == default_tracker(c.scenario, PriorKind::ddp).base.nu);
}

TEST_CASE("default hyperpriors per scenario") {
    const auto radar = default_tracker(scenario_preset("radar10"), PriorKind::dpy);
    CHECK(radar.prior.alpha_prior->a == 1.0);
    CHECK(radar.prior.alpha_prior->b == 0.1);
    CHECK(radar.base.nu == 50.0);
    CHECK(radar.base.mu0[0] == 0.001);
    CHECK(default_tracker(scenario_preset("cars5"), PriorKind::dpy).prior.alpha_prior->b == 0.3);
    CHECK(default_tracker(scenario_preset("linear5"), PriorKind::dpy).prior.alpha_prior->b == 0.2);
    CHECK(default_tracker(scenario_preset("linear5"), PriorKind::ddp).prior.d == 0.0);
    CHECK(tracker_kind(tracker_name(PriorKind::dpy)) == PriorKind::dpy);
    CHECK_THROWS_AS(tracker_kind("hmm"), ParameterError);
}

TEST_CASE("configuration errors name the offending field") {
    CHECK(field_of(R"({"scenario": "linear5", "tracker": {"niw": {"psy": 1}}})") == "tracker.niw.psy");
    CHECK(field_of(R"({"scenario": "linear5", "chain": {"n_sweeps": "many"}})") == "chain.n_sweeps");
    CHECK(field_of(R"({"scenario": "linear5", "mc_runs": 0})") == "mc_runs");
    CHECK(field_of(R"({"scenario": "linear5", "extra": 1})") == "extra");
    CHECK(field_of(R"({"tracker": "dpy-stp"})") == "scenario");
    CHECK(field_of(R"({"scenario": {"preset": "nowhere"}})") == "scenario.preset");
    CHECK(field_of(R"({"scenario": "linear5", "tracker": "dpy"})") == "tracker");
    CHECK(field_of(R"({"scenario": {"preset": "linear5", "objects": [{"birth": 0, "initial": {}}]}})") ==
          "scenario.objects[0].death");
    CHECK(field_of(R"({"scenario": "linear5", "tracker": {"niw": {"psi": [[1, 0], [0]]}}})").rfind("tracker.niw.psi", 0) ==
          0);
    CHECK(field_of(R"({"scenario": "linear5",)") == "");
    CHECK(field_of(R"({"scenario": "linear5"})") == "<accepted>");
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("the config hash ignores threads and output location") {
    ExperimentConfig cfg = parse_config(R"({"scenario": "linear5"})");
    const std::string h = config_hash(cfg);
    CHECK(h.size() == 16);
    CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(config_hash(cfg) == h);
    cfg.threads = 7;
    cfg.output_dir = "elsewhere";
    CHECK(config_hash(cfg) == h);
    cfg.chain.seed += 1;
    CHECK(config_hash(cfg) != h);
    cfg.chain.seed -= 1;
    cfg.scenario.seed += 1;
    CHECK(config_hash(cfg) != h);
}

TEST_CASE("an experiment writes its outputs") {
    const fs::path out = scratch("outputs");
    const ExperimentSummary s = run_experiment(small_experiment(out, 2, 1));
    CHECK(s.runs.size() == 2);
    CHECK(s.baseline_runs.size() == 2);
    CHECK(s.aggregate.runs == 2);
    CHECK(s.aggregate.steps() == 40);
    CHECK(s.resumed_runs == 0);
    for (const char* f : kCsvs) CHECK(fs::file_size(out / f) > 0);
    for (const char* f : {"trajectories.svg", "cardinality.svg", "ospa.svg", "config.json", "manifest.json"})
        CHECK(fs::exists(out / f));
    CHECK(slurp(out / "trajectories.svg").find("<svg") != std::string::npos);
    CHECK(fs::exists(out / "runs" / "run_0001" / "run.json"));
    CHECK(load_config((out / "config.json").string()) == small_experiment(out, 2, 1));
    const CsvTable ospa_csv = read_csv_file((out / "ospa.csv").string());
    CHECK(ospa_csv.schema.rfind("bnptrack.ospa/", 0) == 0);
    CHECK(ospa_csv.rows.size() == 40);
    fs::remove_all(out);
}

TEST_CASE("results are identical across repeats and thread counts") {
    const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    const ExperimentSummary sa = run_experiment(small_experiment(a, 3, 1));
    const ExperimentSummary sb = run_experiment(small_experiment(b, 3, 1));
    const ExperimentSummary sc = run_experiment(small_experiment(c, 3, 3));
    for (const char* f : kCsvs) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(slurp(a / f) == slurp(c / f));
    }
    CHECK(sa.mean_ospa == sb.mean_ospa);
    CHECK(sa.mean_ospa == sc.mean_ospa);
    CHECK(sa.config_hash == sc.config_hash);
    for (const fs::path& p : {a, b, c}) fs::remove_all(p);
}

TEST_CASE("interrupted experiments resume from their checkpoints") {
    const fs::path out = scratch("resume");
    const ExperimentConfig cfg = small_experiment(out, 3, 1);
    run_experiment(cfg);
    const std::string before = slurp(out / "ospa.csv");

    std::atomic<int> resumed{0};
    ExperimentOptions opt;
    opt.on_run_done = [&](int, bool r) { resumed += r; };
    const ExperimentSummary again = run_experiment(cfg, opt);
    CHECK(again.resumed_runs == 3);
    CHECK(resumed == 3);
    CHECK(slurp(out / "ospa.csv") == before);

    // a lost checkpoint is recomputed, the others are reused
    fs::remove(out / "runs" / "run_0001" / "run.json");
    const ExperimentSummary partial = run_experiment(cfg);
    CHECK(partial.resumed_runs == 2);
    CHECK(slurp(out / "ospa.csv") == before);

    // a changed configuration does not reuse stale runs
    ExperimentConfig other = cfg;
    other.chain.seed += 1;
    CHECK(run_experiment(other).resumed_runs == 0);

    ExperimentOptions fresh;
    fresh.resume = false;
    CHECK(run_experiment(cfg, fresh).resumed_runs == 0);
    CHECK(slurp(out / "ospa.csv") == before);
    fs::remove_all(out);
}

TEST_CASE("a run without outputs touches nothing") {
    const fs::path out = scratch("dry");
    ExperimentOptions opt;
    opt.write_outputs = false;
    const ExperimentSummary s = run_experiment(small_experiment(out, 1, 1), opt);
    CHECK(s.runs.size() == 1);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("replications share nothing but the configuration") {
    const ExperimentConfig cfg = small_experiment("unused", 2, 1);
    const RunResult r0 = run_replication(cfg, 0), r1 = run_replication(cfg, 1), again = run_replication(cfg, 1);
    CHECK(r1.score.ospa_total == again.score.ospa_total);
    CHECK(r0.measurements.frames[3].measurements[0].value != r1.measurements.frames[3].measurements[0].value);
    CHECK(r0.truth.steps.size() == 40);
    CHECK(r0.baseline.ospa_total == baseline_score(r0.truth, r0.measurements, cfg.metrics).ospa_total);
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    const std::string good = (dir / "good.json").string(), bad = (dir / "bad.json").string();
    ExperimentConfig cfg = small_experiment(dir / "out", 1, 1);
    std::ofstream(good) << serialize_config(cfg);
    std::ofstream(bad) << R"({"scenario": "linear5", "mc_runs": -1})";

    CHECK(cli("validate " + good) == 0);
    CHECK(cli("validate " + bad) == 1);
    CHECK(cli("validate " + (dir / "missing.json").string()) == 1);
    CHECK(cli("no-such-verb") == 1);
    CHECK(cli("preset list --schedule") == 0);
    CHECK(cli("run -q " + bad) == 1);
    CHECK(cli("run -q " + good) == 0);
    CHECK(fs::exists(dir / "out" / "ospa.csv"));
    CHECK(cli("plot " + (dir / "out" / "truth.csv").string() + " " + (dir / "out" / "tracks.csv").string()) == 0);
    CHECK(fs::exists(dir / "out" / "truth.svg"));
    CHECK(cli("plot " + good) == 1);

    // the environment overrides the output directory
    CHECK(cli("run -q --fresh --threads 1 " + good) == 0);
    const std::string env = "BNPTRACK_OUTPUT_DIR=" + (dir / "env_out").string() + " ";
    CHECK(std::system((env + BNPTRACK_CLI_PATH + " run -q " + good + " >/dev/null 2>&1").c_str()) == 0);
    CHECK(fs::exists(dir / "env_out" / "ospa.csv"));

    // an output directory that cannot be created is a runtime failure
    std::ofstream(dir / "blocker") << "x";
    cfg.output_dir = (dir / "blocker" / "out").string();
    std::ofstream(good, std::ios::trunc) << serialize_config(cfg);
    CHECK(cli("run -q " + good) == 2);
    fs::remove_all(dir);
}
