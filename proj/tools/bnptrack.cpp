// bnptrack: run tracking experiments from JSON configs.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bnptrack/config.hpp"
#include "bnptrack/errors.hpp"
#include "bnptrack/experiment.hpp"

namespace {

constexpr int kOk = 0, kConfigError = 1, kRuntimeError = 2;

void print_config_error(const bnpt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
}

int cmd_run(const std::string& path, bool fresh, int threads, bool quiet) {
    bnpt::ExperimentConfig cfg;
    try {
        cfg = bnpt::load_config(path);
        if (const char* dir = std::getenv("BNPTRACK_OUTPUT_DIR"); dir && *dir) cfg.output_dir = dir;
        if (threads >= 0) cfg.threads = threads;
        cfg.validate();
    } catch (const bnpt::ConfigError& e) {
        print_config_error(e);
        return kConfigError;
    }
    bnpt::ExperimentOptions opt;
    opt.resume = !fresh;
    if (!quiet)
        opt.on_run_done = [&](int r, bool resumed) {
            std::cerr << "run " << r + 1 << "/" << cfg.mc_runs << (resumed ? " (checkpoint)" : "") << "\n";
        };
    const auto s = bnpt::run_experiment(cfg, opt);
    std::cout << "tracker " << bnpt::tracker_name(cfg.tracker.prior.kind) << " on " << cfg.scenario.name << ", "
              << cfg.mc_runs << " runs\n"
              << "mean OSPA " << s.mean_ospa << " (baseline " << s.baseline_mean_ospa << ")\n"
              << "outputs in " << cfg.output_dir << " [config " << s.config_hash << ", " << s.wall_seconds << " s]\n";
    return kOk;
}

int cmd_validate(const std::string& path) {
    try {
        const auto cfg = bnpt::load_config(path);
        std::cout << "ok " << bnpt::config_hash(cfg) << "\n";
    } catch (const bnpt::ConfigError& e) {
        print_config_error(e);
        return kConfigError;
    }
    return kOk;
}

int cmd_preset_list(bool show) {
    for (const auto& name : bnpt::scenario_preset_names()) {
        const auto sc = bnpt::scenario_preset(name);
        std::cout << name << "  objects=" << sc.objects.size() << " steps=" << sc.steps << "\n";
        if (show) {
            for (std::size_t i = 0; i < sc.objects.size(); ++i)
                std::cout << "  object " << i << ": steps [" << sc.objects[i].birth << ", " << sc.objects[i].death
                          << ")\n";
        }
    }
    return kOk;
}

// Each CSV gets an SVG beside it; a truth file is overlaid with a tracks file when both are given.
int cmd_plot(const std::vector<std::string>& files) {
    const bnpt::CsvTable* tracks = nullptr;
    std::vector<bnpt::CsvTable> tables;
    tables.reserve(files.size());
    for (const auto& f : files) tables.push_back(bnpt::read_csv_file(f));
    for (const auto& t : tables)
        if (t.schema.rfind("bnptrack.tracks/", 0) == 0) tracks = &t;
    int written = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto& t = tables[i];
        const std::string out = std::filesystem::path(files[i]).replace_extension(".svg").string();
        if (t.schema.rfind("bnptrack.truth/", 0) == 0) {
            bnpt::plot_trajectories(t, tracks, out);
        } else if (t.schema.rfind("bnptrack.ospa/", 0) == 0) {
            bnpt::plot_ospa(t, out);
            bnpt::plot_cardinality(t, std::filesystem::path(files[i]).replace_extension(".cardinality.svg").string());
        } else if (t.schema.rfind("bnptrack.tracks/", 0) == 0) {
            continue;
        } else {
            std::cerr << files[i] << ": no plot for schema '" << t.schema << "'\n";
            return kConfigError;
        }
        std::cout << "wrote " << out << "\n";
        ++written;
    }
    if (written == 0 && tracks) {
        std::cerr << "tracks files are plotted together with a truth file\n";
        return kConfigError;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian nonparametric multi-object tracking experiments"};
    app.set_version_flag("--version", bnpt::version_string());
    app.require_subcommand(1);

    std::string config_path;
    bool fresh = false, quiet = false;
    int threads = -1;
    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_flag("--fresh", fresh, "ignore existing per-run checkpoints");
    run->add_option("--threads", threads, "worker threads (0 = all cores)");
    run->add_flag("-q,--quiet", quiet, "no progress output");

    auto* validate = app.add_subcommand("validate", "check a config file");
    validate->add_option("config", config_path, "JSON config file")->required();

    auto* preset = app.add_subcommand("preset", "scenario presets");
    preset->require_subcommand(1);
    bool show = false;
    auto* list = preset->add_subcommand("list", "list preset scenarios");
    list->add_flag("--schedule", show, "print object schedules");

    std::vector<std::string> csvs;
    auto* plot = app.add_subcommand("plot", "render SVG plots from output CSVs");
    plot->add_option("csv", csvs, "CSV files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }
    try {
        if (*run) return cmd_run(config_path, fresh, threads, quiet);
        if (*validate) return cmd_validate(config_path);
        if (*list) return cmd_preset_list(show);
        if (*plot) return cmd_plot(csvs);
    } catch (const bnpt::ConfigError& e) {
        print_config_error(e);
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kOk;
}
