#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fcsdnn/geometry/validate.hpp"
#include "fcsdnn/io/config.hpp"
#include "fcsdnn/io/diagnostics.hpp"
#include "fcsdnn/io/run.hpp"
#include "fcsdnn/io/scenario.hpp"
#include "fcsdnn/io/snapshot.hpp"
#include "fcsdnn/sdnn/training.hpp"
#include "fcsdnn/solver/ownership.hpp"
#include "fcsdnn/util/binary.hpp"
#include "fcsdnn/util/error.hpp"

using namespace fcsdnn;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kGeometry = 3, kPositivity = 4 };

// Snapshots carry the run config, which is enough to rebuild the decomposition.
io::ScenarioSetup setup_from_snapshot(const io::Snapshot& snap) {
    if (!snap.meta.contains("config")) throw FormatError("snapshot has no run config in its metadata");
    return io::make_scenario(io::parse_config(snap.meta["config"]));
}

int cmd_run(const fs::path& config, const std::optional<fs::path>& out, std::optional<long> max_steps, bool quiet) {
    auto c = io::load_config(config);
    if (out) c.output.dir = *out;
    if (max_steps) c.max_steps = *max_steps;
    io::validate_config(c);
    const auto r = io::run_scenario(c, quiet ? nullptr : &std::cout);
    std::cout << (r.completed ? "completed " : "stopped ") << r.scenario << ": " << r.steps << " steps, t = " << r.t
              << ", " << r.wall_seconds << " s, output in " << r.output_dir.string() << "\n";
    if (!r.standoff.empty())
        std::cout << "standoff d0/(2R) = " << r.standoff.back().ratio << " (Billig " << io::billig_standoff(c.mach)
                  << ")\n";
    return kOk;
}

int cmd_validate(const fs::path& config, bool allow, const std::optional<fs::path>& report, std::size_t samples) {
    const auto c = io::load_config(config);
    const auto setup = io::make_scenario(c);
    const auto v = geometry::validate_decomposition(setup.dec, c.geometry.nf, c.geometry.nv, samples);
    std::cout << setup.dec.summary_text() << "\n" << v.to_text() << "\n";
    if (report) {
        nlohmann::json j = {{"scenario", c.scenario},
                            {"config_hash", io::config_hash(c)},
                            {"decomposition", setup.dec.summary()},
                            {"validation", v.to_json()}};
        util::write_file_atomic(*report, j.dump(2));
    }
    if (v.ok()) {
        std::cout << "geometry OK\n";
        return kOk;
    }
    std::cout << (allow ? "geometry violations (allowed)\n" : "geometry validation FAILED\n");
    return allow ? kOk : kGeometry;
}

int cmd_train(const fs::path& out, std::uint64_t seed, int count, sdnn::TrainParams tp) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto data = sdnn::generate_training_set(seed, count);
    sdnn::TrainReport rep;
    const auto model = sdnn::train_classifier(data, tp, &rep);
    sdnn::save_model(model, out);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("trained on %zu windows in %.1f s: train accuracy %.4f, holdout accuracy %.4f\n", data.size(), s,
                rep.train_accuracy, rep.holdout_accuracy);
    std::printf("holdout confusion [true tau][predicted tau]:\n");
    for (auto& row : rep.confusion) std::printf("  %6d %6d %6d %6d\n", row[0], row[1], row[2], row[3]);
    std::printf("model written to %s\n", out.string().c_str());
    return kOk;
}

int cmd_export(const fs::path& snapshot, const std::optional<fs::path>& out, bool all_points) {
    const auto snap = io::read_snapshot(snapshot);
    const auto setup = setup_from_snapshot(snap);
    const auto mask = solver::ownership_partition(setup.dec);
    const double gamma = snap.meta["config"].value("/solver/gamma"_json_pointer, solver::kGamma);
    if (!out) {
        io::write_csv(std::cout, snap, setup.dec, mask, !all_points, gamma);
        return kOk;
    }
    std::ofstream f(*out);
    if (!f) throw ConfigError("cannot write " + out->string());
    f.precision(17);
    io::write_csv(f, snap, setup.dec, mask, !all_points, gamma);
    if (!f) throw Error("write failed: " + out->string());
    return kOk;
}

int cmd_standoff(const fs::path& snapshot, io::StandoffOptions opts, bool as_json) {
    const auto snap = io::read_snapshot(snapshot);
    const auto setup = setup_from_snapshot(snap);
    if (!setup.cylinder) throw ConfigError("standoff needs a cylinder scenario");
    const auto rho = io::field_from_snapshot(snap, setup.dec, "rho");
    const auto r = io::measure_standoff(rho, setup.dec, *setup.cylinder, opts);
    const double mach = snap.meta["config"].value("mach", 0.0);
    if (as_json) {
        std::cout << nlohmann::json{{"ratio", r.ratio},       {"x_shock", r.x_shock}, {"x_leading_edge", r.x_leading_edge},
                                    {"peak", r.peak},         {"median", r.median},   {"samples", r.samples},
                                    {"t", snap.meta.value("t", 0.0)}, {"billig", io::billig_standoff(mach)}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << r.ratio << "\n";
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-patch FC-SDNN solver for the 2D compressible Euler equations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fcsdnn 0.1.0");

    fs::path run_config;
    std::optional<fs::path> run_out;
    std::optional<long> run_max_steps;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "March a scenario config to its final time");
    run->add_option("config", run_config, "JSON config file")->required();
    run->add_option("-o,--output-dir", run_out, "Override output.dir");
    run->add_option("--max-steps", run_max_steps, "Stop after this many steps");
    run->add_flag("-q,--quiet", quiet, "Only print the summary line");

    fs::path val_config;
    bool allow = false;
    std::optional<fs::path> report;
    std::size_t samples = 100000;
    auto* validate = app.add_subcommand("validate", "Build the decomposition and run the geometry checks");
    validate->add_option("config", val_config, "JSON config file")->required();
    validate->add_flag("--allow-violations", allow, "Report violations but exit 0");
    validate->add_option("--report", report, "Write the summary and validation report as JSON");
    validate->add_option("--samples", samples, "Monte-Carlo cover samples")->check(CLI::PositiveNumber);

    fs::path model_out = "smoothness.fcnn";
    std::uint64_t seed = 1;
    int count = 200000;
    sdnn::TrainParams tp;
    auto* train = app.add_subcommand("train-model", "Regenerate the synthetic dataset and retrain the classifier");
    train->add_option("-o,--out", model_out, "Model file")->capture_default_str();
    train->add_option("--seed", seed, "Dataset and initialisation seed")->capture_default_str();
    train->add_option("--count", count, "Number of windows")->capture_default_str()->check(CLI::PositiveNumber);
    train->add_option("--epochs", tp.epochs)->capture_default_str()->check(CLI::PositiveNumber);
    train->add_option("--batch", tp.batch)->capture_default_str()->check(CLI::PositiveNumber);
    train->add_option("--learning-rate", tp.learning_rate)->capture_default_str();
    train->add_option("--min-accuracy", tp.min_accuracy, "Fail below this holdout accuracy")->capture_default_str();

    fs::path exp_snap;
    std::optional<fs::path> exp_out;
    bool all_points = false;
    auto* exp = app.add_subcommand("export", "Write a snapshot as CSV");
    exp->add_option("snapshot", exp_snap, "Snapshot file")->required()->check(CLI::ExistingFile);
    exp->add_option("-o,--out", exp_out, "CSV file (default stdout)");
    exp->add_flag("--all-points", all_points, "Include points not owned by their subpatch");

    fs::path so_snap;
    io::StandoffOptions so_opts;
    bool so_json = false;
    auto* so = app.add_subcommand("standoff", "Measure the bow-shock standoff ratio d0/(2R) in a snapshot");
    so->add_option("snapshot", so_snap, "Snapshot file")->required()->check(CLI::ExistingFile);
    so->add_option("--spacing", so_opts.spacing, "Sample spacing (default half the finest grid spacing)");
    so->add_option("--noise-factor", so_opts.noise_factor)->capture_default_str();
    so->add_flag("--json", so_json, "Print the full measurement as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    tp.seed = seed;
    try {
        if (*run) return cmd_run(run_config, run_out, run_max_steps, quiet);
        if (*validate) return cmd_validate(val_config, allow, report, samples);
        if (*train) return cmd_train(model_out, seed, count, tp);
        if (*exp) return cmd_export(exp_snap, exp_out, all_points);
        if (*so) return cmd_standoff(so_snap, so_opts, so_json);
    } catch (const PositivityError& e) {
        std::cerr << "positivity abort: " << e.what() << "\n";
        return kPositivity;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return kGeometry;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
