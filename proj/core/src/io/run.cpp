#include "fcsdnn/io/run.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "fcsdnn/io/snapshot.hpp"
#include "fcsdnn/solver/solver.hpp"
#include "fcsdnn/util/binary.hpp"
#include "fcsdnn/util/error.hpp"

namespace fcsdnn::io {

std::shared_ptr<const sdnn::SmoothnessClassifier> make_classifier(const RunConfig& c) {
    if (c.classifier == ClassifierKind::Decay) return std::make_shared<sdnn::DecayClassifier>();
    const auto path = c.model_path.empty() ? sdnn::default_model_path() : c.model_path;
    return std::make_shared<sdnn::AnnClassifier>(sdnn::load_model(path));
}

namespace {

std::string snapshot_file(long step) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snapshot_%07ld.fcsnap", step);
    return buf;
}

} // namespace

RunResult run_scenario(const RunConfig& c, std::ostream* log) {
    validate_config(c);
    const auto t_start = std::chrono::steady_clock::now();
    auto setup = make_scenario(c);
    auto classifier = c.solver.viscosity ? make_classifier(c) : nullptr;

    RunResult res;
    res.scenario = c.scenario;
    res.config_hash = config_hash(c);
    res.output_dir = c.output.dir;
    res.final_time = setup.final_time;
    std::filesystem::create_directories(c.output.dir);

    solver::Solver s(setup.dec, setup.bc, classifier, c.solver);
    const auto mask = solver::ownership_partition(setup.dec);

    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["scenario"] = c.scenario;
    manifest["description"] = setup.description;
    manifest["config_hash"] = res.config_hash;
    manifest["config"] = to_json(c);
    manifest["final_time"] = setup.final_time;
    manifest["decomposition"] = setup.dec.summary();
    manifest["ownership"] = {{"rule", "deepest internal distance, lowest subpatch on ties"},
                             {"runs", ownership_runs(mask)}};
    manifest["classifier"] = classifier ? classifier->name() : "none";

    const nlohmann::json snap_meta = {
        {"scenario", c.scenario}, {"config_hash", res.config_hash}, {"config", to_json(c)}};

    auto write_manifest = [&](const std::string& status) {
        manifest["status"] = status;
        manifest["steps"] = res.steps;
        manifest["t"] = res.t;
        auto snaps = nlohmann::json::array();
        for (auto& r : res.snapshots) snaps.push_back({{"file", r.file.string()}, {"t", r.t}, {"step", r.step}});
        manifest["snapshots"] = snaps;
        res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        manifest["timing"] = {{"wall_seconds", res.wall_seconds},
                              {"seconds_per_step", res.steps ? res.wall_seconds / double(res.steps) : 0.0},
                              {"points", setup.dec.total_points()}};
        if (!res.standoff.empty()) {
            auto so = nlohmann::json::array();
            for (auto& r : res.standoff)
                so.push_back({{"x_shock", r.x_shock}, {"ratio", r.ratio}, {"peak", r.peak}, {"median", r.median}});
            manifest["standoff"] = so;
            const std::size_t k = std::min<std::size_t>(3, res.standoff.size());
            double lo = INFINITY, hi = -INFINITY;
            for (std::size_t q = res.standoff.size() - k; q < res.standoff.size(); ++q) {
                lo = std::min(lo, res.standoff[q].ratio);
                hi = std::max(hi, res.standoff[q].ratio);
            }
            manifest["standoff_last"] = {{"ratio", res.standoff.back().ratio}, {"spread_last3", hi - lo},
                                         {"billig", billig_standoff(c.mach)}};
        }
        util::write_file_atomic(c.output.dir / "manifest.json", manifest.dump(2));
    };

    std::ofstream dt_csv(c.output.dir / "dt_history.csv");
    dt_csv << "step,t,dt,mu_max\n";
    dt_csv.precision(17);

    auto take_snapshot = [&] {
        const auto name = snapshot_file(s.steps());
        auto snap = make_snapshot(setup.dec, s.state(), &s.viscosity(), s.time(), s.steps(), snap_meta);
        write_snapshot(c.output.dir / name, snap);
        res.snapshots.push_back({name, s.time(), s.steps()});
        if (c.output.standoff && setup.cylinder) {
            try {
                res.standoff.push_back(measure_standoff(s.state()[0], setup.dec, *setup.cylinder));
                if (log)
                    *log << "  standoff d0/(2R) = " << res.standoff.back().ratio << " (shock at x = "
                         << res.standoff.back().x_shock << ")\n";
            } catch (const Error& e) {
                if (log) *log << "  " << e.what() << "\n";
            }
        }
        if (log) *log << "snapshot " << name << " at t = " << s.time() << "\n";
        return snap;
    };

    if (log) *log << setup.description << "\n";
    Snapshot last;
    try {
        s.initialize(setup.ic);
        if (log && s.smeared_subpatches())
            *log << "initial smearing on " << s.smeared_subpatches() << " subpatches\n";
        auto times = c.output.snapshot_times;
        times.push_back(setup.final_time);
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        times.erase(std::remove_if(times.begin(), times.end(), [&](double t) { return t > setup.final_time; }),
                    times.end());
        std::size_t next = 0;
        bool stopped = false;
        while (next < times.size() && !stopped) {
            const double target = times[next];
            while (s.time() < target) {
                const auto info = s.step(target);
                res.steps = info.step;
                res.t = s.time();
                dt_csv << info.step << "," << info.t << "," << info.dt << "," << info.mu_max << "\n";
                if (log && info.step % 100 == 0)
                    *log << "step " << info.step << " t = " << info.t << " dt = " << info.dt
                         << " max mu = " << info.mu_max << "\n";
                if (c.output.snapshot_every > 0 && info.step % c.output.snapshot_every == 0 && s.time() < target)
                    last = take_snapshot();
                if (c.max_steps > 0 && info.step >= c.max_steps && s.time() < setup.final_time) {
                    stopped = true;
                    break;
                }
            }
            last = take_snapshot();
            ++next;
        }
        res.completed = !stopped;
        res.t = s.time();
        res.steps = s.steps();
    } catch (const PositivityError& e) {
        manifest["error"] = {{"what", e.what()},        {"step", e.step()},      {"stage", e.stage()},
                             {"patch", e.where().patch}, {"subpatch", e.where().subpatch},
                             {"i", e.where().i},         {"j", e.where().j},
                             {"x", e.where().x},         {"y", e.where().y}};
        dt_csv.flush();
        write_manifest("positivity-abort");
        throw;
    }
    dt_csv.flush();
    if (c.output.csv) {
        std::ofstream os(c.output.dir / "final.csv");
        write_csv(os, last, setup.dec, mask, true, c.solver.gamma);
    }
    write_manifest(res.completed ? "completed" : "stopped");
    if (log)
        *log << (res.completed ? "completed" : "stopped at max_steps") << ": " << res.steps << " steps, t = " << res.t
             << ", " << res.wall_seconds << " s\n";
    return res;
}

} // namespace fcsdnn::io
