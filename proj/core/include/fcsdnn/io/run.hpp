#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "fcsdnn/io/config.hpp"
#include "fcsdnn/io/diagnostics.hpp"
#include "fcsdnn/io/scenario.hpp"
#include "fcsdnn/sdnn/model.hpp"

namespace fcsdnn::io {

// ANN classifier from config.model_path (or the installed model) or the
// spectral-decay fallback. ModelError when the model file is unusable.
std::shared_ptr<const sdnn::SmoothnessClassifier> make_classifier(const RunConfig& c);

struct SnapshotRecord {
    std::filesystem::path file; // relative to the output directory
    double t = 0.0;
    long step = 0;
};

struct RunResult {
    std::string scenario;
    std::string config_hash;
    std::filesystem::path output_dir;
    long steps = 0;
    double t = 0.0;
    double final_time = 0.0;
    bool completed = false; // false when max_steps stopped the run early
    double wall_seconds = 0.0;
    std::vector<SnapshotRecord> snapshots;
    std::vector<StandoffResult> standoff; // one per snapshot when requested
};

// Algorithm driver: builds the scenario, marches to T and writes into
// output.dir
//   snapshot_<step>.fcsnap  at each requested time, every snapshot_every steps and at the end
//   manifest.json           config, hash, snapshot list, ownership runs, timing, status
//   dt_history.csv          step, t, dt, mu_max
//   final.csv               owned points of the last snapshot (output.csv)
// A PositivityError is recorded in the manifest and rethrown.
RunResult run_scenario(const RunConfig& c, std::ostream* log = nullptr);

} // namespace fcsdnn::io
