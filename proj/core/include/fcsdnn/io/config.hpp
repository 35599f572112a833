#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcsdnn/geometry/decomposition.hpp"
#include "fcsdnn/solver/boundary.hpp"
#include "fcsdnn/solver/solver.hpp"

namespace fcsdnn::io {

inline constexpr int kConfigSchemaVersion = 1;

enum class ClassifierKind { Ann, Decay };

struct OutputConfig {
    std::filesystem::path dir = "fcsdnn-out";
    // Snapshot times in (0, T]; T itself is always written.
    std::vector<double> snapshot_times;
    // Also write a snapshot every this many steps (0: off).
    long snapshot_every = 0;
    bool csv = false;
    bool standoff = false;
};

// Everything a run needs. JSON keys mirror the field names; every field has a
// default, so `{"schema_version": 1, "scenario": "sod-channel"}` is a valid
// file.
struct RunConfig {
    std::string scenario = "channel-cylinder-flow";
    double mach = 3.0;
    double final_time = 0.0; // 0: scenario default
    double shock_x = 0.5;    // shock-cylinder only

    geometry::DecompositionParams geometry{};
    // Optional box override for the cylinder scenarios: {lo_x, lo_y, hi_x, hi_y}.
    std::optional<std::array<double, 4>> box;
    std::optional<std::array<double, 3>> cylinder; // {x_c, y_c, R_c}

    solver::SolverParams solver{};
    ClassifierKind classifier = ClassifierKind::Ann;
    std::filesystem::path model_path; // empty: installed default
    // Replaces the scenario's boundary conditions when present.
    std::optional<solver::BoundarySpec> boundary;
    long max_steps = 0; // 0: unlimited

    OutputConfig output{};
};

// Throws ConfigError naming the offending key. Unknown keys are errors.
RunConfig parse_config(const nlohmann::json& j);
// Files may hold // and /* */ comments.
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

// CFL > 0, T >= 0, filter and smearing parameters in range, known scenario.
void validate_config(const RunConfig& c);

// 16 hex digits identifying the canonical JSON form.
std::string config_hash(const RunConfig& c);

const char* to_string(ClassifierKind k);

} // namespace fcsdnn::io
