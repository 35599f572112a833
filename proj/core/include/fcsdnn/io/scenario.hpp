#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fcsdnn/geometry/layouts.hpp"
#include "fcsdnn/io/config.hpp"
#include "fcsdnn/solver/boundary.hpp"
#include "fcsdnn/solver/initial.hpp"

namespace fcsdnn::io {

// Registered scenario ids:
//   channel-cylinder-flow       Mach M flow past a cylinder in [0,4.5] x [-1,1]
//   wide-channel-cylinder-flow  same in a wide channel: [0,2] x [-1.75,1.75]
//                               for M < 10, [0,2.5] x [-1.5,1.5] otherwise
//   shock-cylinder              Mach M shock from x_s hitting the cylinder of
//                               the narrow channel
//   sod-channel                 Sod shock tube in [0,1] x [0,0.23], slip walls
std::vector<std::string> scenario_ids();
bool is_known_scenario(const std::string& id);

// h_bar used when the config leaves it at 0.
inline constexpr double kDefaultCylinderHBar = 0.02;

struct ScenarioSetup {
    geometry::Decomposition dec;
    solver::BoundarySpec bc;
    solver::InitialCondition ic;
    double final_time = 0.0;
    std::optional<geometry::CylinderChannel> cylinder;
    // Exact solution for sod-channel, else empty.
    std::function<solver::Primitive(const geometry::Vec2&, double)> exact;
    std::string description;
};

// Builds geometry, boundary conditions and initial data. The config's
// boundary override, when present, replaces the scenario conditions.
ScenarioSetup make_scenario(const RunConfig& c);

// Paper default end times: 2 for the cylinder flows, 0.45 (M = 3) or 0.15
// (M = 10) for the shock-cylinder runs, 0.2 for Sod.
double default_final_time(const std::string& id, double mach);

geometry::CylinderChannel scenario_layout(const RunConfig& c);

} // namespace fcsdnn::io
