#include "fcsdnn/io/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fcsdnn/solver/riemann.hpp"
#include "fcsdnn/util/error.hpp"

namespace fcsdnn::io {

using solver::BcKind;
using solver::BoundaryCondition;

namespace {

constexpr const char* kIds[] = {"channel-cylinder-flow", "wide-channel-cylinder-flow", "shock-cylinder",
                                "sod-channel"};

const solver::Primitive kSodLeft{1.0, 0.0, 0.0, 1.0};
const solver::Primitive kSodRight{0.125, 0.0, 0.0, 0.1};

} // namespace

std::vector<std::string> scenario_ids() { return {std::begin(kIds), std::end(kIds)}; }

bool is_known_scenario(const std::string& id) {
    return std::find(std::begin(kIds), std::end(kIds), id) != std::end(kIds);
}

double default_final_time(const std::string& id, double mach) {
    if (id == "shock-cylinder") return mach >= 10.0 ? 0.15 : 0.45;
    if (id == "sod-channel") return 0.2;
    return 2.0;
}

geometry::CylinderChannel scenario_layout(const RunConfig& c) {
    geometry::CylinderChannel l = geometry::channel_cylinder_layout();
    if (c.scenario == "wide-channel-cylinder-flow") {
        l = geometry::wide_channel_cylinder_layout();
        if (c.mach >= 10.0) {
            l.lo = {0.0, -1.5};
            l.hi = {2.5, 1.5};
        }
    }
    if (c.box) {
        l.lo = {(*c.box)[0], (*c.box)[1]};
        l.hi = {(*c.box)[2], (*c.box)[3]};
    }
    if (c.cylinder) {
        l.center = {(*c.cylinder)[0], (*c.cylinder)[1]};
        l.radius = (*c.cylinder)[2];
    }
    return l;
}

ScenarioSetup make_scenario(const RunConfig& c) {
    if (!is_known_scenario(c.scenario)) throw ConfigError("unknown scenario '" + c.scenario + "'");
    ScenarioSetup s;
    s.final_time = c.final_time > 0.0 ? c.final_time : default_final_time(c.scenario, c.mach);
    const double gamma = c.solver.gamma;
    std::ostringstream desc;

    if (c.scenario == "sod-channel") {
        if (c.box || c.cylinder) throw ConfigError("sod-channel takes no box or cylinder override");
        auto p = c.geometry;
        // Five subpatches along the tube (about 460 points), one across.
        const int r = p.h_bar > 0.0 ? 0 : 5, q = p.h_bar > 0.0 ? 0 : 1;
        s.dec = geometry::build_box({0.0, 0.0}, {1.0, 0.23}, p, 1, 1, 0.0, r, q);
        for (int id = 0; id < 4; ++id) s.bc[id] = {BcKind::SlipWall};
        s.ic = solver::riemann_ic(kSodLeft, kSodRight, 0.5);
        auto rs = std::make_shared<solver::ExactRiemann>(kSodLeft, kSodRight, gamma);
        s.exact = [rs](const geometry::Vec2& x, double t) {
            return t > 0.0 ? rs->sample((x.x() - 0.5) / t) : (x.x() < 0.5 ? kSodLeft : kSodRight);
        };
        desc << "Sod shock tube, slip walls, x0 = 0.5";
    } else {
        auto layout = scenario_layout(c);
        auto p = c.geometry;
        if (p.h_bar <= 0.0) p.h_bar = kDefaultCylinderHBar;
        s.dec = geometry::build_cylinder_channel(layout, p);
        s.cylinder = layout;
        const int wall = 4;
        if (c.scenario == "shock-cylinder") {
            const auto st = solver::mach_shock_states(c.mach, gamma);
            if (!(c.shock_x > layout.lo.x() && c.shock_x < layout.center.x() - layout.radius))
                throw ConfigError("shock_x must lie between the inflow and the cylinder");
            s.bc[0] = {BcKind::SupersonicInflow, st.left};
            s.bc[1] = {BcKind::PressureOutflow, {}, 1.0};
            s.bc[2] = {BcKind::SlipWall};
            s.bc[3] = {BcKind::SlipWall};
            s.bc[wall] = {BcKind::AdiabaticWall};
            s.ic = solver::mach_shock_ic(c.mach, c.shock_x, gamma);
            desc << "Mach " << c.mach << " shock from x = " << c.shock_x;
        } else {
            const auto w = solver::mach_flow_state(c.mach);
            const bool wide = c.scenario == "wide-channel-cylinder-flow";
            s.bc[0] = {BcKind::SupersonicInflow, w};
            s.bc[1] = {BcKind::SupersonicOutflow};
            const auto side = wide ? BcKind::ZeroNormalDerivative : BcKind::SlipWall;
            s.bc[2] = {side};
            s.bc[3] = {side};
            s.bc[wall] = {BcKind::AdiabaticWall};
            s.ic = solver::uniform_ic(w);
            desc << "Mach " << c.mach << " flow past a cylinder" << (wide ? " (wide channel)" : "");
        }
        desc << ", box [" << layout.lo.x() << ", " << layout.hi.x() << "] x [" << layout.lo.y() << ", "
             << layout.hi.y() << "], R = " << layout.radius;
    }
    if (c.boundary) s.bc = *c.boundary;
    solver::validate_boundary_spec(s.dec, s.bc);
    desc << "; " << s.dec.subpatches.size() << " subpatches, " << s.dec.total_points() << " points";
    s.description = desc.str();
    return s;
}

} // namespace fcsdnn::io
