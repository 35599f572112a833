#pragma once

#include <functional>

#include "fcsdnn/geometry/decomposition.hpp"
#include "fcsdnn/solver/state.hpp"

namespace fcsdnn::solver {

using InitialCondition = std::function<Primitive(const geometry::Vec2&)>;

// (rho, u, v, p) = (1.4, M, 0, 1): unit sound speed.
Primitive mach_flow_state(double M);

struct ShockStates {
    Primitive left;  // post-shock, x < x_s
    Primitive right; // quiescent (1.4, 0, 0, 1)
    double zeta;     // pressure ratio
};

// Shock moving right at speed M into (1.4, 0, 0, 1).
ShockStates mach_shock_states(double M, double gamma = kGamma);

InitialCondition uniform_ic(const Primitive& w);
InitialCondition mach_shock_ic(double M, double x_s, double gamma = kGamma);
// left for x < x0, right otherwise.
InitialCondition riemann_ic(const Primitive& left, const Primitive& right, double x0);

void fill_state(State& state, const geometry::Decomposition& dec, const InitialCondition& ic, double gamma = kGamma);

} // namespace fcsdnn::solver
