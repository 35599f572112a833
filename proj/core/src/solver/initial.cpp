#include "fcsdnn/solver/initial.hpp"

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::solver {

Primitive mach_flow_state(double M) { return {1.4, M, 0.0, 1.0}; }

ShockStates mach_shock_states(double M, double gamma) {
    if (!(M > 1.0)) throw ConfigError("shock Mach number must exceed 1");
    const double M2 = M * M;
    const double zeta = (2.0 * gamma * M2 - gamma + 1.0) / (gamma + 1.0);
    ShockStates s;
    s.zeta = zeta;
    s.left = {(gamma + 1.0) * M2 / ((gamma - 1.0) * M2 + 2.0), (zeta - 1.0) / (gamma * M), 0.0, zeta};
    s.right = {1.4, 0.0, 0.0, 1.0};
    return s;
}

InitialCondition uniform_ic(const Primitive& w) {
    return [w](const geometry::Vec2&) { return w; };
}

InitialCondition mach_shock_ic(double M, double x_s, double gamma) {
    const auto s = mach_shock_states(M, gamma);
    return riemann_ic(s.left, s.right, x_s);
}

InitialCondition riemann_ic(const Primitive& left, const Primitive& right, double x0) {
    return [=](const geometry::Vec2& x) { return x.x() < x0 ? left : right; };
}

void fill_state(State& state, const geometry::Decomposition& dec, const InitialCondition& ic, double gamma) {
    for (std::size_t k = 0; k < dec.subpatches.size(); ++k) {
        const auto& sp = dec.subpatches[k];
        for (std::size_t m = 0; m < sp.x.size(); ++m)
            set(state, int(k), m, to_conserved(ic({sp.x.vec()[m], sp.y.vec()[m]}), gamma));
    }
}

} // namespace fcsdnn::solver
