#pragma once

#include <array>
#include <cmath>

namespace fcsdnn::solver {

inline constexpr double kGamma = 1.4;

struct Primitive {
    double rho = 1.0;
    double u = 0.0;
    double v = 0.0;
    double p = 1.0;
};

// (rho, rho u, rho v, E)
using Conserved = std::array<double, 4>;

inline Conserved to_conserved(const Primitive& w, double gamma = kGamma) {
    return {w.rho, w.rho * w.u, w.rho * w.v, w.p / (gamma - 1.0) + 0.5 * w.rho * (w.u * w.u + w.v * w.v)};
}

// No positivity check; callers that need one test rho and p themselves.
inline Primitive to_primitive(const Conserved& e, double gamma = kGamma) {
    const double u = e[1] / e[0], v = e[2] / e[0];
    return {e[0], u, v, (gamma - 1.0) * (e[3] - 0.5 * e[0] * (u * u + v * v))};
}

inline double sound_speed(const Primitive& w, double gamma = kGamma) { return std::sqrt(gamma * w.p / w.rho); }

inline double temperature(const Primitive& w) { return w.p / w.rho; }

// E from rho, velocity and temperature theta = p / rho.
inline double total_energy_from_theta(double rho, double u, double v, double theta, double gamma = kGamma) {
    return rho * theta / (gamma - 1.0) + 0.5 * rho * (u * u + v * v);
}

// Flux along x (dir 0) or y (dir 1).
inline Conserved convective_flux(const Primitive& w, int dir, double gamma = kGamma) {
    const double E = w.p / (gamma - 1.0) + 0.5 * w.rho * (w.u * w.u + w.v * w.v);
    const double un = dir == 0 ? w.u : w.v;
    return {w.rho * un, w.rho * w.u * un + (dir == 0 ? w.p : 0.0), w.rho * w.v * un + (dir == 1 ? w.p : 0.0),
            un * (E + w.p)};
}

} // namespace fcsdnn::solver
