#include "fcsdnn/solver/riemann.hpp"

#include <algorithm>
#include <cmath>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::solver {

ExactRiemann::ExactRiemann(const Primitive& left, const Primitive& right, double gamma)
    : L_(left), R_(right), g_(gamma) {
    if (!(L_.rho > 0 && L_.p > 0 && R_.rho > 0 && R_.p > 0)) throw ConfigError("Riemann states must be positive");
    aL_ = std::sqrt(g_ * L_.p / L_.rho);
    aR_ = std::sqrt(g_ * R_.p / R_.rho);
    if (2.0 * (aL_ + aR_) / (g_ - 1.0) <= R_.u - L_.u) throw ConfigError("Riemann data generate vacuum");
    // Two-rarefaction guess, then Newton.
    const double z = (g_ - 1.0) / (2.0 * g_);
    double p = std::pow((aL_ + aR_ - 0.5 * (g_ - 1.0) * (R_.u - L_.u)) /
                            (aL_ / std::pow(L_.p, z) + aR_ / std::pow(R_.p, z)),
                        1.0 / z);
    p = std::max(p, 1e-12);
    for (int it = 0; it < 100; ++it) {
        double dL, dR;
        const double F = f(p, L_, aL_, dL) + f(p, R_, aR_, dR) + R_.u - L_.u;
        const double next = std::max(p - F / (dL + dR), 1e-14);
        const bool done = std::abs(next - p) <= 1e-15 * (next + p);
        p = next;
        if (done) break;
    }
    p_star_ = p;
    double dL, dR;
    u_star_ = 0.5 * (L_.u + R_.u) + 0.5 * (f(p, R_, aR_, dR) - f(p, L_, aL_, dL));
}

double ExactRiemann::f(double p, const Primitive& k, double a, double& df) const {
    if (p > k.p) {
        const double A = 2.0 / ((g_ + 1.0) * k.rho), B = (g_ - 1.0) / (g_ + 1.0) * k.p;
        const double s = std::sqrt(A / (p + B));
        df = s * (1.0 - 0.5 * (p - k.p) / (p + B));
        return (p - k.p) * s;
    }
    const double e = (g_ - 1.0) / (2.0 * g_);
    df = std::pow(p / k.p, -(g_ + 1.0) / (2.0 * g_)) / (k.rho * a);
    return 2.0 * a / (g_ - 1.0) * (std::pow(p / k.p, e) - 1.0);
}

double ExactRiemann::rho_star_left() const {
    const double r = p_star_ / L_.p, q = (g_ - 1.0) / (g_ + 1.0);
    return p_star_ > L_.p ? L_.rho * (r + q) / (q * r + 1.0) : L_.rho * std::pow(r, 1.0 / g_);
}

double ExactRiemann::rho_star_right() const {
    const double r = p_star_ / R_.p, q = (g_ - 1.0) / (g_ + 1.0);
    return p_star_ > R_.p ? R_.rho * (r + q) / (q * r + 1.0) : R_.rho * std::pow(r, 1.0 / g_);
}

Primitive ExactRiemann::sample(double xi) const {
    const double gp = g_ + 1.0, gm = g_ - 1.0;
    if (xi <= u_star_) {
        const auto& K = L_;
        const double a = aL_;
        if (p_star_ > K.p) {
            const double S = K.u - a * std::sqrt(gp / (2 * g_) * p_star_ / K.p + gm / (2 * g_));
            if (xi <= S) return K;
            return {rho_star_left(), u_star_, K.v, p_star_};
        }
        const double head = K.u - a;
        const double a_star = a * std::pow(p_star_ / K.p, gm / (2 * g_));
        const double tail = u_star_ - a_star;
        if (xi <= head) return K;
        if (xi >= tail) return {rho_star_left(), u_star_, K.v, p_star_};
        const double c = 2.0 / gp + gm / (gp * a) * (K.u - xi);
        return {K.rho * std::pow(c, 2.0 / gm), 2.0 / gp * (a + 0.5 * gm * K.u + xi), K.v,
                K.p * std::pow(c, 2 * g_ / gm)};
    }
    const auto& K = R_;
    const double a = aR_;
    if (p_star_ > K.p) {
        const double S = K.u + a * std::sqrt(gp / (2 * g_) * p_star_ / K.p + gm / (2 * g_));
        if (xi >= S) return K;
        return {rho_star_right(), u_star_, K.v, p_star_};
    }
    const double head = K.u + a;
    const double a_star = a * std::pow(p_star_ / K.p, gm / (2 * g_));
    const double tail = u_star_ + a_star;
    if (xi >= head) return K;
    if (xi <= tail) return {rho_star_right(), u_star_, K.v, p_star_};
    const double c = 2.0 / gp - gm / (gp * a) * (K.u - xi);
    return {K.rho * std::pow(c, 2.0 / gm), 2.0 / gp * (-a + 0.5 * gm * K.u + xi), K.v,
            K.p * std::pow(c, 2 * g_ / gm)};
}

} // namespace fcsdnn::solver
