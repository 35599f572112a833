#pragma once

#include "fcsdnn/solver/gas.hpp"

namespace fcsdnn::solver {

// Exact solution of the 1D Riemann problem for the Euler equations (ideal gas,
// no vacuum), used as a validation reference. Only rho, u, p of the input
// states matter; v is carried as a passive scalar.
class ExactRiemann {
public:
    ExactRiemann(const Primitive& left, const Primitive& right, double gamma = kGamma);

    double p_star() const { return p_star_; }
    double u_star() const { return u_star_; }
    // Density left and right of the contact.
    double rho_star_left() const;
    double rho_star_right() const;

    // Solution at similarity coordinate xi = (x - x0) / t.
    Primitive sample(double xi) const;

private:
    double f(double p, const Primitive& k, double a, double& df) const;

    Primitive L_, R_;
    double g_, aL_, aR_;
    double p_star_ = 0.0, u_star_ = 0.0;
};

} // namespace fcsdnn::solver
