#pragma once

#include <optional>

#include "fcsdnn/exchange/comm_plan.hpp"
#include "fcsdnn/geometry/layouts.hpp"
#include "fcsdnn/solver/ownership.hpp"
#include "fcsdnn/solver/state.hpp"

namespace fcsdnn::io {

// Physical gradient of f on every subpatch by FC differentiation along q1 and
// q2 and the chain rule.
void physical_gradient(const exchange::Field& f, const geometry::Decomposition& dec, exchange::Field& fx,
                       exchange::Field& fy);

// Value of f at x by quadratic interpolation (Neville) on the 3x3 stencil of
// the containing subpatch farthest from its internal sides. Empty outside the
// domain.
std::optional<double> interpolate_at(const exchange::Field& f, const geometry::Decomposition& dec,
                                     const geometry::Vec2& x);

// sigma = exp(-beta (|grad rho| - min) / (max - min)), min and max over owned
// points. Points outside the owned range are clamped into [exp(-beta), 1].
// Uniform |grad rho| gives sigma = 1.
exchange::Field schlieren(const exchange::Field& rho, const geometry::Decomposition& dec,
                          const solver::OwnershipMask& mask, double beta = 10.0);

struct StandoffOptions {
    double spacing = 0.0;       // sample spacing along the line; 0: half the finest grid spacing
    double noise_factor = 5.0;  // peak must exceed this multiple of the median |d rho/dx|
    double flat_tolerance = 1e-9; // and max|rho| * flat_tolerance / spacing
};

struct StandoffResult {
    double x_shock = 0.0;
    double x_leading_edge = 0.0;
    double ratio = 0.0;  // d0 / (2 R_c)
    double peak = 0.0;   // max |d rho/dx| on the line
    double median = 0.0;
    int samples = 0;
};

// Bow-shock standoff on the line y = y_c upstream of the obstacle: the shock
// sits at the maximum of |d rho/dx|, refined by a parabola through the three
// samples around it. Throws Error when the peak does not exceed
// noise_factor times the median.
StandoffResult measure_standoff(const exchange::Field& rho, const geometry::Decomposition& dec,
                                const geometry::CylinderChannel& layout, const StandoffOptions& opts = {});

// lambda1 exp(lambda2 / M^2) with the experimental fit constants.
double billig_standoff(double mach, double lambda1 = 0.193, double lambda2 = 4.67);

} // namespace fcsdnn::io
