#pragma once

#include <memory>
#include <vector>

#include "fcsdnn/exchange/comm_plan.hpp"
#include "fcsdnn/fc/spectral.hpp"
#include "fcsdnn/geometry/decomposition.hpp"
#include "fcsdnn/solver/boundary.hpp"
#include "fcsdnn/solver/state.hpp"
#include "fcsdnn/util/error.hpp"

namespace fcsdnn::solver {

// Semi-discrete operator L[e] = -div f(e) + div(mu grad e) on every subpatch.
// Physical derivatives use the chain rule d/dx = q1_x d/dq1 + q2_x d/dq2 with
// FC differentiation along each parameter direction.
//
// Subpatches with an adiabatic side differentiate rho, rho u, rho v and theta
// (theta taking its Neumann-matched wall values) and build the derivatives of
// p = rho theta, E and the fluxes from them by the product rule. All other
// subpatches differentiate the flux components directly.
class RhsOperator {
public:
    RhsOperator(const geometry::Decomposition& dec, std::shared_ptr<const BoundaryOperator> bc,
                double gamma = kGamma);
    ~RhsOperator();
    RhsOperator(RhsOperator&&) noexcept;
    RhsOperator& operator=(RhsOperator&&) noexcept;

    // mu may be null (inviscid). Throws PositivityError (step and stage -1)
    // at the first subpatch, in index order, holding rho <= 0 or p <= 0.
    void evaluate(const State& state, const exchange::Field* mu, State& out) const;

    // Single subpatch; returns false on a positivity failure, filling `where`.
    bool evaluate_subpatch(int sp, const State& state, const Grid* mu, State& out, PointLocation* where) const;

    double gamma() const { return gamma_; }

private:
    struct Workspace;
    Workspace& workspace() const;

    const geometry::Decomposition* dec_;
    std::shared_ptr<const BoundaryOperator> bc_;
    double gamma_;
    std::vector<std::shared_ptr<const fc::LineSpectral>> engine_;
    mutable std::vector<std::unique_ptr<Workspace>> ws_;
};

} // namespace fcsdnn::solver
