#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "fcsdnn/exchange/comm_plan.hpp"
#include "fcsdnn/geometry/decomposition.hpp"
#include "fcsdnn/sdnn/model.hpp"
#include "fcsdnn/solver/boundary.hpp"
#include "fcsdnn/solver/filter.hpp"
#include "fcsdnn/solver/initial.hpp"
#include "fcsdnn/solver/rhs.hpp"
#include "fcsdnn/solver/state.hpp"
#include "fcsdnn/solver/time_stepping.hpp"
#include "fcsdnn/viscosity/viscosity.hpp"

namespace fcsdnn::solver {

struct SolverParams {
    double cfl = 0.5;
    double gamma = kGamma;
    bool viscosity = true;
    viscosity::ViscosityParams visc{};
    bool filter = true;
    FilterParams filter_params{};
    bool smear_initial = true;
    SmearParams smear{};
};

struct StepInfo {
    long step = 0;  // steps completed
    double t = 0.0; // time after the step
    double dt = 0.0;
    double mu_max = 0.0;
};

// Throws PositivityError with the point location, step and stage when rho or
// p is non-positive somewhere.
void check_positivity(const State& state, const geometry::Decomposition& dec, long step, int stage,
                      double gamma = kGamma);

// Multi-patch FC-SDNN time marching. Each step:
//   viscosity -> filter (skipped on the first step) -> dt -> five SSPRK stages,
//   each followed by boundary conditions and exchange -> time update.
class Solver {
public:
    // classifier may be null when params.viscosity is false.
    Solver(const geometry::Decomposition& dec, BoundarySpec bc,
           std::shared_ptr<const sdnn::SmoothnessClassifier> classifier, SolverParams params = {});

    // Samples ic, smears jumps (when enabled), enforces boundary conditions
    // and exchanges. Resets time and step count.
    void initialize(const InitialCondition& ic);
    // Takes a state as is, followed by boundary conditions and exchange.
    void set_state(State s, double t = 0.0, long step = 0);

    // One step, with dt clipped so that t does not pass t_end.
    StepInfo step(double t_end = std::numeric_limits<double>::infinity());
    // Steps until t >= T. The callback runs after every step.
    void run(double T, const std::function<void(const StepInfo&)>& callback = {});

    const State& state() const { return state_; }
    double time() const { return t_; }
    long steps() const { return step_; }
    // Viscosity used in the last step (zero before the first).
    const exchange::Field& viscosity() const { return mu_; }
    const std::vector<double>& dt_history() const { return dts_; }
    int smeared_subpatches() const { return smeared_; }

    const geometry::Decomposition& decomposition() const { return *dec_; }
    const exchange::CommPlan& plan() const { return plan_; }
    const BoundaryOperator& boundary() const { return *bc_; }
    const RhsOperator& rhs() const { return rhs_; }
    const SolverParams& params() const { return params_; }

    // Boundary conditions followed by exchange.
    void enforce(State& s) const;

private:
    const geometry::Decomposition* dec_;
    SolverParams params_;
    std::shared_ptr<const BoundaryOperator> bc_;
    RhsOperator rhs_;
    exchange::CommPlan plan_;
    std::optional<viscosity::ViscosityOperator> visc_;
    State state_;
    exchange::Field mu_;
    Ssprk54Workspace<State> ws_;
    double t_ = 0.0;
    long step_ = 0;
    int smeared_ = 0;
    std::vector<double> dts_;
};

} // namespace fcsdnn::solver
