#include "fcsdnn/solver/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::solver {

void check_positivity(const State& state, const geometry::Decomposition& dec, long step, int stage, double gamma) {
    for (std::size_t sp = 0; sp < dec.subpatches.size(); ++sp) {
        const auto& g = dec.subpatches[sp];
        const auto K = state[0][sp].size();
        for (std::size_t k = 0; k < K; ++k) {
            const auto w = to_primitive(at(state, int(sp), k), gamma);
            if (w.rho > 0.0 && w.p > 0.0) continue;
            const int i = int(k % std::size_t(g.n)), j = int(k / std::size_t(g.n));
            std::ostringstream os;
            os << "positivity lost at step " << step << " stage " << stage << ": rho = " << w.rho
               << ", p = " << w.p << " at (" << g.x(i, j) << ", " << g.y(i, j) << "), patch " << g.patch
               << " subpatch " << sp << " index (" << i << ", " << j << ")";
            throw PositivityError(os.str(), {g.patch, int(sp), i, j, g.x(i, j), g.y(i, j)}, step, stage);
        }
    }
}

Solver::Solver(const geometry::Decomposition& dec, BoundarySpec bc,
               std::shared_ptr<const sdnn::SmoothnessClassifier> classifier, SolverParams params)
    : dec_(&dec), params_(params), bc_(std::make_shared<BoundaryOperator>(dec, std::move(bc), params.gamma)),
      rhs_(dec, bc_, params.gamma), plan_(exchange::build_comm_plan(dec, dec.params.nf)),
      state_(make_state(dec)), mu_(exchange::make_field(dec)) {
    if (!(params_.cfl > 0.0)) throw ConfigError("CFL must be positive");
    if (params_.viscosity) {
        if (!classifier) throw ConfigError("artificial viscosity needs a smoothness classifier");
        auto vp = params_.visc;
        vp.gamma = params_.gamma;
        visc_.emplace(dec, std::move(classifier), vp);
    }
}

void Solver::enforce(State& s) const {
    bc_->apply(s);
    std::array<exchange::Field*, 4> f{&s[0], &s[1], &s[2], &s[3]};
    exchange::apply_exchange(plan_, f);
}

void Solver::initialize(const InitialCondition& ic) {
    fill_state(state_, *dec_, ic, params_.gamma);
    smeared_ = params_.smear_initial ? localized_initial_filter(state_, *dec_, params_.smear, params_.gamma) : 0;
    enforce(state_);
    check_positivity(state_, *dec_, 0, 0, params_.gamma);
    for (auto& g : mu_) g.fill(0.0);
    t_ = 0.0;
    step_ = 0;
    dts_.clear();
}

void Solver::set_state(State s, double t, long step) {
    state_ = std::move(s);
    enforce(state_);
    check_positivity(state_, *dec_, step, 0, params_.gamma);
    t_ = t;
    step_ = step;
}

StepInfo Solver::step(double t_end) {
    const long n = step_ + 1;
    try {
        if (visc_) visc_->compute(state_, mu_);
    } catch (const PositivityError& e) {
        throw PositivityError(e.what(), e.where(), n, 0);
    }
    if (params_.filter && step_ > 0) {
        subpatch_filter(state_, *dec_, params_.filter_params, params_.gamma);
        enforce(state_);
        check_positivity(state_, *dec_, n, 0, params_.gamma);
    }
    double dt = compute_dt(state_, visc_ ? &mu_ : nullptr, *dec_, params_.cfl, params_.gamma);
    const bool clipped = t_ + dt >= t_end;
    if (clipped) dt = t_end - t_;
    if (!(dt > 0.0)) throw ConfigError("step requested at or beyond the end time");

    const exchange::Field* mu = visc_ ? &mu_ : nullptr;
    auto L = [&](const State& u, State& out) {
        try {
            rhs_.evaluate(u, mu, out);
        } catch (const PositivityError& e) {
            throw PositivityError(e.what(), e.where(), n, -1);
        }
    };
    auto post = [&](State& u, int stage) {
        enforce(u);
        check_positivity(u, *dec_, n, stage, params_.gamma);
    };
    ssprk54_step(state_, dt, L, post, ws_);

    // Land exactly on t_end after a clipped step.
    t_ = clipped ? t_end : t_ + dt;
    step_ = n;
    dts_.push_back(dt);
    double mu_max = 0.0;
    for (auto& g : mu_) mu_max = std::max(mu_max, *std::max_element(g.vec().begin(), g.vec().end()));
    return {step_, t_, dt, mu_max};
}

void Solver::run(double T, const std::function<void(const StepInfo&)>& callback) {
    if (!(T > t_)) return;
    while (t_ < T) {
        const auto info = step(T);
        if (callback) callback(info);
    }
}

} // namespace fcsdnn::solver
