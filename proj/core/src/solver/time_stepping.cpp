#include "fcsdnn/solver/time_stepping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::solver {

void linear_combination(std::vector<double>& out, std::initializer_list<Term> terms) {
    const std::size_t n = out.size();
    for (auto& t : terms)
        if (t.second->size() != n) throw Error("linear_combination: size mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (auto& t : terms) s += t.first * (*t.second)[k];
        out[k] = s;
    }
}

void linear_combination(State& out, std::initializer_list<StateTerm> terms) {
    const int N = int(out[0].size());
    const std::vector<StateTerm> ts(terms);
#pragma omp parallel for schedule(static)
    for (int sp = 0; sp < N; ++sp) {
        for (std::size_t c = 0; c < 4; ++c) {
            double* o = out[c][std::size_t(sp)].data();
            const std::size_t K = out[c][std::size_t(sp)].size();
            for (std::size_t k = 0; k < K; ++k) {
                double s = 0.0;
                for (auto& t : ts) s += t.coef * (*t.s)[c][std::size_t(sp)].vec()[k];
                o[k] = s;
            }
        }
    }
}

SpeedBounds speed_bounds(const State& state, const exchange::Field* mu, double gamma) {
    const std::size_t N = state[0].size();
    SpeedBounds b;
    b.s_max.assign(N, 0.0);
    b.mu_max.assign(N, 0.0);
    for (std::size_t sp = 0; sp < N; ++sp) {
        const auto K = state[0][sp].size();
        double smax = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const auto w = to_primitive(at(state, int(sp), k), gamma);
            const double s = std::abs(w.u) + std::abs(w.v) + std::sqrt(gamma * w.p / w.rho);
            // NaN propagates: max(NaN, x) below keeps the NaN visible.
            smax = std::isnan(s) || s > smax ? s : smax;
            if (std::isnan(smax)) break;
        }
        b.s_max[sp] = smax;
        if (mu) {
            const auto& m = (*mu)[sp].vec();
            double mm = 0.0;
            for (double x : m) mm = std::isnan(x) || x > mm ? x : mm;
            b.mu_max[sp] = mm;
        }
    }
    return b;
}

double compute_dt(const State& state, const exchange::Field* mu, const geometry::Decomposition& dec, double cfl,
                  double gamma) {
    if (!(cfl > 0.0)) throw ConfigError("CFL must be positive");
    const auto b = speed_bounds(state, mu, gamma);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t sp = 0; sp < dec.subpatches.size(); ++sp) {
        const double h = dec.patches[std::size_t(dec.subpatches[sp].patch)].h_min;
        const double den = b.s_max[sp] / h + b.mu_max[sp] / (h * h);
        if (!std::isfinite(den)) throw Error("compute_dt: non-finite wave speed or viscosity on subpatch " +
                                             std::to_string(sp));
        if (den > 0.0) best = std::min(best, cfl / den);
    }
    if (!std::isfinite(best)) throw Error("compute_dt: zero wave speed everywhere");
    return best / std::numbers::pi;
}

} // namespace fcsdnn::solver
