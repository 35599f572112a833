#pragma once

#include <array>
#include <initializer_list>
#include <type_traits>
#include <utility>
#include <vector>

#include "fcsdnn/exchange/comm_plan.hpp"
#include "fcsdnn/geometry/decomposition.hpp"
#include "fcsdnn/solver/state.hpp"

namespace fcsdnn::solver {

// Five-stage, fourth-order SSP Runge-Kutta scheme of Spiteri and Ruuth in
// Shu-Osher form (SSP coefficient 1.508), as tabulated by Gottlieb (2005):
//   u1 = u0 + a10 dt L(u0)
//   u2 = b20 u0 + b21 u1 + a21 dt L(u1)
//   u3 = b30 u0 + b32 u2 + a32 dt L(u2)
//   u4 = b40 u0 + b43 u3 + a43 dt L(u3)
//   u5 = b52 u2 + b53 u3 + a53 dt L(u3) + b54 u4 + a54 dt L(u4)
struct Ssprk54 {
    static constexpr double a10 = 0.391752226571890;
    static constexpr double b20 = 0.444370493651235, b21 = 0.555629506348765, a21 = 0.368410593050371;
    static constexpr double b30 = 0.620101851488403, b32 = 0.379898148511597, a32 = 0.251891774271694;
    static constexpr double b40 = 0.178079954393132, b43 = 0.821920045606868, a43 = 0.544974750228521;
    static constexpr double b52 = 0.517231671970585, b53 = 0.096059710526147, a53 = 0.063692468666290;
    static constexpr double b54 = 0.386708617503269, a54 = 0.226007483236906;
    // Stage times as fractions of dt.
    static constexpr std::array<double, 5> c{0.0, 0.391752226571890, 0.586079689311540, 0.474542363121400,
                                             0.935010630967653};
};

using Term = std::pair<double, const std::vector<double>*>;

// out = sum of coefficient * vector. out may alias an input.
void linear_combination(std::vector<double>& out, std::initializer_list<Term> terms);

struct StateTerm {
    double coef;
    const State* s;
};
void linear_combination(State& out, std::initializer_list<StateTerm> terms);

namespace detail {
inline auto term(double c, const std::vector<double>& v) { return Term{c, &v}; }
inline auto term(double c, const State& v) { return StateTerm{c, &v}; }
} // namespace detail

// One SSPRK(5,4) step of u' = L(u). rhs(u, out) evaluates L; post(u, stage)
// runs after each stage update (stage 1..5), e.g. to enforce boundary
// conditions and exchange. V is std::vector<double> or State.
template <class V>
struct Ssprk54Workspace {
    V u0, u2, u3, L, L3;
};

template <class V, class Rhs, class Post>
void ssprk54_step(V& u, double dt, Rhs&& rhs, Post&& post, Ssprk54Workspace<V>& ws) {
    using detail::term;
    using S = Ssprk54;
    auto& w = ws;
    w.u0 = u;
    if constexpr (std::is_same_v<V, State>) {
        if (w.L[0].size() != u[0].size()) w.L = u;
        if (w.L3[0].size() != u[0].size()) w.L3 = u;
    } else {
        w.L.resize(u.size());
        w.L3.resize(u.size());
    }
    rhs(u, w.L);
    linear_combination(u, {term(1.0, w.u0), term(S::a10 * dt, w.L)});
    post(u, 1);
    rhs(u, w.L);
    linear_combination(u, {term(S::b20, w.u0), term(S::b21, u), term(S::a21 * dt, w.L)});
    post(u, 2);
    w.u2 = u;
    rhs(u, w.L);
    linear_combination(u, {term(S::b30, w.u0), term(S::b32, u), term(S::a32 * dt, w.L)});
    post(u, 3);
    w.u3 = u;
    rhs(u, w.L3);
    linear_combination(u, {term(S::b40, w.u0), term(S::b43, u), term(S::a43 * dt, w.L3)});
    post(u, 4);
    rhs(u, w.L);
    linear_combination(u, {term(S::b52, w.u2), term(S::b53, w.u3), term(S::a53 * dt, w.L3), term(S::b54, u),
                           term(S::a54 * dt, w.L)});
    post(u, 5);
}

// dt = (1/pi) min over subpatches of CFL / (max S / h + max mu / h^2), h the
// minimum spacing of the owning patch. mu may be null. Throws ConfigError for
// CFL <= 0, Error for non-finite values or a zero denominator.
double compute_dt(const State& state, const exchange::Field* mu, const geometry::Decomposition& dec, double cfl,
                  double gamma = kGamma);

// Per-subpatch max of S = |u| + |v| + a and of mu.
struct SpeedBounds {
    std::vector<double> s_max, mu_max;
};
SpeedBounds speed_bounds(const State& state, const exchange::Field* mu, double gamma = kGamma);

} // namespace fcsdnn::solver
