#pragma once

#include <array>

#include "fcsdnn/exchange/comm_plan.hpp"
#include "fcsdnn/solver/gas.hpp"

namespace fcsdnn::solver {

// Conserved variables (rho, rho u, rho v, E), one Field per component.
using State = std::array<exchange::Field, 4>;

inline State make_state(const geometry::Decomposition& dec) {
    return {exchange::make_field(dec), exchange::make_field(dec), exchange::make_field(dec),
            exchange::make_field(dec)};
}

inline Conserved at(const State& s, int sp, std::size_t k) {
    return {s[0][std::size_t(sp)].vec()[k], s[1][std::size_t(sp)].vec()[k], s[2][std::size_t(sp)].vec()[k],
            s[3][std::size_t(sp)].vec()[k]};
}

inline void set(State& s, int sp, std::size_t k, const Conserved& e) {
    for (int c = 0; c < 4; ++c) s[std::size_t(c)][std::size_t(sp)].vec()[k] = e[std::size_t(c)];
}

} // namespace fcsdnn::solver
