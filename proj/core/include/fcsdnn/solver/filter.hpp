#pragma once

#include <span>
#include <vector>

#include "fcsdnn/geometry/decomposition.hpp"
#include "fcsdnn/solver/state.hpp"

namespace fcsdnn::solver {

struct FilterParams {
    double alpha = 10.0;
    int order = 14;
};

struct SmearParams {
    double alpha = 10.0;
    int order = 2;
    int c = 18;
    int r = 9;
    double threshold = 0.05; // jump flag: |dF| > threshold * (max F - min F)
};

// Filters rho, rho u, rho v and theta along q1 then q2 on every subpatch and
// rebuilds E from them.
void subpatch_filter(State& state, const geometry::Decomposition& dec, const FilterParams& params,
                     double gamma = kGamma);

// Blend weight along one grid line of n samples for jumps between samples
// k and k+1 (k in `jumps`), in index units. Windows whose supports overlap are
// merged: 1 between the outermost flat parts, with the outer rises only.
std::vector<double> smear_window(std::span<const int> jumps, int n, int c, int r);

// Jump positions k (|F[k+1] - F[k]| > threshold * range) along a strided line.
std::vector<int> detect_jumps(const double* base, std::ptrdiff_t stride, int n, double range, double threshold);

// Localized smearing of discontinuous initial data on subpatches where jumps
// are detected, for F in {rho, rho u, rho v, theta}, along q1 then q2; E is
// rebuilt on the touched subpatches. Returns the number of subpatches
// modified.
int localized_initial_filter(State& state, const geometry::Decomposition& dec, const SmearParams& params,
                             double gamma = kGamma);

} // namespace fcsdnn::solver
