#pragma once

#include <array>
#include <utility>
#include <vector>

#include "fcsdnn/geometry/patch_map.hpp"
#include "fcsdnn/util/grid_array.hpp"

namespace fcsdnn::geometry {

inline constexpr int kDefaultN0 = 83;
inline constexpr int kDefaultNv = 9;
inline constexpr int kDefaultNf = 5;

// Sides of the parameter square, in the order used for all per-side arrays.
enum Side { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

struct ParameterGrid {
    int r = 1, s = 1;
    int n0 = kDefaultN0, nv = kDefaultNv;

    int N1() const { return r * (n0 + 1) - 1; }
    int N2() const { return s * (n0 + 1) - 1; }
    // Grid points per patch line, including both boundary-vicinity layers.
    int points1() const { return N1() + 2 * nv; }
    int points2() const { return N2() + 2 * nv; }
    double h1() const { return 1.0 / (N1() + 2 * nv - 1); }
    double h2() const { return 1.0 / (N2() + 2 * nv - 1); }
    int subpatch_points() const { return n0 + 2 * nv; }

    // Index of the first grid line of subpatch column r (row s); the
    // preliminary rectangle of r starts nv-1 lines further in.
    int first1(int rr) const { return rr * (n0 + 1); }
    int first2(int ss) const { return ss * (n0 + 1); }
    int prelim_first1(int rr) const { return first1(rr) + nv - 1; }
    int prelim_first2(int ss) const { return first2(ss) + nv - 1; }
};

struct Subpatch {
    int patch = 0;       // owning patch index
    int r = 0, s = 0;    // position within the patch
    int local = 0;       // s * r_p + r
    int i0 = 0, j0 = 0;  // patch-grid index of local (0, 0)
    int n = 0;           // points per direction
    double h1 = 0, h2 = 0;
    std::array<bool, 4> external{}; // per Side: lies in the domain boundary
    std::array<int, 4> boundary_id{-1, -1, -1, -1};

    // Physical coordinates and inverse-map metrics dq/dx at each grid point.
    Grid x, y;
    Grid q1x, q1y, q2x, q2y;
    Grid area; // |det dM/dq| h1 h2

    double a() const { return i0 * h1; }
    double b() const { return (i0 + n - 1) * h1; }
    double c() const { return j0 * h2; }
    double d() const { return (j0 + n - 1) * h2; }

    // Max-index distance from local (i, j) to the internal sides; a large
    // value when every side is external.
    int internal_distance(int i, int j) const;
    // Same for fractional local indices, used to rank donor candidates.
    double internal_distance(double i, double j) const;
    bool in_fringe(int i, int j, int width) const { return internal_distance(i, j) < width; }
};

inline constexpr int kNoInternalSide = 1 << 28;

// Builds the subpatches of one patch; geometry arrays are filled from `map`.
// `patch_external` marks patch sides in the domain boundary.
std::vector<Subpatch> decompose_subpatches(const PatchMap& map, const ParameterGrid& grid, int patch_index = 0,
                                           std::array<bool, 4> patch_external = {},
                                           std::array<int, 4> patch_boundary_id = {-1, -1, -1, -1});

// Grid points with max-index distance < n from the internal-side points.
std::vector<std::pair<int, int>> fringe_points(const Subpatch& sp, int n);

} // namespace fcsdnn::geometry
