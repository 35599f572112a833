#include "fcsdnn/geometry/subpatch.hpp"

#include <algorithm>
#include <cmath>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::geometry {

int Subpatch::internal_distance(int i, int j) const {
    int d = kNoInternalSide;
    if (!external[kLeft]) d = std::min(d, i);
    if (!external[kRight]) d = std::min(d, n - 1 - i);
    if (!external[kBottom]) d = std::min(d, j);
    if (!external[kTop]) d = std::min(d, n - 1 - j);
    return d;
}

double Subpatch::internal_distance(double i, double j) const {
    double d = kNoInternalSide;
    if (!external[kLeft]) d = std::min(d, i);
    if (!external[kRight]) d = std::min(d, n - 1 - i);
    if (!external[kBottom]) d = std::min(d, j);
    if (!external[kTop]) d = std::min(d, n - 1 - j);
    return d;
}

std::vector<Subpatch> decompose_subpatches(const PatchMap& map, const ParameterGrid& grid, int patch_index,
                                           std::array<bool, 4> patch_external,
                                           std::array<int, 4> patch_boundary_id) {
    if (grid.r < 1 || grid.s < 1 || grid.n0 < 1 || grid.nv < 1)
        throw ConfigError("decompose_subpatches: r, s, n0, nv must be positive");
    const int n = grid.subpatch_points();
    const double h1 = grid.h1(), h2 = grid.h2();
    std::vector<Subpatch> out;
    out.reserve(std::size_t(grid.r) * grid.s);
    for (int s = 0; s < grid.s; ++s)
        for (int r = 0; r < grid.r; ++r) {
            Subpatch sp;
            sp.patch = patch_index;
            sp.r = r;
            sp.s = s;
            sp.local = s * grid.r + r;
            sp.i0 = grid.first1(r);
            sp.j0 = grid.first2(s);
            sp.n = n;
            sp.h1 = h1;
            sp.h2 = h2;
            const std::array<bool, 4> on_patch_side{r == 0, r == grid.r - 1, s == 0, s == grid.s - 1};
            for (int k = 0; k < 4; ++k) {
                sp.external[k] = on_patch_side[k] && patch_external[k];
                sp.boundary_id[k] = sp.external[k] ? patch_boundary_id[k] : -1;
            }
            sp.x = Grid(n, n);
            sp.y = Grid(n, n);
            sp.q1x = Grid(n, n);
            sp.q1y = Grid(n, n);
            sp.q2x = Grid(n, n);
            sp.q2y = Grid(n, n);
            sp.area = Grid(n, n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const Vec2 q((sp.i0 + i) * h1, (sp.j0 + j) * h2);
                    const Vec2 p = map.forward(q);
                    const Mat2 D = map.dforward(q);
                    const Mat2 J = D.inverse();
                    sp.x(i, j) = p.x();
                    sp.y(i, j) = p.y();
                    sp.q1x(i, j) = J(0, 0);
                    sp.q1y(i, j) = J(0, 1);
                    sp.q2x(i, j) = J(1, 0);
                    sp.q2y(i, j) = J(1, 1);
                    sp.area(i, j) = std::abs(D.determinant()) * h1 * h2;
                }
            out.push_back(std::move(sp));
        }
    return out;
}

std::vector<std::pair<int, int>> fringe_points(const Subpatch& sp, int n) {
    std::vector<std::pair<int, int>> out;
    if (n <= 0) return out;
    for (int j = 0; j < sp.n; ++j)
        for (int i = 0; i < sp.n; ++i)
            if (sp.in_fringe(i, j, n)) out.emplace_back(i, j);
    return out;
}

} // namespace fcsdnn::geometry
