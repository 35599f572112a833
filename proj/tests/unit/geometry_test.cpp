#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "fcsdnn/geometry/layouts.hpp"
#include "fcsdnn/geometry/validate.hpp"
#include "fcsdnn/util/error.hpp"

using namespace fcsdnn;
using namespace fcsdnn::geometry;

namespace {

// A wavy arc with no analytic inverse, so the Newton path is exercised.
Arc wavy_arc() {
    Arc a;
    a.point = [](double t) { return Vec2(t, 0.1 * std::sin(2 * std::numbers::pi * t)); };
    a.tangent = [](double t) { return Vec2(1.0, 0.2 * std::numbers::pi * std::cos(2 * std::numbers::pi * t)); };
    auto tangent = a.tangent;
    a.normal = [tangent](double t) {
        const Vec2 d = tangent(t);
        return Vec2(Vec2(-d.y(), d.x()).normalized());
    };
    auto normal = a.normal;
    a.dnormal = [normal](double t) {
        const double e = 1e-6;
        return Vec2((normal(t + e) - normal(t - e)) / (2 * e));
    };
    return a;
}

DecompositionParams unit_params() {
    DecompositionParams p;
    p.n0 = 83;
    p.nv = 9;
    p.nf = 5;
    return p;
}

// Two unit-height affine patches side by side, overlapping by `cols` grid columns
// of spacing 0.01 (r = s = 1 gives 101 points on a unit side).
Decomposition two_patches(int cols, int K = 1) {
    const double w = (cols - 1) * 0.01;
    DomainShape dom({0.0, 0.0}, {2.0 - w, 1.0});
    std::vector<PatchSpec> specs{{"a", build_affine_patch(PatchKind::C, {0.0, 0.0}, {1.0, 1.0}), K, K},
                                 {"b", build_affine_patch(PatchKind::C, {1.0 - w, 0.0}, {2.0 - w, 1.0}), K, K}};
    return build_decomposition(dom, specs, unit_params());
}

} // namespace

TEST_CASE("build_s_patch wraps the cylinder with four valid arcs") {
    const Vec2 c(1.25, 0.0);
    for (int k = 0; k < 4; ++k) {
        const double mid = k * std::numbers::pi / 2;
        auto map = build_s_patch(circular_arc(c, 0.25, mid - 0.3 * std::numbers::pi, mid + 0.3 * std::numbers::pi, true), 0.15);
        CHECK(map->kind() == PatchKind::S);
        // Side q2 = 0 lies on the circle.
        for (double t : {0.0, 0.3, 1.0}) CHECK((map->forward(Vec2(t, 0.0)) - c).norm() == doctest::Approx(0.25).epsilon(1e-14));
        CHECK((map->forward(Vec2(0.5, 1.0)) - c).norm() == doctest::Approx(0.40).epsilon(1e-14));
    }
}

TEST_CASE("build_s_patch on a straight segment gives an affine strip") {
    auto map = build_s_patch(straight_segment({0.0, -1.0}, {4.5, -1.0}, {0.0, 1.0}), 0.2);
    const Mat2 D0 = map->dforward(Vec2(0.1, 0.2));
    const Mat2 D1 = map->dforward(Vec2(0.9, 0.7));
    CHECK((D0 - D1).norm() == 0.0);
    CHECK(D0(0, 0) == doctest::Approx(4.5));
    CHECK(D0(1, 1) == doctest::Approx(0.2));
    const Vec2 x = map->forward(Vec2(0.5, 0.5));
    CHECK(x.x() == doctest::Approx(2.25));
    CHECK(x.y() == doctest::Approx(-0.9));
}

TEST_CASE("build_s_patch rejects a height that folds across the center") {
    bool thrown = false;
    try {
        build_s_patch(circular_arc({0.0, 0.0}, 0.25, 0.0, std::numbers::pi / 2, false), 2.5);
    } catch (const GeometryError& e) {
        thrown = true;
        CHECK(std::string(e.what()).find("(q1, q2)") != std::string::npos);
    }
    CHECK(thrown);
    CHECK_THROWS_AS(build_s_patch(straight_segment({0, 0}, {1, 0}, {0, 1}), 0.0), GeometryError);
}

TEST_CASE("build_affine_patch scaling and degenerate input") {
    auto unit = build_affine_patch(PatchKind::C, {0, 0}, {1, 1});
    CHECK(unit->jacobian(Vec2(0.3, 0.4)).isApprox(Mat2::Identity()));
    auto rect = build_affine_patch(PatchKind::I, {0, -1}, {2, 0});
    const Mat2 D = rect->dforward(Vec2(0.5, 0.5));
    CHECK(D(0, 0) == 2.0);
    CHECK(D(1, 1) == 1.0);
    CHECK(rect->jacobian(Vec2(0.5, 0.5)).determinant() == doctest::Approx(0.5));
    CHECK_THROWS_AS(build_affine_patch(PatchKind::C, {0, 0}, {0, 1}), GeometryError);
}

TEST_CASE("inverse maps round-trip and Jacobians match finite differences") {
    std::vector<PatchMapPtr> maps{
        build_affine_patch(PatchKind::C, {-1, 2}, {3, 2.5}),
        build_s_patch(circular_arc({1.25, 0}, 0.25, -1.0, 1.0, true), 0.35),
        build_s_patch(circular_arc({0, 0}, 1.0, 0.2, 1.4, false), 0.4),
        build_s_patch(wavy_arc(), 0.2),
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& m : maps) {
        double worst_inv = 0.0, worst_jac = 0.0;
        for (int k = 0; k < 200; ++k) {
            const Vec2 q(u(rng), u(rng));
            const Vec2 x = m->forward(q);
            const auto qi = m->inverse(x);
            REQUIRE(qi);
            worst_inv = std::max(worst_inv, (m->forward(*qi) - x).norm());
            // Finite-difference Jacobian of the inverse map.
            const double e = 1e-6;
            Mat2 fd;
            fd.col(0) = (*m->inverse(x + Vec2(e, 0)) - *m->inverse(x - Vec2(e, 0))) / (2 * e);
            fd.col(1) = (*m->inverse(x + Vec2(0, e)) - *m->inverse(x - Vec2(0, e))) / (2 * e);
            worst_jac = std::max(worst_jac, (fd - m->jacobian(q)).lpNorm<Eigen::Infinity>());
        }
        CHECK(worst_inv < 1e-10);
        CHECK(worst_jac < 1e-6);
    }
}

TEST_CASE("decompose_subpatches reproduces the small illustrative configuration") {
    ParameterGrid g;
    g.r = 4;
    g.s = 3;
    g.n0 = 9;
    g.nv = 3;
    auto map = build_affine_patch(PatchKind::C, {0, 0}, {1, 1});
    auto subs = decompose_subpatches(*map, g);
    CHECK(subs.size() == 12);
    for (const auto& sp : subs) {
        CHECK(sp.n == 15);
        CHECK(sp.x.size() == 225);
    }
    // Patch grid: N1 = 4*10 - 1 = 39 points plus 2 nv.
    CHECK(g.points1() == 45);
    CHECK(g.h1() == doctest::Approx(1.0 / 44));
}

TEST_CASE("single subpatch with default constants holds 101^2 points") {
    ParameterGrid g;
    auto subs = decompose_subpatches(*build_affine_patch(PatchKind::C, {0, 0}, {1, 1}), g);
    REQUIRE(subs.size() == 1);
    CHECK(subs[0].x.size() == 10201);
    CHECK(subs[0].a() == 0.0);
    CHECK(subs[0].b() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("subpatch rectangles follow the index arithmetic exactly") {
    for (auto [r, s, n0, nv] : std::vector<std::array<int, 4>>{{4, 3, 9, 3}, {3, 2, 83, 9}, {5, 1, 20, 4}}) {
        ParameterGrid g{r, s, n0, nv};
        // Preliminary tiles start nv-1 lines in, have width n0+1 and abut.
        CHECK(g.prelim_first1(0) == nv - 1);
        for (int k = 0; k + 1 < r; ++k) CHECK(g.prelim_first1(k + 1) - g.prelim_first1(k) == n0 + 1);
        // The last preliminary tile ends nv-1 lines before the far side.
        CHECK(g.prelim_first1(r - 1) + n0 + 1 == g.points1() - 1 - (nv - 1));
        // Overlapping rectangles extend nv-1 lines beyond the tiles and cover Q.
        std::set<int> covered;
        for (int k = 0; k < r; ++k) {
            CHECK(g.first1(k) == g.prelim_first1(k) - (nv - 1));
            for (int i = 0; i < g.subpatch_points(); ++i) covered.insert(g.first1(k) + i);
        }
        CHECK(*covered.begin() == 0);
        CHECK(*covered.rbegin() == g.points1() - 1);
        CHECK(int(covered.size()) == g.points1());
    }
}

TEST_CASE("neighbouring subpatches share 2 nv - 1 grid columns") {
    ParameterGrid g{2, 1, 83, 9};
    auto subs = decompose_subpatches(*build_affine_patch(PatchKind::C, {0, 0}, {1, 1}), g);
    const int shared = subs[0].i0 + subs[0].n - subs[1].i0;
    CHECK(shared == 17);
    // Shared columns hold identical coordinates.
    for (int k = 0; k < shared; ++k) CHECK(subs[0].x(subs[1].i0 - subs[0].i0 + k, 5) == subs[1].x(k, 5));
}

TEST_CASE("fringe_points") {
    Subpatch sp;
    sp.n = 12;
    SUBCASE("n = 1 gives exactly the internal side points") {
        sp.external = {false, true, true, true};
        auto f = fringe_points(sp, 1);
        CHECK(f.size() == 12);
        for (auto [i, j] : f) CHECK(i == 0);
    }
    SUBCASE("all sides external gives an empty fringe") {
        sp.external = {true, true, true, true};
        for (int n : {1, 5, 50}) CHECK(fringe_points(sp, n).empty());
    }
    SUBCASE("interior subpatch, n = 2, is the two-deep ring (brute force)") {
        sp.external = {false, false, false, false};
        auto f = fringe_points(sp, 2);
        std::set<std::pair<int, int>> got(f.begin(), f.end());
        std::set<std::pair<int, int>> want;
        for (int j = 0; j < sp.n; ++j)
            for (int i = 0; i < sp.n; ++i) {
                // Max-norm distance to the set of boundary points of the index square.
                int d = 1 << 20;
                for (int jj = 0; jj < sp.n; ++jj)
                    for (int ii = 0; ii < sp.n; ++ii)
                        if (ii == 0 || jj == 0 || ii == sp.n - 1 || jj == sp.n - 1)
                            d = std::min(d, std::max(std::abs(ii - i), std::abs(jj - j)));
                if (d < 2) want.emplace(i, j);
            }
        CHECK(got == want);
        CHECK(got.size() == std::size_t(12 * 12 - 8 * 8));
    }
    SUBCASE("fringes are nested") {
        sp.external = {false, true, false, true};
        for (int n = 0; n < 8; ++n) {
            auto a = fringe_points(sp, n), b = fringe_points(sp, n + 1);
            std::set<std::pair<int, int>> sb(b.begin(), b.end());
            for (auto p : a) CHECK(sb.count(p) == 1);
        }
    }
}

TEST_CASE("refine_decomposition") {
    DomainShape dom({0, 0}, {1, 1});
    SUBCASE("K = 1 leaves the grids unchanged") {
        auto dec = build_decomposition(dom, {{"p", build_affine_patch(PatchKind::C, {0, 0}, {1, 1}), 2, 3}}, unit_params());
        auto ref = refine_decomposition(dec, 1);
        REQUIRE(ref.subpatches.size() == dec.subpatches.size());
        for (std::size_t k = 0; k < dec.subpatches.size(); ++k) {
            CHECK(ref.subpatches[k].i0 == dec.subpatches[k].i0);
            CHECK(ref.subpatches[k].j0 == dec.subpatches[k].j0);
            CHECK(ref.subpatches[k].x.vec() == dec.subpatches[k].x.vec());
        }
    }
    SUBCASE("K = 2 on a single-subpatch patch") {
        auto dec = build_decomposition(dom, {{"p", build_affine_patch(PatchKind::C, {0, 0}, {1, 1}), 1, 1}}, unit_params());
        auto ref = refine_decomposition(dec, 2);
        CHECK(ref.subpatches.size() == 4);
        for (const auto& sp : ref.subpatches) CHECK(sp.x.size() == 10201);
    }
    SUBCASE("K = 3 on the illustrative configuration") {
        DecompositionParams p;
        p.n0 = 9;
        p.nv = 3;
        auto dec = build_decomposition(dom, {{"p", build_affine_patch(PatchKind::C, {0, 0}, {1, 1}), 4, 3}}, p);
        auto ref = refine_decomposition(dec, 3);
        CHECK(ref.patches[0].grid.r == 12);
        CHECK(ref.patches[0].grid.s == 9);
        CHECK(ref.subpatches.size() == 108);
    }
    SUBCASE("spacing shrinks by about K on curved patches") {
        DecompositionParams p = unit_params();
        p.h_bar = 0.02;
        auto dec = build_cylinder_channel(channel_cylinder_layout(), p);
        auto ref = refine_decomposition(dec, 2);
        for (std::size_t k = 0; k < dec.patches.size(); ++k) {
            const double ratio = ref.patches[k].h_max / dec.patches[k].h_max;
            CHECK(ratio == doctest::Approx(0.5).epsilon(0.2));
        }
    }
}

TEST_CASE("validate_decomposition on two affine patches") {
    SUBCASE("wide overlap passes") {
        auto dec = two_patches(30);
        auto rep = validate_decomposition(dec, 5, 9, 20000);
        CHECK(rep.overlap.empty());
        CHECK(rep.donor_total == 0);
        CHECK(rep.uncovered_samples == 0);
        CHECK(rep.ok());
    }
    SUBCASE("a two-column overlap breaks the donor-receiver rule") {
        auto dec = two_patches(2);
        auto rep = validate_decomposition(dec, 5, 9, 20000);
        CHECK(rep.donor_total > 0);
        CHECK_FALSE(rep.overlap.empty());
        CHECK_FALSE(rep.ok());
    }
    SUBCASE("refinement keeps a passing decomposition passing") {
        for (int K : {1, 2}) {
            auto rep = validate_decomposition(refine_decomposition(two_patches(30), K), 5, 9, 20000);
            CHECK(rep.ok());
        }
    }
}

TEST_CASE("cylinder channel layout") {
    DecompositionParams p = unit_params();
    p.h_bar = 0.02;
    auto dec = build_cylinder_channel(channel_cylinder_layout(), p);
    CHECK(dec.patches.size() == 12);
    auto rep = validate_decomposition(dec, p.nf, p.nv);
    CHECK(rep.ok());
    CHECK(rep.boundary_rule_warnings.empty());
    CHECK(rep.max_inverse_residual < 1e-10);
    CHECK(rep.min_abs_det_J > 0.0);
    CHECK(dec.h_max() <= 0.02);
    // Inflow, outflow, both walls and the obstacle all appear as external sides.
    std::set<int> ids;
    for (const auto& patch : dec.patches)
        for (int s = 0; s < 4; ++s)
            if (patch.external[std::size_t(s)]) ids.insert(patch.boundary_id[std::size_t(s)]);
    CHECK(ids == std::set<int>{0, 1, 2, 3, 4});
    // Every subpatch has exactly (n0 + 2 nv)^2 points.
    for (const auto& sp : dec.subpatches) CHECK(sp.x.size() == 101u * 101u);

    auto wide = build_cylinder_channel(wide_channel_cylinder_layout(), p);
    CHECK(validate_decomposition(wide, p.nf, p.nv, 20000).ok());
}

TEST_CASE("cylinder channel rejects a resolution too coarse for the box") {
    DecompositionParams p = unit_params();
    p.h_bar = 0.05;
    CHECK_THROWS_AS(build_cylinder_channel(channel_cylinder_layout(), p), GeometryError);
}

TEST_CASE("decomposition summary lists every patch") {
    DecompositionParams p = unit_params();
    p.h_bar = 0.02;
    auto dec = build_cylinder_channel(channel_cylinder_layout(), p);
    auto j = dec.summary();
    CHECK(j["patches"].size() == 12);
    CHECK(j["total_points"].get<std::size_t>() == dec.total_points());
    CHECK(dec.summary_text().find("annulus_e") != std::string::npos);
}
