#include "fcsdnn/geometry/layouts.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::geometry {

CylinderChannel channel_cylinder_layout() { return {}; }

CylinderChannel wide_channel_cylinder_layout() {
    CylinderChannel c;
    c.lo = {0.0, -1.75};
    c.hi = {2.0, 1.75};
    c.center = {1.0, 0.0};
    return c;
}

DomainShape cylinder_domain(const CylinderChannel& c) { return DomainShape(c.lo, c.hi, {Disk{c.center, c.radius}}); }

std::vector<PatchSpec> cylinder_channel_specs(const CylinderChannel& c, const DecompositionParams& params) {
    if (!(params.h_bar > 0.0)) throw ConfigError("cylinder channel layout needs h_bar > 0");
    const double h = params.h_bar;
    const double b = c.hole_half > 0.0 ? c.hole_half : c.radius + std::max(0.2 * c.radius, 3.0 * h);
    const double layer = (2 * params.nv + 2) * h;
    // Rectangles extend this far along their long side into the corner blocks.
    const double delta = (2 * params.nv + 3) * h;
    // The annulus must cover the hole-facing overlap layers of the rectangles,
    // and its own outer layer must clear the hole.
    const double Ro =
        std::max(std::hypot(b, b + layer), std::sqrt(2.0) * b + layer) + 2.0 * h;
    const double xc = c.center.x(), yc = c.center.y();
    const double room = std::min({xc - c.lo.x(), c.hi.x() - xc, yc - c.lo.y(), c.hi.y() - yc});
    if (b <= c.radius || Ro + 2.0 * h >= room)
        throw GeometryError("cylinder channel: obstacle too close to the box for h_bar = " + std::to_string(h));

    const double x0 = c.lo.x(), x1 = c.hi.x(), y0 = c.lo.y(), y1 = c.hi.y();
    const double xa = xc - b, xb = xc + b, ya = yc - b, yb = yc + b;
    const double xa_ext = std::max(x0, xa - delta), xb_ext = std::min(x1, xb + delta);
    const double ya_ext = std::max(y0, ya - delta), yb_ext = std::min(y1, yb + delta);

    std::vector<PatchSpec> specs;
    auto corner = [&](const char* name, Vec2 lo, Vec2 hi) {
        specs.push_back({name, build_affine_patch(PatchKind::C, lo, hi)});
    };
    auto strip = [&](const char* name, Vec2 a, Vec2 bb, Vec2 nu, double H) {
        specs.push_back({name, build_s_patch(straight_segment(a, bb, nu), H)});
    };
    corner("corner_bl", {x0, y0}, {xa, ya});
    corner("corner_br", {xb, y0}, {x1, ya});
    corner("corner_tl", {x0, yb}, {xa, y1});
    corner("corner_tr", {xb, yb}, {x1, y1});
    strip("wall_bottom", {xa_ext, y0}, {xb_ext, y0}, {0.0, 1.0}, ya - y0);
    strip("wall_top", {xa_ext, y1}, {xb_ext, y1}, {0.0, -1.0}, y1 - yb);
    strip("wall_left", {x0, ya_ext}, {x0, yb_ext}, {1.0, 0.0}, xa - x0);
    strip("wall_right", {x1, ya_ext}, {x1, yb_ext}, {-1.0, 0.0}, x1 - xb);

    const double overlap = std::max(std::numbers::pi / 8.0, (2 * params.nv + 4) * h / Ro);
    const double span = std::numbers::pi / 2.0 + overlap;
    static const char* arc_names[] = {"annulus_e", "annulus_n", "annulus_w", "annulus_s"};
    for (int k = 0; k < 4; ++k) {
        const double mid = k * std::numbers::pi / 2.0;
        specs.push_back({arc_names[k], build_s_patch(circular_arc(c.center, c.radius, mid - span / 2.0,
                                                                  mid + span / 2.0, true),
                                                     Ro - c.radius)});
    }
    return specs;
}

Decomposition build_cylinder_channel(const CylinderChannel& c, const DecompositionParams& params) {
    return build_decomposition(cylinder_domain(c), cylinder_channel_specs(c, params), params);
}

Decomposition build_box(Vec2 lo, Vec2 hi, const DecompositionParams& params, int nx, int ny, double overlap,
                        int r, int s) {
    if (nx < 1 || ny < 1) throw ConfigError("build_box: patch counts must be positive");
    if ((nx > 1 || ny > 1) && !(overlap > 0.0)) throw ConfigError("build_box: tiled boxes need an overlap");
    std::vector<PatchSpec> specs;
    const Vec2 step((hi.x() - lo.x()) / nx, (hi.y() - lo.y()) / ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            Vec2 a(lo.x() + i * step.x(), lo.y() + j * step.y());
            Vec2 b = a + step;
            if (i > 0) a.x() -= 0.5 * overlap;
            if (i < nx - 1) b.x() += 0.5 * overlap;
            if (j > 0) a.y() -= 0.5 * overlap;
            if (j < ny - 1) b.y() += 0.5 * overlap;
            specs.push_back({"box_" + std::to_string(i) + "_" + std::to_string(j),
                             build_affine_patch(PatchKind::C, a, b), r, s});
        }
    return build_decomposition(DomainShape(lo, hi), std::move(specs), params);
}

} // namespace fcsdnn::geometry
