#pragma once

#include "fcsdnn/geometry/decomposition.hpp"

namespace fcsdnn::geometry {

// Rectangular channel with one circular obstacle. The box is tiled by eight
// rectangles around a square hole of half-width `hole_half` centred on the
// obstacle; four overlapping annular S-patches fill the hole.
struct CylinderChannel {
    Vec2 lo{0.0, -1.0};
    Vec2 hi{4.5, 1.0};
    Vec2 center{1.25, 0.0};
    double radius = 0.25;
    double hole_half = 0.0; // 0: radius + max(0.2 radius, 3 h_bar)
};

CylinderChannel channel_cylinder_layout();      // [0,4.5] x [-1,1], obstacle at (1.25, 0)
CylinderChannel wide_channel_cylinder_layout(); // [0,2] x [-1.75,1.75], obstacle at (1, 0)

DomainShape cylinder_domain(const CylinderChannel& c);
std::vector<PatchSpec> cylinder_channel_specs(const CylinderChannel& c, const DecompositionParams& params);
Decomposition build_cylinder_channel(const CylinderChannel& c, const DecompositionParams& params);

// Box covered by an nx x ny array of affine patches overlapping by `overlap`
// physical units. Subpatch counts r, s apply to every patch (0: from h_bar).
Decomposition build_box(Vec2 lo, Vec2 hi, const DecompositionParams& params, int nx = 1, int ny = 1,
                        double overlap = 0.0, int r = 0, int s = 0);

} // namespace fcsdnn::geometry
