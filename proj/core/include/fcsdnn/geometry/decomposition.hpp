#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcsdnn/geometry/patch_map.hpp"
#include "fcsdnn/geometry/subpatch.hpp"

namespace fcsdnn::geometry {

struct Disk {
    Vec2 center;
    double radius;
};

// Axis-aligned box with circular holes. Boundary ids: 0 left, 1 right,
// 2 bottom, 3 top, 4 + k for hole k.
class DomainShape {
public:
    DomainShape() = default;
    DomainShape(Vec2 lo, Vec2 hi, std::vector<Disk> holes = {});

    const Vec2& lo() const { return lo_; }
    const Vec2& hi() const { return hi_; }
    const std::vector<Disk>& holes() const { return holes_; }

    bool contains(const Vec2& p, double tol = 1e-12) const;
    double boundary_distance(const Vec2& p) const;
    int nearest_boundary(const Vec2& p) const;
    static std::string boundary_name(int id);
    double area() const;
    double diameter() const { return (hi_ - lo_).norm(); }

private:
    Vec2 lo_{0, 0}, hi_{1, 1};
    std::vector<Disk> holes_;
};

struct PatchSpec {
    std::string name;
    PatchMapPtr map;
    // Subpatch counts; 0 means "choose from h_bar".
    int r = 0, s = 0;
};

struct DecompositionParams {
    int n0 = kDefaultN0;
    int nv = kDefaultNv;
    int nf = kDefaultNf;
    double h_bar = 0.0; // upper bound on physical spacing; required when counts are 0
};

struct Patch {
    std::string name;
    PatchMapPtr map;
    ParameterGrid grid;
    std::array<bool, 4> external{};
    std::array<int, 4> boundary_id{-1, -1, -1, -1};
    // Number of separate contacts between each non-boundary side and the
    // domain boundary (sampled); more than one breaks the side rule.
    std::array<int, 4> boundary_contacts{};
    int first_subpatch = 0;
    int subpatch_count = 0;
    double h_min = 0.0; // min distance between index-adjacent grid points
    double h_max = 0.0;
    Vec2 bbox_lo, bbox_hi;

    PatchKind kind() const { return map->kind(); }
};

// A point located in a patch: parameter coordinates and fractional patch-grid indices.
struct PatchHit {
    int patch;
    Vec2 q;
    double fi, fj;
};

class Decomposition {
public:
    DomainShape domain;
    DecompositionParams params;
    std::vector<PatchSpec> specs; // as built, with resolved counts
    std::vector<Patch> patches;
    std::vector<Subpatch> subpatches;

    const Subpatch& subpatch(int patch, int local) const {
        return subpatches[std::size_t(patches[std::size_t(patch)].first_subpatch + local)];
    }
    std::size_t total_points() const;

    // Patches whose closed parameter square contains x (tolerance tol in q).
    std::vector<PatchHit> locate(const Vec2& x, double tol = 1e-12) const;
    std::optional<PatchHit> locate_in(int patch, const Vec2& x, double tol = 1e-12) const;
    // Global ids of the subpatches of `patch` whose index range contains the
    // fractional patch index (fi, fj).
    std::vector<int> subpatches_containing(int patch, double fi, double fj) const;

    double h_min() const;
    double h_max() const;

    nlohmann::json summary() const;
    std::string summary_text() const;
};

Decomposition build_decomposition(const DomainShape& domain, std::vector<PatchSpec> specs,
                                  const DecompositionParams& params);
Decomposition refine_decomposition(const Decomposition& dec, int K);

} // namespace fcsdnn::geometry
