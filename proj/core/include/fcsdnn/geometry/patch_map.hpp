#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace fcsdnn::geometry {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Ordering matters: donor tie-breaks compare kinds in this order.
enum class PatchKind { S = 0, C = 1, I = 2 };

const char* to_string(PatchKind k);

// Smooth invertible map from the unit parameter square onto a patch.
class PatchMap {
public:
    explicit PatchMap(PatchKind kind) : kind_(kind) {}
    virtual ~PatchMap() = default;

    PatchKind kind() const { return kind_; }

    virtual Vec2 forward(const Vec2& q) const = 0;
    // Columns dM/dq1, dM/dq2.
    virtual Mat2 dforward(const Vec2& q) const = 0;

    // Parameter coordinates of x. May fall outside [0,1]^2 when x is outside
    // the patch; empty when the iteration fails to converge.
    virtual std::optional<Vec2> inverse(const Vec2& x) const;

    // Jacobian of the inverse map, dq/dx.
    Mat2 jacobian(const Vec2& q) const { return dforward(q).inverse(); }

    virtual std::string describe() const = 0;

protected:
    // Newton on M(q) = x from the given seed, tolerance 1e-12.
    std::optional<Vec2> newton_inverse(const Vec2& x, Vec2 q) const;

private:
    PatchKind kind_;
};

using PatchMapPtr = std::shared_ptr<const PatchMap>;

// Axis-aligned rectangle [x0,x1] x [y0,y1].
class AffineMap final : public PatchMap {
public:
    AffineMap(PatchKind kind, Vec2 lo, Vec2 hi);
    Vec2 forward(const Vec2& q) const override { return lo_ + q.cwiseProduct(hi_ - lo_); }
    Mat2 dforward(const Vec2&) const override { return (hi_ - lo_).asDiagonal(); }
    std::optional<Vec2> inverse(const Vec2& x) const override {
        return Vec2((x - lo_).cwiseQuotient(hi_ - lo_));
    }
    std::string describe() const override;
    const Vec2& lo() const { return lo_; }
    const Vec2& hi() const { return hi_; }

private:
    Vec2 lo_, hi_;
};

// Boundary arc l(t), t in [0,1], with unit normal nu(t) pointing into the domain.
struct Arc {
    std::function<Vec2(double)> point;
    std::function<Vec2(double)> tangent;   // dl/dt
    std::function<Vec2(double)> normal;
    std::function<Vec2(double)> dnormal;   // dnu/dt
    // Set for circular arcs so the patch gets an analytic inverse.
    struct Circle {
        Vec2 center;
        double radius;
        double theta0;
        double theta1;
        double normal_sign; // +1: nu points away from the center
    };
    std::optional<Circle> circle;
};

Arc circular_arc(Vec2 center, double radius, double theta0, double theta1, bool normal_outward);
Arc straight_segment(Vec2 a, Vec2 b, Vec2 normal);

// M(q) = l(q1) + q2 H nu(q1).
class SPatchMap : public PatchMap {
public:
    SPatchMap(Arc arc, double H);
    Vec2 forward(const Vec2& q) const override;
    Mat2 dforward(const Vec2& q) const override;
    std::optional<Vec2> inverse(const Vec2& x) const override;
    std::string describe() const override;
    double height() const { return H_; }
    const Arc& arc() const { return arc_; }

private:
    Arc arc_;
    double H_;
    // Coarse forward samples used to seed Newton.
    std::vector<Vec2> seeds_q_;
    std::vector<Vec2> seeds_x_;
};

// Throws GeometryError naming the parameter pair where the sampled map folds
// or degenerates.
PatchMapPtr build_s_patch(const Arc& arc, double H);
PatchMapPtr build_affine_patch(PatchKind kind, Vec2 lo, Vec2 hi);

} // namespace fcsdnn::geometry
