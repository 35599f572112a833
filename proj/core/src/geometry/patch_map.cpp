#include "fcsdnn/geometry/patch_map.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::geometry {

const char* to_string(PatchKind k) {
    switch (k) {
    case PatchKind::S: return "S";
    case PatchKind::C: return "C";
    case PatchKind::I: return "I";
    }
    return "?";
}

std::optional<Vec2> PatchMap::inverse(const Vec2& x) const {
    return newton_inverse(x, Vec2(0.5, 0.5));
}

std::optional<Vec2> PatchMap::newton_inverse(const Vec2& x, Vec2 q) const {
    for (int it = 0; it < 50; ++it) {
        const Vec2 r = forward(q) - x;
        const Mat2 D = dforward(q);
        const double det = D.determinant();
        if (!std::isfinite(det) || det == 0.0) return std::nullopt;
        Vec2 step = D.inverse() * r;
        // Damp large steps; the maps are smooth but may be strongly curved.
        const double n = step.norm();
        if (n > 0.5) step *= 0.5 / n;
        q -= step;
        if (step.norm() < 1e-12) return q;
    }
    return std::nullopt;
}

AffineMap::AffineMap(PatchKind kind, Vec2 lo, Vec2 hi) : PatchMap(kind), lo_(lo), hi_(hi) {}

std::string AffineMap::describe() const {
    std::ostringstream s;
    s << "affine [" << lo_.x() << ", " << hi_.x() << "] x [" << lo_.y() << ", " << hi_.y() << "]";
    return s.str();
}

Arc circular_arc(Vec2 center, double radius, double theta0, double theta1, bool normal_outward) {
    const double span = theta1 - theta0;
    const double sgn = normal_outward ? 1.0 : -1.0;
    Arc a;
    a.point = [=](double t) {
        const double th = theta0 + span * t;
        return Vec2(center + radius * Vec2(std::cos(th), std::sin(th)));
    };
    a.tangent = [=](double t) {
        const double th = theta0 + span * t;
        return Vec2(radius * span * Vec2(-std::sin(th), std::cos(th)));
    };
    a.normal = [=](double t) {
        const double th = theta0 + span * t;
        return Vec2(sgn * Vec2(std::cos(th), std::sin(th)));
    };
    a.dnormal = [=](double t) {
        const double th = theta0 + span * t;
        return Vec2(sgn * span * Vec2(-std::sin(th), std::cos(th)));
    };
    a.circle = Arc::Circle{center, radius, theta0, theta1, sgn};
    return a;
}

Arc straight_segment(Vec2 a, Vec2 b, Vec2 normal) {
    const Vec2 n = normal.normalized();
    Arc arc;
    arc.point = [=](double t) { return Vec2(a + t * (b - a)); };
    arc.tangent = [=](double) { return Vec2(b - a); };
    arc.normal = [=](double) { return n; };
    arc.dnormal = [](double) { return Vec2(0.0, 0.0); };
    return arc;
}

SPatchMap::SPatchMap(Arc arc, double H) : PatchMap(PatchKind::S), arc_(std::move(arc)), H_(H) {
    constexpr int n = 17;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 q(double(i) / (n - 1), double(j) / (n - 1));
            seeds_q_.push_back(q);
            seeds_x_.push_back(forward(q));
        }
}

Vec2 SPatchMap::forward(const Vec2& q) const {
    return arc_.point(q.x()) + q.y() * H_ * arc_.normal(q.x());
}

Mat2 SPatchMap::dforward(const Vec2& q) const {
    Mat2 D;
    D.col(0) = arc_.tangent(q.x()) + q.y() * H_ * arc_.dnormal(q.x());
    D.col(1) = H_ * arc_.normal(q.x());
    return D;
}

std::optional<Vec2> SPatchMap::inverse(const Vec2& x) const {
    if (arc_.circle) {
        const auto& c = *arc_.circle;
        const Vec2 rel = x - c.center;
        const double r = rel.norm();
        double th = std::atan2(rel.y(), rel.x());
        // Pick the branch of the angle closest to the middle of the arc.
        const double mid = 0.5 * (c.theta0 + c.theta1);
        const double two_pi = 2.0 * std::numbers::pi;
        th += two_pi * std::round((mid - th) / two_pi);
        const double q1 = (th - c.theta0) / (c.theta1 - c.theta0);
        const double q2 = c.normal_sign * (r - c.radius) / H_;
        return Vec2(q1, q2);
    }
    std::size_t best = 0;
    double bd = INFINITY;
    for (std::size_t k = 0; k < seeds_x_.size(); ++k) {
        const double d = (seeds_x_[k] - x).squaredNorm();
        if (d < bd) {
            bd = d;
            best = k;
        }
    }
    return newton_inverse(x, seeds_q_[best]);
}

std::string SPatchMap::describe() const {
    std::ostringstream s;
    if (arc_.circle) {
        const auto& c = *arc_.circle;
        s << "S annulus center (" << c.center.x() << ", " << c.center.y() << ") radius " << c.radius
          << " angles [" << c.theta0 << ", " << c.theta1 << "] H " << H_;
    } else {
        const Vec2 a = arc_.point(0.0), b = arc_.point(1.0);
        s << "S strip (" << a.x() << ", " << a.y() << ") -> (" << b.x() << ", " << b.y() << ") H " << H_;
    }
    return s.str();
}

PatchMapPtr build_s_patch(const Arc& arc, double H) {
    if (!(H > 0.0) || !std::isfinite(H)) throw GeometryError("S-patch height must be positive");
    auto map = std::make_shared<SPatchMap>(arc, H);

    // Local injectivity: det dM/dq keeps one sign and stays away from zero.
    constexpr int n = 65;
    double ref = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 q(double(i) / (n - 1), double(j) / (n - 1));
            const double det = map->dforward(q).determinant();
            if (i == 0 && j == 0) ref = det;
            const bool degenerate = !std::isfinite(det) || std::abs(det) <= 1e-10 * std::abs(ref) || det * ref <= 0;
            if (ref == 0.0 || degenerate) {
                std::ostringstream s;
                s << "S-patch self-intersects or degenerates near (q1, q2) = (" << q.x() << ", " << q.y()
                  << "): det dM/dq = " << det;
                throw GeometryError(s.str());
            }
        }

    // Global injectivity: distinct, non-neighbouring samples must not coincide.
    constexpr int m = 33;
    std::vector<Vec2> qs, xs;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            qs.emplace_back(double(i) / (m - 1), double(j) / (m - 1));
            xs.push_back(map->forward(qs.back()));
        }
    double scale = 0.0;
    for (const auto& x : xs) scale = std::max(scale, (x - xs.front()).norm());
    for (std::size_t a = 0; a < xs.size(); ++a)
        for (std::size_t b = a + 1; b < xs.size(); ++b) {
            if ((qs[a] - qs[b]).lpNorm<Eigen::Infinity>() <= 1.5 / (m - 1)) continue;
            if ((xs[a] - xs[b]).norm() < 1e-3 * scale / (m - 1)) {
                std::ostringstream s;
                s << "S-patch self-intersects: (" << qs[a].x() << ", " << qs[a].y() << ") and (" << qs[b].x()
                  << ", " << qs[b].y() << ") map to the same point";
                throw GeometryError(s.str());
            }
        }
    return map;
}

PatchMapPtr build_affine_patch(PatchKind kind, Vec2 lo, Vec2 hi) {
    if (!(hi.x() > lo.x()) || !(hi.y() > lo.y()) || !lo.allFinite() || !hi.allFinite())
        throw GeometryError("degenerate rectangle for affine patch");
    return std::make_shared<AffineMap>(kind, lo, hi);
}

} // namespace fcsdnn::geometry
