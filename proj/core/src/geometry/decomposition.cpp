#include "fcsdnn/geometry/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::geometry {

namespace {

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

Vec2 side_point(int side, double t) {
    switch (side) {
    case kLeft: return {0.0, t};
    case kRight: return {1.0, t};
    case kBottom: return {t, 0.0};
    default: return {t, 1.0};
    }
}

// Smallest count with sampled spacing L / (count (n0+1) + 2 nv - 2) <= h_bar.
int count_for(double L, double h_bar, int n0, int nv) {
    const double need = L / h_bar - 2.0 * nv + 2.0;
    return std::max(1, int(std::ceil(need / (n0 + 1) - 1e-12)));
}

void measure_spacing(Patch& p) {
    const int n1 = p.grid.points1(), n2 = p.grid.points2();
    const double h1 = p.grid.h1(), h2 = p.grid.h2();
    std::vector<Vec2> prev(static_cast<std::size_t>(n1)), cur(static_cast<std::size_t>(n1));
    double lo = INFINITY, hi = 0.0;
    Vec2 blo(INFINITY, INFINITY), bhi(-INFINITY, -INFINITY);
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            cur[std::size_t(i)] = p.map->forward(Vec2(i * h1, j * h2));
            blo = blo.cwiseMin(cur[std::size_t(i)]);
            bhi = bhi.cwiseMax(cur[std::size_t(i)]);
            if (i > 0) {
                const double d = (cur[std::size_t(i)] - cur[std::size_t(i - 1)]).norm();
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            if (j > 0) {
                const double d = (cur[std::size_t(i)] - prev[std::size_t(i)]).norm();
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
        }
        std::swap(prev, cur);
    }
    p.h_min = lo;
    p.h_max = hi;
    p.bbox_lo = blo;
    p.bbox_hi = bhi;
}

void classify_sides(Patch& p, const DomainShape& dom) {
    constexpr int m = 65;
    const double tol = 1e-9 * dom.diameter();
    for (int side = 0; side < 4; ++side) {
        std::array<bool, m> on{};
        std::array<bool, m> in{};
        int n_on = 0;
        for (int k = 0; k < m; ++k) {
            const Vec2 x = p.map->forward(side_point(side, double(k) / (m - 1)));
            on[std::size_t(k)] = dom.boundary_distance(x) < tol;
            in[std::size_t(k)] = dom.contains(x, tol);
            n_on += on[std::size_t(k)];
        }
        if (n_on == m) {
            p.external[std::size_t(side)] = true;
            p.boundary_id[std::size_t(side)] = dom.nearest_boundary(p.map->forward(side_point(side, 0.5)));
            p.boundary_contacts[std::size_t(side)] = 0;
            continue;
        }
        int contacts = 0;
        for (int k = 0; k < m; ++k) {
            if (on[std::size_t(k)] && (k == 0 || !on[std::size_t(k - 1)])) ++contacts;
            if (k > 0 && !on[std::size_t(k)] && !on[std::size_t(k - 1)] && in[std::size_t(k)] != in[std::size_t(k - 1)])
                ++contacts;
        }
        p.boundary_contacts[std::size_t(side)] = contacts;
    }
}

Mat2 sampled_lengths(const PatchMap& map) {
    // Column k holds max |dM/dq_k| over a sample grid (only the diagonal is used).
    constexpr int m = 33;
    double L1 = 0.0, L2 = 0.0;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const Mat2 D = map.dforward(Vec2(double(i) / (m - 1), double(j) / (m - 1)));
            L1 = std::max(L1, D.col(0).norm());
            L2 = std::max(L2, D.col(1).norm());
        }
    Mat2 out = Mat2::Zero();
    out(0, 0) = L1;
    out(1, 1) = L2;
    return out;
}

} // namespace

DomainShape::DomainShape(Vec2 lo, Vec2 hi, std::vector<Disk> holes) : lo_(lo), hi_(hi), holes_(std::move(holes)) {
    if (!(hi.x() > lo.x()) || !(hi.y() > lo.y())) throw GeometryError("domain box is degenerate");
    for (const auto& d : holes_)
        if (!(d.radius > 0.0)) throw GeometryError("obstacle radius must be positive");
}

bool DomainShape::contains(const Vec2& p, double tol) const {
    if (p.x() < lo_.x() - tol || p.x() > hi_.x() + tol || p.y() < lo_.y() - tol || p.y() > hi_.y() + tol)
        return false;
    for (const auto& d : holes_)
        if ((p - d.center).norm() < d.radius - tol) return false;
    return true;
}

double DomainShape::boundary_distance(const Vec2& p) const {
    const Vec2 a = lo_, b(hi_.x(), lo_.y()), c = hi_, d(lo_.x(), hi_.y());
    double best = std::min({segment_distance(p, a, d), segment_distance(p, b, c), segment_distance(p, a, b),
                            segment_distance(p, d, c)});
    for (const auto& h : holes_) best = std::min(best, std::abs((p - h.center).norm() - h.radius));
    return best;
}

int DomainShape::nearest_boundary(const Vec2& p) const {
    const Vec2 a = lo_, b(hi_.x(), lo_.y()), c = hi_, d(lo_.x(), hi_.y());
    std::vector<double> dist{segment_distance(p, a, d), segment_distance(p, b, c), segment_distance(p, a, b),
                             segment_distance(p, d, c)};
    for (const auto& h : holes_) dist.push_back(std::abs((p - h.center).norm() - h.radius));
    return int(std::min_element(dist.begin(), dist.end()) - dist.begin());
}

std::string DomainShape::boundary_name(int id) {
    switch (id) {
    case 0: return "left";
    case 1: return "right";
    case 2: return "bottom";
    case 3: return "top";
    default: return id >= 4 ? "obstacle" + std::to_string(id - 4) : "internal";
    }
}

double DomainShape::area() const {
    double a = (hi_ - lo_).prod();
    for (const auto& h : holes_) a -= M_PI * h.radius * h.radius;
    return a;
}

std::size_t Decomposition::total_points() const {
    std::size_t n = 0;
    for (const auto& sp : subpatches) n += std::size_t(sp.n) * sp.n;
    return n;
}

std::optional<PatchHit> Decomposition::locate_in(int patch, const Vec2& x, double tol) const {
    const Patch& p = patches[std::size_t(patch)];
    const Vec2 pad = 1e-9 * (p.bbox_hi - p.bbox_lo) + Vec2::Constant(1e-14);
    if ((x.array() < (p.bbox_lo - pad).array()).any() || (x.array() > (p.bbox_hi + pad).array()).any())
        return std::nullopt;
    const auto q = p.map->inverse(x);
    if (!q) return std::nullopt;
    if ((q->array() < -tol).any() || (q->array() > 1.0 + tol).any()) return std::nullopt;
    const Vec2 qc = q->cwiseMax(0.0).cwiseMin(1.0);
    return PatchHit{patch, qc, qc.x() / p.grid.h1(), qc.y() / p.grid.h2()};
}

std::vector<PatchHit> Decomposition::locate(const Vec2& x, double tol) const {
    std::vector<PatchHit> out;
    for (int p = 0; p < int(patches.size()); ++p)
        if (auto h = locate_in(p, x, tol)) out.push_back(*h);
    return out;
}

std::vector<int> Decomposition::subpatches_containing(int patch, double fi, double fj) const {
    const Patch& p = patches[std::size_t(patch)];
    const int n = p.grid.subpatch_points();
    const int step = p.grid.n0 + 1;
    constexpr double eps = 1e-9;
    std::vector<int> out;
    const int r_hi = std::min(p.grid.r - 1, int(std::floor((fi + eps) / step)));
    const int r_lo = std::max(0, int(std::ceil((fi - eps - (n - 1)) / step)));
    const int s_hi = std::min(p.grid.s - 1, int(std::floor((fj + eps) / step)));
    const int s_lo = std::max(0, int(std::ceil((fj - eps - (n - 1)) / step)));
    for (int s = s_lo; s <= s_hi; ++s)
        for (int r = r_lo; r <= r_hi; ++r) out.push_back(p.first_subpatch + s * p.grid.r + r);
    return out;
}

double Decomposition::h_min() const {
    double h = INFINITY;
    for (const auto& p : patches) h = std::min(h, p.h_min);
    return h;
}

double Decomposition::h_max() const {
    double h = 0.0;
    for (const auto& p : patches) h = std::max(h, p.h_max);
    return h;
}

nlohmann::json Decomposition::summary() const {
    nlohmann::json j;
    j["n0"] = params.n0;
    j["nv"] = params.nv;
    j["nf"] = params.nf;
    j["h_bar"] = params.h_bar;
    j["total_subpatches"] = subpatches.size();
    j["total_points"] = total_points();
    j["h_min"] = h_min();
    j["h_max"] = h_max();
    auto& arr = j["patches"] = nlohmann::json::array();
    for (std::size_t k = 0; k < patches.size(); ++k) {
        const Patch& p = patches[k];
        nlohmann::json e;
        e["index"] = k;
        e["name"] = p.name;
        e["kind"] = to_string(p.kind());
        e["map"] = p.map->describe();
        e["r"] = p.grid.r;
        e["s"] = p.grid.s;
        e["points"] = {p.grid.points1(), p.grid.points2()};
        e["h_min"] = p.h_min;
        e["h_max"] = p.h_max;
        for (int side = 0; side < 4; ++side)
            e["sides"].push_back({{"external", p.external[std::size_t(side)]},
                                  {"boundary", DomainShape::boundary_name(p.boundary_id[std::size_t(side)])},
                                  {"contacts", p.boundary_contacts[std::size_t(side)]}});
        arr.push_back(std::move(e));
    }
    return j;
}

std::string Decomposition::summary_text() const {
    std::ostringstream s;
    s << patches.size() << " patches, " << subpatches.size() << " subpatches, " << total_points()
      << " grid points (n0=" << params.n0 << ", nv=" << params.nv << ", nf=" << params.nf << ")\n";
    static const char* side_names[] = {"left", "right", "bottom", "top"};
    for (std::size_t k = 0; k < patches.size(); ++k) {
        const Patch& p = patches[k];
        s << "  [" << k << "] " << p.name << " (" << to_string(p.kind()) << ") " << p.map->describe() << "\n"
          << "      r=" << p.grid.r << " s=" << p.grid.s << " grid " << p.grid.points1() << "x" << p.grid.points2()
          << " h_min=" << p.h_min << " h_max=" << p.h_max << "\n      sides:";
        for (int side = 0; side < 4; ++side)
            s << " " << side_names[side] << "="
              << (p.external[std::size_t(side)] ? DomainShape::boundary_name(p.boundary_id[std::size_t(side)])
                                                 : "internal");
        s << "\n";
    }
    return s.str();
}

Decomposition build_decomposition(const DomainShape& domain, std::vector<PatchSpec> specs,
                                  const DecompositionParams& params) {
    if (params.n0 < 1 || params.nv < 1 || params.nf < 1) throw ConfigError("n0, nv, nf must be positive");
    if (specs.empty()) throw GeometryError("decomposition needs at least one patch");
    Decomposition dec;
    dec.domain = domain;
    dec.params = params;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        PatchSpec& spec = specs[k];
        if (!spec.map) throw GeometryError("patch " + std::to_string(k) + " has no map");
        Patch p;
        p.name = spec.name.empty() ? "patch" + std::to_string(k) : spec.name;
        p.map = spec.map;
        p.grid.n0 = params.n0;
        p.grid.nv = params.nv;
        if (spec.r <= 0 || spec.s <= 0) {
            if (!(params.h_bar > 0.0))
                throw ConfigError("patch '" + p.name + "': subpatch counts or h_bar must be given");
            const Mat2 L = sampled_lengths(*spec.map);
            p.grid.r = spec.r > 0 ? spec.r : count_for(L(0, 0), params.h_bar, params.n0, params.nv);
            p.grid.s = spec.s > 0 ? spec.s : count_for(L(1, 1), params.h_bar, params.n0, params.nv);
        } else {
            p.grid.r = spec.r;
            p.grid.s = spec.s;
        }
        measure_spacing(p);
        // The sampled lengths can miss the true maximum by a little; tighten.
        while (params.h_bar > 0.0 && (spec.r <= 0 || spec.s <= 0) && p.h_max > params.h_bar) {
            if (spec.r <= 0) ++p.grid.r;
            if (spec.s <= 0) ++p.grid.s;
            measure_spacing(p);
        }
        spec.r = p.grid.r;
        spec.s = p.grid.s;
        classify_sides(p, domain);
        p.first_subpatch = int(dec.subpatches.size());
        auto subs = decompose_subpatches(*p.map, p.grid, int(k), p.external, p.boundary_id);
        p.subpatch_count = int(subs.size());
        for (auto& sp : subs) dec.subpatches.push_back(std::move(sp));
        dec.patches.push_back(std::move(p));
    }
    dec.specs = std::move(specs);
    return dec;
}

Decomposition refine_decomposition(const Decomposition& dec, int K) {
    if (K < 1) throw ConfigError("refinement factor must be >= 1");
    std::vector<PatchSpec> specs = dec.specs;
    for (auto& s : specs) {
        s.r *= K;
        s.s *= K;
    }
    DecompositionParams params = dec.params;
    params.h_bar = dec.params.h_bar / K;
    return build_decomposition(dec.domain, std::move(specs), params);
}

} // namespace fcsdnn::geometry
