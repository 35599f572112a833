#include "fcsdnn/solver/ownership.hpp"

namespace fcsdnn::solver {

OwnershipMask ownership_partition(const geometry::Decomposition& dec) {
    const int N = int(dec.subpatches.size());
    OwnershipMask mask(static_cast<std::size_t>(N));
#pragma omp parallel for schedule(dynamic)
    for (int spi = 0; spi < N; ++spi) {
        const auto& sp = dec.subpatches[std::size_t(spi)];
        const int n = sp.n;
        auto& m = mask[std::size_t(spi)];
        m.assign(std::size_t(n) * std::size_t(n), 0);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double own = sp.internal_distance(i, j);
                const geometry::Vec2 x(sp.x(i, j), sp.y(i, j));
                bool mine = true;
                auto beats = [&](int other, double depth) {
                    constexpr double tie = 1e-9;
                    return depth > own + tie || (depth > own - tie && other < spi);
                };
                // Same patch: exact shared indices.
                for (int o : dec.subpatches_containing(sp.patch, sp.i0 + i, sp.j0 + j)) {
                    if (o == spi) continue;
                    const auto& c = dec.subpatches[std::size_t(o)];
                    if (beats(o, c.internal_distance(double(sp.i0 + i - c.i0), double(sp.j0 + j - c.j0)))) {
                        mine = false;
                        break;
                    }
                }
                for (int p = 0; mine && p < int(dec.patches.size()); ++p) {
                    if (p == sp.patch) continue;
                    const auto hit = dec.locate_in(p, x, 1e-12);
                    if (!hit) continue;
                    for (int o : dec.subpatches_containing(p, hit->fi, hit->fj)) {
                        const auto& c = dec.subpatches[std::size_t(o)];
                        if (beats(o, c.internal_distance(hit->fi - c.i0, hit->fj - c.j0))) {
                            mine = false;
                            break;
                        }
                    }
                }
                m[std::size_t(j) * std::size_t(n) + std::size_t(i)] = mine ? 1 : 0;
            }
    }
    return mask;
}

std::size_t owned_count(const OwnershipMask& mask) {
    std::size_t c = 0;
    for (auto& m : mask)
        for (auto v : m) c += v;
    return c;
}

double owned_integral(const exchange::Field& f, const geometry::Decomposition& dec, const OwnershipMask& mask) {
    double s = 0.0;
    for (std::size_t sp = 0; sp < dec.subpatches.size(); ++sp) {
        const auto& g = dec.subpatches[sp];
        const auto& a = g.area.vec();
        const auto& v = f[sp].vec();
        const int n = g.n;
        // Trapezoid weights on the physical boundary.
        auto edge = [&](int idx, geometry::Side lo, geometry::Side hi) {
            return (idx == 0 && g.external[lo]) || (idx == n - 1 && g.external[hi]) ? 0.5 : 1.0;
        };
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const auto k = std::size_t(j) * std::size_t(n) + std::size_t(i);
                if (mask[sp][k])
                    s += v[k] * a[k] * edge(i, geometry::kLeft, geometry::kRight) *
                         edge(j, geometry::kBottom, geometry::kTop);
            }
    }
    return s;
}

} // namespace fcsdnn::solver
