#include "fcsdnn/io/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fcsdnn/fc/spectral.hpp"
#include "fcsdnn/util/error.hpp"

namespace fcsdnn::io {

void physical_gradient(const exchange::Field& f, const geometry::Decomposition& dec, exchange::Field& fx,
                       exchange::Field& fy) {
    fx = exchange::make_field(dec);
    fy = exchange::make_field(dec);
    const int N = int(dec.subpatches.size());
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < N; ++k) {
        const auto& sp = dec.subpatches[std::size_t(k)];
        const int n = sp.n;
        const auto eng = fc::line_engine(n);
        std::vector<double> d1(std::size_t(n) * std::size_t(n)), d2(d1.size());
        const double* in = f[std::size_t(k)].data();
        eng->differentiate({in, n, 1, n}, {d1.data(), n, 1, n}, sp.h1);
        eng->differentiate({in, n, n, 1}, {d2.data(), n, n, 1}, sp.h2);
        auto& gx = fx[std::size_t(k)].vec();
        auto& gy = fy[std::size_t(k)].vec();
        for (std::size_t p = 0; p < d1.size(); ++p) {
            gx[p] = sp.q1x.vec()[p] * d1[p] + sp.q2x.vec()[p] * d2[p];
            gy[p] = sp.q1y.vec()[p] * d1[p] + sp.q2y.vec()[p] * d2[p];
        }
    }
}

std::optional<double> interpolate_at(const exchange::Field& f, const geometry::Decomposition& dec,
                                     const geometry::Vec2& x) {
    int best = -1;
    double best_depth = -1.0, bi = 0.0, bj = 0.0;
    for (const auto& hit : dec.locate(x, 1e-10)) {
        for (int k : dec.subpatches_containing(hit.patch, hit.fi, hit.fj)) {
            const auto& sp = dec.subpatches[std::size_t(k)];
            const double li = hit.fi - sp.i0, lj = hit.fj - sp.j0;
            const double depth = sp.internal_distance(li, lj);
            if (depth > best_depth) {
                best = k;
                best_depth = depth;
                bi = li;
                bj = lj;
            }
        }
    }
    if (best < 0) return std::nullopt;
    const auto& sp = dec.subpatches[std::size_t(best)];
    const auto& g = f[std::size_t(best)];
    auto corner = [&](double l) { return std::clamp(int(std::lround(l)) - 1, 0, sp.n - 3); };
    const int ci = corner(bi), cj = corner(bj);
    std::array<double, 9> v{};
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) v[std::size_t(b * 3 + a)] = g(ci + a, cj + b);
    return exchange::neville_interpolate(v, bi - ci, bj - cj);
}

exchange::Field schlieren(const exchange::Field& rho, const geometry::Decomposition& dec,
                          const solver::OwnershipMask& mask, double beta) {
    exchange::Field gx, gy;
    physical_gradient(rho, dec, gx, gy);
    auto mag = exchange::make_field(dec);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t k = 0; k < dec.subpatches.size(); ++k)
        for (std::size_t p = 0; p < mag[k].size(); ++p) {
            const double m = std::hypot(gx[k].vec()[p], gy[k].vec()[p]);
            mag[k].vec()[p] = m;
            if (mask[k][p]) {
                lo = std::min(lo, m);
                hi = std::max(hi, m);
            }
        }
    const double range = hi - lo;
    // Differentiation round-off of a constant field is not a gradient.
    const bool flat = !(range > 1e-12 * std::max(1.0, std::abs(hi)));
    for (auto& g : mag)
        for (double& m : g.vec()) m = flat ? 1.0 : std::exp(-beta * std::clamp((m - lo) / range, 0.0, 1.0));
    return mag;
}

StandoffResult measure_standoff(const exchange::Field& rho, const geometry::Decomposition& dec,
                                const geometry::CylinderChannel& layout, const StandoffOptions& opts) {
    exchange::Field gx, gy;
    physical_gradient(rho, dec, gx, gy);
    StandoffResult r;
    r.x_leading_edge = layout.center.x() - layout.radius;
    const double y = layout.center.y();
    const double h = opts.spacing > 0.0 ? opts.spacing : 0.5 * dec.h_min();
    const double x0 = layout.lo.x();
    const int m = int(std::floor((r.x_leading_edge - x0) / h));
    std::vector<double> xs, ds;
    double scale = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double x = std::min(x0 + k * h, r.x_leading_edge);
        if (auto v = interpolate_at(gx, dec, {x, y})) {
            xs.push_back(x);
            ds.push_back(std::abs(*v));
            if (auto rv = interpolate_at(rho, dec, {x, y})) scale = std::max(scale, std::abs(*rv));
        }
    }
    r.samples = int(xs.size());
    if (r.samples < 5) throw Error("standoff: too few samples on the stagnation line");
    auto sorted = ds;
    std::nth_element(sorted.begin(), sorted.begin() + std::ptrdiff_t(sorted.size() / 2), sorted.end());
    r.median = sorted[sorted.size() / 2];
    const auto it = std::max_element(ds.begin(), ds.end());
    r.peak = *it;
    // A flat field has round-off gradients whose ratio to the median is arbitrary.
    const bool flat = !(r.peak > opts.flat_tolerance * scale / h);
    if (flat || !(r.peak > opts.noise_factor * r.median)) {
        std::ostringstream os;
        os << "standoff: no bow shock on the stagnation line (peak |drho/dx| " << r.peak << " <= " << opts.noise_factor
           << " x median " << r.median << ")";
        throw Error(os.str());
    }
    const auto k = std::size_t(it - ds.begin());
    r.x_shock = xs[k];
    if (k > 0 && k + 1 < ds.size()) {
        const double a = ds[k - 1], b = ds[k], c = ds[k + 1];
        const double den = a - 2 * b + c;
        if (den < 0.0) r.x_shock += 0.5 * (a - c) / den * (xs[k + 1] - xs[k]);
    }
    r.ratio = (r.x_leading_edge - r.x_shock) / (2.0 * layout.radius);
    return r;
}

double billig_standoff(double mach, double lambda1, double lambda2) {
    if (!(mach > 0.0)) throw ConfigError("Mach number must be positive");
    return lambda1 * std::exp(lambda2 / (mach * mach));
}

} // namespace fcsdnn::io
