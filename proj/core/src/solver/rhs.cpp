#include "fcsdnn/solver/rhs.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::solver {

struct RhsOperator::Workspace {
    std::vector<double> f, a, b, gx, gy, theta, E, p;
    std::vector<double> dx[4], dy[4]; // rho, rho u, rho v, theta (adiabatic path)

    void resize(std::size_t K) {
        if (f.size() == K) return;
        for (auto* v : {&f, &a, &b, &gx, &gy, &theta, &E, &p}) v->assign(K, 0.0);
        for (int c = 0; c < 4; ++c) {
            dx[c].assign(K, 0.0);
            dy[c].assign(K, 0.0);
        }
    }
};

RhsOperator::RhsOperator(const geometry::Decomposition& dec, std::shared_ptr<const BoundaryOperator> bc,
                         double gamma)
    : dec_(&dec), bc_(std::move(bc)), gamma_(gamma) {
    if (!bc_) throw ConfigError("RhsOperator needs a boundary operator");
    engine_.reserve(dec.subpatches.size());
    for (auto& sp : dec.subpatches) engine_.push_back(fc::line_engine(sp.n));
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    ws_.resize(std::size_t(threads));
    for (auto& w : ws_) w = std::make_unique<Workspace>();
}

RhsOperator::~RhsOperator() = default;
RhsOperator::RhsOperator(RhsOperator&&) noexcept = default;
RhsOperator& RhsOperator::operator=(RhsOperator&&) noexcept = default;

RhsOperator::Workspace& RhsOperator::workspace() const {
    int t = 0;
#ifdef _OPENMP
    t = omp_get_thread_num();
#endif
    return *ws_.at(std::size_t(t));
}

void RhsOperator::evaluate(const State& state, const exchange::Field* mu, State& out) const {
    const int N = int(dec_->subpatches.size());
    std::vector<std::optional<PointLocation>> bad(static_cast<std::size_t>(N));
#pragma omp parallel for schedule(dynamic)
    for (int sp = 0; sp < N; ++sp) {
        PointLocation where;
        if (!evaluate_subpatch(sp, state, mu ? &(*mu)[std::size_t(sp)] : nullptr, out, &where))
            bad[std::size_t(sp)] = where;
    }
    for (auto& b : bad)
        if (b) throw PositivityError("non-positive density or pressure in the right-hand side", *b, -1, -1);
}

bool RhsOperator::evaluate_subpatch(int spi, const State& state, const Grid* mu, State& out,
                                    PointLocation* where) const {
    const auto& sp = dec_->subpatches[std::size_t(spi)];
    const auto& eng = *engine_[std::size_t(spi)];
    const int n = sp.n;
    const std::size_t K = std::size_t(n) * std::size_t(n);
    auto& w = workspace();
    w.resize(K);
    const double g1 = gamma_ - 1.0;

    const double* rho = state[0][std::size_t(spi)].data();
    const double* mx = state[1][std::size_t(spi)].data();
    const double* my = state[2][std::size_t(spi)].data();
    const double* en = state[3][std::size_t(spi)].data();
    double* o[4];
    for (int c = 0; c < 4; ++c) o[c] = out[std::size_t(c)][std::size_t(spi)].data();
    const double* q1x = sp.q1x.data();
    const double* q1y = sp.q1y.data();
    const double* q2x = sp.q2x.data();
    const double* q2y = sp.q2y.data();

    auto d1 = [&](const std::vector<double>& in, std::vector<double>& res) {
        eng.differentiate({in.data(), n, 1, n}, {res.data(), n, 1, n}, sp.h1);
    };
    auto d2 = [&](const std::vector<double>& in, std::vector<double>& res) {
        eng.differentiate({in.data(), n, n, 1}, {res.data(), n, n, 1}, sp.h2);
    };

    for (std::size_t k = 0; k < K; ++k) {
        const double p = g1 * (en[k] - 0.5 * (mx[k] * mx[k] + my[k] * my[k]) / rho[k]);
        w.p[k] = p;
        if (!(rho[k] > 0.0) || !(p > 0.0)) {
            if (where) {
                const int i = int(k % std::size_t(n)), j = int(k / std::size_t(n));
                *where = {sp.patch, spi, i, j, sp.x(i, j), sp.y(i, j)};
            }
            return false;
        }
    }

    const bool adiabatic = bc_->has_adiabatic(spi);
    if (!adiabatic) {
        for (int c = 0; c < 4; ++c) {
            // x-flux
            for (std::size_t k = 0; k < K; ++k) {
                const double u = mx[k] / rho[k];
                switch (c) {
                case 0: w.f[k] = mx[k]; break;
                case 1: w.f[k] = mx[k] * u + w.p[k]; break;
                case 2: w.f[k] = my[k] * u; break;
                default: w.f[k] = u * (en[k] + w.p[k]); break;
                }
            }
            d1(w.f, w.a);
            d2(w.f, w.b);
            for (std::size_t k = 0; k < K; ++k) o[c][k] = -(q1x[k] * w.a[k] + q2x[k] * w.b[k]);
            // y-flux
            for (std::size_t k = 0; k < K; ++k) {
                const double v = my[k] / rho[k];
                switch (c) {
                case 0: w.f[k] = my[k]; break;
                case 1: w.f[k] = mx[k] * v; break;
                case 2: w.f[k] = my[k] * v + w.p[k]; break;
                default: w.f[k] = v * (en[k] + w.p[k]); break;
                }
            }
            d1(w.f, w.a);
            d2(w.f, w.b);
            for (std::size_t k = 0; k < K; ++k) o[c][k] -= q1y[k] * w.a[k] + q2y[k] * w.b[k];
        }
    } else {
        Grid theta(n, n);
        for (std::size_t k = 0; k < K; ++k) theta.vec()[k] = w.p[k] / rho[k];
        bc_->adiabatic_theta(spi, theta);
        std::copy(theta.vec().begin(), theta.vec().end(), w.theta.begin());
        const double* src[4] = {rho, mx, my, w.theta.data()};
        for (int c = 0; c < 4; ++c) {
            std::copy(src[c], src[c] + K, w.f.begin());
            d1(w.f, w.a);
            d2(w.f, w.b);
            for (std::size_t k = 0; k < K; ++k) {
                w.dx[c][k] = q1x[k] * w.a[k] + q2x[k] * w.b[k];
                w.dy[c][k] = q1y[k] * w.a[k] + q2y[k] * w.b[k];
            }
        }
        for (std::size_t k = 0; k < K; ++k) {
            const double r = rho[k], u = mx[k] / r, v = my[k] / r, th = w.theta[k];
            const double p = r * th;
            const double E = p / g1 + 0.5 * r * (u * u + v * v);
            const double H = (E + p) / r;
            const double rx = w.dx[0][k], ry = w.dy[0][k];
            const double mxx = w.dx[1][k], mxy = w.dy[1][k];
            const double myx = w.dx[2][k], myy = w.dy[2][k];
            const double px = th * rx + r * w.dx[3][k];
            const double py = th * ry + r * w.dy[3][k];
            const double ke = 0.5 * (u * u + v * v);
            const double Ex = px / g1 + u * mxx + v * myx - ke * rx;
            const double Ey = py / g1 + u * mxy + v * myy - ke * ry;
            const double Hx = (Ex + px - H * rx) / r;
            const double Hy = (Ey + py - H * ry) / r;
            o[0][k] = -(mxx + myy);
            o[1][k] = -((2.0 * u * mxx - u * u * rx + px) + (v * mxy + u * myy - u * v * ry));
            o[2][k] = -((v * mxx + u * myx - u * v * rx) + (2.0 * v * myy - v * v * ry + py));
            o[3][k] = -((H * mxx + mx[k] * Hx) + (H * myy + my[k] * Hy));
            // dE replaces dtheta for the viscous gradient.
            w.dx[3][k] = Ex;
            w.dy[3][k] = Ey;
        }
    }

    if (!mu) return true;
    const double* m = mu->data();
    if (*std::max_element(m, m + K) <= 0.0) return true;

    const double* ev[4] = {rho, mx, my, en};
    for (int c = 0; c < 4; ++c) {
        if (adiabatic) {
            for (std::size_t k = 0; k < K; ++k) {
                w.gx[k] = m[k] * w.dx[c][k];
                w.gy[k] = m[k] * w.dy[c][k];
            }
        } else {
            std::copy(ev[c], ev[c] + K, w.f.begin());
            d1(w.f, w.a);
            d2(w.f, w.b);
            for (std::size_t k = 0; k < K; ++k) {
                w.gx[k] = m[k] * (q1x[k] * w.a[k] + q2x[k] * w.b[k]);
                w.gy[k] = m[k] * (q1y[k] * w.a[k] + q2y[k] * w.b[k]);
            }
        }
        d1(w.gx, w.a);
        d2(w.gx, w.b);
        for (std::size_t k = 0; k < K; ++k) o[c][k] += q1x[k] * w.a[k] + q2x[k] * w.b[k];
        d1(w.gy, w.a);
        d2(w.gy, w.b);
        for (std::size_t k = 0; k < K; ++k) o[c][k] += q1y[k] * w.a[k] + q2y[k] * w.b[k];
    }
    return true;
}

} // namespace fcsdnn::solver
