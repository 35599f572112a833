#include "fcsdnn/viscosity/viscosity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::viscosity {

using geometry::Subpatch;

double weight_R(int tau) {
    static constexpr double R[4] = {1.5, 1.0, 0.5, 0.0};
    if (tau < 1 || tau > 4) throw ConfigError("smoothness class must be in 1..4");
    return R[tau - 1];
}

namespace {

void require_positive(const solver::Primitive& w) {
    if (!(w.rho > 0.0) || !(w.p > 0.0)) {
        std::ostringstream s;
        s << "non-positive " << (!(w.rho > 0.0) ? "density" : "pressure") << ": rho = " << w.rho << ", p = " << w.p;
        throw PositivityError(s.str(), {}, -1, -1);
    }
}

std::vector<int> window_starts(int n, int W, int stride) {
    std::vector<int> s;
    if (n < W) return s;
    for (int a = 0; a + W <= n; a += stride) s.push_back(a);
    if (s.back() != n - W) s.push_back(n - W);
    return s;
}

} // namespace

double proxy_variable(const solver::Primitive& w, double gamma) {
    require_positive(w);
    return std::hypot(w.u, w.v) * std::sqrt(w.rho / (gamma * w.p));
}

double mwsb(const solver::Primitive& w, double gamma) {
    require_positive(w);
    return std::abs(w.u) + std::abs(w.v) + solver::sound_speed(w, gamma);
}

double window_weight(double x, int c, int r, double h) {
    if (!(h > 0.0)) throw ConfigError("window_weight: h must be positive");
    const double a = std::abs(x), flat = 0.5 * c * h;
    if (a < flat) return 1.0;
    if (a > flat + r * h) return 0.0;
    const double cs = std::cos(std::numbers::pi * (a - flat) / (2.0 * r * h));
    return cs * cs;
}

TauGrid classify_subpatch(const Grid& phi, const Subpatch& sp, const sdnn::SmoothnessClassifier& classifier, int nv,
                          int stride) {
    const int n = sp.n, W = classifier.window();
    if (phi.n1() != n || phi.n2() != n) throw ConfigError("classify_subpatch: field does not match the subpatch grid");
    if (stride < 1) throw ConfigError("classify_subpatch: stride must be positive");
    TauGrid best(n, n, 4);
    const auto starts = window_starts(n, W, stride);
    if (!starts.empty()) {
        const Eigen::Index per_line = Eigen::Index(starts.size());
        Eigen::MatrixXd windows(W, 2 * n * per_line);
        for (int dir = 0; dir < 2; ++dir)
            for (int line = 0; line < n; ++line)
                for (Eigen::Index k = 0; k < per_line; ++k) {
                    const Eigen::Index col = (Eigen::Index(dir) * n + line) * per_line + k;
                    for (int t = 0; t < W; ++t) {
                        const int a = starts[std::size_t(k)] + t;
                        windows(t, col) = dir == 0 ? phi(a, line) : phi(line, a);
                    }
                }
        std::vector<int> tau(std::size_t(windows.cols()));
        classifier.classify(windows, tau.data());
        for (int dir = 0; dir < 2; ++dir)
            for (int line = 0; line < n; ++line)
                for (Eigen::Index k = 0; k < per_line; ++k) {
                    const int t = tau[std::size_t((Eigen::Index(dir) * n + line) * per_line + k)];
                    for (int a = starts[std::size_t(k)]; a < starts[std::size_t(k)] + W; ++a) {
                        int& b = dir == 0 ? best(a, line) : best(line, a);
                        b = std::min(b, t);
                    }
                }
    }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (!in_generation_set(sp, i, j, nv)) best(i, j) = 0;
    return best;
}

Grid preliminary_viscosity(const TauGrid& tau, const Grid& S, double hhat) {
    const int n1 = S.n1(), n2 = S.n2();
    if (tau.n1() != n1 || tau.n2() != n2) throw ConfigError("preliminary_viscosity: grids do not match");
    constexpr int half = 3;
    Grid rowmax(n1, n2), out(n1, n2, 0.0);
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            double m = S(i, j);
            for (int a = std::max(0, i - half); a <= std::min(n1 - 1, i + half); ++a) m = std::max(m, S(a, j));
            rowmax(i, j) = m;
        }
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            const int t = tau(i, j);
            if (t == 0 || t == 4) continue;
            double m = rowmax(i, j);
            for (int b = std::max(0, j - half); b <= std::min(n2 - 1, j + half); ++b) m = std::max(m, rowmax(i, b));
            out(i, j) = weight_R(t) * m * hhat;
        }
    return out;
}

BlendPlan::BlendPlan(const geometry::Decomposition& dec, int nv, int r) : nv_(nv), r_(r) {
    if (r < 1) throw ConfigError("blend window half-width must be positive");
    for (int k = -(r - 1); k <= r - 1; ++k) w_.push_back(window_weight(double(k), 0, r, 1.0));

    const std::size_t S = dec.subpatches.size();
    mask_.resize(S);
    offsets_.resize(S);
    entries_.resize(S);
    for (std::size_t s = 0; s < S; ++s) {
        const Subpatch& sp = dec.subpatches[s];
        mask_[s].assign(std::size_t(sp.n) * sp.n, 0);
        for (int j = 0; j < sp.n; ++j)
            for (int i = 0; i < sp.n; ++i) mask_[s][std::size_t(j) * sp.n + i] = in_generation_set(sp, i, j, nv);
    }

    den_ = exchange::make_field(dec);
    {
        Grid ones, tmp;
        for (std::size_t s = 0; s < S; ++s) {
            ones = Grid(dec.subpatches[s].n, dec.subpatches[s].n, 1.0);
            convolve(ones, mask_[s], den_[s], tmp);
        }
    }

    std::vector<std::string> errors;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < std::ptrdiff_t(S); ++t) {
        const Subpatch& T = dec.subpatches[std::size_t(t)];
        auto& off = offsets_[std::size_t(t)];
        auto& ent = entries_[std::size_t(t)];
        off.assign(std::size_t(T.n) * T.n + 1, 0);
        for (int j = 0; j < T.n; ++j)
            for (int i = 0; i < T.n; ++i) {
                const std::size_t k = std::size_t(j) * T.n + i;
                const geometry::Vec2 x(T.x(i, j), T.y(i, j));
                auto add = [&](int sp, double fi, double fj) {
                    const Subpatch& D = dec.subpatches[std::size_t(sp)];
                    const int a = std::clamp(int(std::floor(fi + 0.5)) - D.i0, 0, D.n - 1);
                    const int b = std::clamp(int(std::floor(fj + 0.5)) - D.j0, 0, D.n - 1);
                    ent.push_back({sp, b * D.n + a});
                };
                for (int p = 0; p < int(dec.patches.size()); ++p) {
                    if (p == T.patch) {
                        const double fi = T.i0 + i, fj = T.j0 + j;
                        for (int sp : dec.subpatches_containing(p, fi, fj)) add(sp, fi, fj);
                    } else if (const auto hit = dec.locate_in(p, x, 1e-10)) {
                        for (int sp : dec.subpatches_containing(p, hit->fi, hit->fj)) add(sp, hit->fi, hit->fj);
                    }
                }
                off[k + 1] = ent.size();
                double d = 0.0;
                for (std::size_t e = off[k]; e < off[k + 1]; ++e)
                    d += den_[std::size_t(ent[e].subpatch)].vec()[std::size_t(ent[e].index)];
                if (!(d > 0.0)) {
#pragma omp critical
                    {
                        std::ostringstream s;
                        s << "subpatch " << t << " (" << i << ", " << j << ") at (" << x.x() << ", " << x.y() << ")";
                        errors.push_back(s.str());
                    }
                }
            }
    }
    if (!errors.empty()) {
        std::sort(errors.begin(), errors.end());
        std::ostringstream s;
        s << errors.size() << " grid points are covered by no viscosity-generation window, e.g.";
        for (std::size_t k = 0; k < std::min<std::size_t>(errors.size(), 10); ++k) s << "\n  " << errors[k];
        throw PlanError(s.str());
    }
}

void BlendPlan::convolve(const Grid& in, const std::vector<char>& mask, Grid& out, Grid& tmp) const {
    const int n1 = in.n1(), n2 = in.n2(), R = r_ - 1;
    tmp = Grid(n1, n2, 0.0);
    out = Grid(n1, n2, 0.0);
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            double acc = 0.0;
            for (int a = std::max(0, i - R); a <= std::min(n1 - 1, i + R); ++a) {
                const std::size_t k = std::size_t(j) * n1 + a;
                if (mask[k]) acc += w_[std::size_t(a - i + R)] * in.vec()[k];
            }
            tmp(i, j) = acc;
        }
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            double acc = 0.0;
            for (int b = std::max(0, j - R); b <= std::min(n2 - 1, j + R); ++b)
                acc += w_[std::size_t(b - j + R)] * tmp(i, b);
            out(i, j) = acc;
        }
}

void BlendPlan::apply(const exchange::Field& mu_hat, exchange::Field& mu) const {
    const std::size_t S = mask_.size();
    if (mu_hat.size() != S) throw ConfigError("blend: field does not match the plan");
    exchange::Field num(S);
#pragma omp parallel
    {
        Grid tmp;
#pragma omp for schedule(dynamic)
        for (std::ptrdiff_t s = 0; s < std::ptrdiff_t(S); ++s)
            convolve(mu_hat[std::size_t(s)], mask_[std::size_t(s)], num[std::size_t(s)], tmp);
    }
    if (mu.size() != S) mu.resize(S);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < std::ptrdiff_t(S); ++t) {
        const Grid& ref = mu_hat[std::size_t(t)];
        Grid& out = mu[std::size_t(t)];
        if (out.n1() != ref.n1() || out.n2() != ref.n2()) out = Grid(ref.n1(), ref.n2());
        const auto& off = offsets_[std::size_t(t)];
        const auto& ent = entries_[std::size_t(t)];
        for (std::size_t k = 0; k + 1 < off.size(); ++k) {
            double a = 0.0, d = 0.0;
            for (std::size_t e = off[k]; e < off[k + 1]; ++e) {
                a += num[std::size_t(ent[e].subpatch)].vec()[std::size_t(ent[e].index)];
                d += den_[std::size_t(ent[e].subpatch)].vec()[std::size_t(ent[e].index)];
            }
            out.vec()[k] = a / d;
        }
    }
}

double BlendPlan::mean_fan_in() const {
    std::size_t e = 0, p = 0;
    for (std::size_t s = 0; s < entries_.size(); ++s) {
        e += entries_[s].size();
        p += offsets_[s].size() - 1;
    }
    return p ? double(e) / double(p) : 0.0;
}

ViscosityOperator::ViscosityOperator(const geometry::Decomposition& dec,
                                     std::shared_ptr<const sdnn::SmoothnessClassifier> classifier,
                                     ViscosityParams params)
    : dec_(&dec), classifier_(std::move(classifier)), params_(params), plan_(dec, params.nv, params.window_r) {
    if (!classifier_) throw ConfigError("viscosity operator needs a classifier");
}

exchange::Field ViscosityOperator::compute(const solver::State& state, ViscosityDiagnostics* diag) const {
    exchange::Field mu;
    compute(state, mu, diag);
    return mu;
}

void ViscosityOperator::compute(const solver::State& state, exchange::Field& mu, ViscosityDiagnostics* diag) const {
    const auto& dec = *dec_;
    const std::size_t S = dec.subpatches.size();
    exchange::Field mu_hat(S);
    SmoothnessField taus(S);
    std::vector<PointLocation> bad(S);
    std::vector<std::string> why(S);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < std::ptrdiff_t(S); ++s) {
        const Subpatch& sp = dec.subpatches[std::size_t(s)];
        Grid phi(sp.n, sp.n), speed(sp.n, sp.n);
        bool ok = true;
        for (std::size_t k = 0; k < phi.size() && ok; ++k) {
            const auto w = solver::to_primitive(solver::at(state, int(s), k), params_.gamma);
            try {
                phi.vec()[k] = proxy_variable(w, params_.gamma);
                speed.vec()[k] = mwsb(w, params_.gamma);
            } catch (const PositivityError& e) {
                const int i = int(k % std::size_t(sp.n)), j = int(k / std::size_t(sp.n));
                bad[std::size_t(s)] = {sp.patch, int(s), i, j, sp.x(i, j), sp.y(i, j)};
                why[std::size_t(s)] = e.what();
                ok = false;
            }
        }
        if (!ok) continue;
        taus[std::size_t(s)] = classify_subpatch(phi, sp, *classifier_, params_.nv, params_.stride);
        mu_hat[std::size_t(s)] =
            preliminary_viscosity(taus[std::size_t(s)], speed, dec.patches[std::size_t(sp.patch)].h_max);
    }
    for (std::size_t s = 0; s < S; ++s)
        if (bad[s].subpatch >= 0) throw PositivityError(why[s], bad[s], -1, -1);
    plan_.apply(mu_hat, mu);
    if (diag) {
        diag->tau = std::move(taus);
        diag->mu_hat = std::move(mu_hat);
    }
}

} // namespace fcsdnn::viscosity
