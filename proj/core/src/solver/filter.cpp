#include "fcsdnn/solver/filter.hpp"

#include <algorithm>
#include <cmath>

#include "fcsdnn/fc/spectral.hpp"
#include "fcsdnn/viscosity/viscosity.hpp"

namespace fcsdnn::solver {

namespace {

// rho, rho u, rho v, theta of one subpatch.
std::array<std::vector<double>, 4> filtered_variables(const State& s, std::size_t sp, double gamma) {
    const auto K = s[0][sp].size();
    std::array<std::vector<double>, 4> F;
    for (int c = 0; c < 3; ++c) F[std::size_t(c)] = s[std::size_t(c)][sp].vec();
    F[3].resize(K);
    for (std::size_t k = 0; k < K; ++k) F[3][k] = temperature(to_primitive(at(s, int(sp), k), gamma));
    return F;
}

void store_variables(State& s, std::size_t sp, const std::array<std::vector<double>, 4>& F, double gamma) {
    const auto K = F[0].size();
    for (int c = 0; c < 3; ++c) s[std::size_t(c)][sp].vec() = F[std::size_t(c)];
    auto& E = s[3][sp].vec();
    for (std::size_t k = 0; k < K; ++k) {
        const double r = F[0][k];
        E[k] = total_energy_from_theta(r, F[1][k] / r, F[2][k] / r, F[3][k], gamma);
    }
}

} // namespace

void subpatch_filter(State& state, const geometry::Decomposition& dec, const FilterParams& params, double gamma) {
    const int N = int(dec.subpatches.size());
#pragma omp parallel for schedule(dynamic)
    for (int spi = 0; spi < N; ++spi) {
        const auto sp = std::size_t(spi);
        const int n = dec.subpatches[sp].n;
        const auto eng = fc::line_engine(n);
        const auto sigma = eng->filter_factors(params.alpha, params.order);
        auto F = filtered_variables(state, sp, gamma);
        std::vector<double> tmp(F[0].size());
        for (auto& f : F) {
            eng->filter({f.data(), n, 1, n}, {tmp.data(), n, 1, n}, sigma);
            eng->filter({tmp.data(), n, n, 1}, {f.data(), n, n, 1}, sigma);
        }
        store_variables(state, sp, F, gamma);
    }
}

std::vector<double> smear_window(std::span<const int> jumps, int n, int c, int r) {
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    if (jumps.empty()) return w;
    std::vector<int> z(jumps.begin(), jumps.end());
    std::sort(z.begin(), z.end());
    const double reach = 2.0 * (0.5 * c + r);
    std::size_t g = 0;
    while (g < z.size()) {
        std::size_t e = g;
        while (e + 1 < z.size() && z[e + 1] - z[e] < reach) ++e;
        const double zl = z[g] + 0.5, zr = z[e] + 0.5;
        for (int x = 0; x < n; ++x) {
            double v = 1.0;
            if (x < zl) v = viscosity::window_weight(x - zl, c, r, 1.0);
            else if (x > zr) v = viscosity::window_weight(x - zr, c, r, 1.0);
            w[std::size_t(x)] = std::max(w[std::size_t(x)], v);
        }
        g = e + 1;
    }
    return w;
}

std::vector<int> detect_jumps(const double* base, std::ptrdiff_t stride, int n, double range, double threshold) {
    std::vector<int> out;
    if (!(range > 0.0)) return out;
    for (int k = 0; k + 1 < n; ++k)
        if (std::abs(base[(k + 1) * stride] - base[k * stride]) > threshold * range) out.push_back(k);
    return out;
}

int localized_initial_filter(State& state, const geometry::Decomposition& dec, const SmearParams& params,
                             double gamma) {
    const int N = int(dec.subpatches.size());
    std::vector<char> touched(static_cast<std::size_t>(N), 0);
#pragma omp parallel for schedule(dynamic)
    for (int spi = 0; spi < N; ++spi) {
        const auto sp = std::size_t(spi);
        const int n = dec.subpatches[sp].n;
        const auto eng = fc::line_engine(n);
        const auto sigma = eng->filter_factors(params.alpha, params.order);
        auto F = filtered_variables(state, sp, gamma);
        std::vector<double> line(static_cast<std::size_t>(n));
        for (int dir = 0; dir < 2; ++dir) {
            const std::ptrdiff_t es = dir == 0 ? 1 : n, ls = dir == 0 ? n : 1;
            for (auto& f : F) {
                const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
                const double range = *hi - *lo;
                for (int l = 0; l < n; ++l) {
                    double* base = f.data() + l * ls;
                    const auto jumps = detect_jumps(base, es, n, range, params.threshold);
                    if (jumps.empty()) continue;
                    eng->filter({base, 1, es, 0}, {line.data(), 1, 1, 0}, sigma);
                    const auto w = smear_window(jumps, n, params.c, params.r);
                    for (int k = 0; k < n; ++k) {
                        const auto wk = w[std::size_t(k)];
                        base[k * es] = wk * line[std::size_t(k)] + (1.0 - wk) * base[k * es];
                    }
                    touched[sp] = 1;
                }
            }
        }
        if (touched[sp]) store_variables(state, sp, F, gamma);
    }
    return int(std::count(touched.begin(), touched.end(), 1));
}

} // namespace fcsdnn::solver
