#include "fcsdnn/exchange/comm_plan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::exchange {

using geometry::Decomposition;
using geometry::Subpatch;
using geometry::Vec2;

Field make_field(const Decomposition& dec, double fill) {
    Field f;
    f.reserve(dec.subpatches.size());
    for (const auto& sp : dec.subpatches) f.emplace_back(sp.n, sp.n, fill);
    return f;
}

namespace {

std::array<double, 3> lagrange3(double s) {
    return {0.5 * (s - 1.0) * (s - 2.0), -s * (s - 2.0), 0.5 * s * (s - 1.0)};
}

struct Candidate {
    DonorChoice choice;
    int kind, patch, local;
};

// Lexicographic tie-break key.
auto key(const Candidate& c) { return std::make_tuple(c.kind, c.patch, c.local); }

bool better(const Candidate& a, const Candidate& b) {
    constexpr double tol = 1e-9;
    if (a.choice.depth > b.choice.depth + tol) return true;
    if (b.choice.depth > a.choice.depth + tol) return false;
    return key(a) < key(b);
}

} // namespace

std::array<double, 9> lagrange_weights(double s, double t) {
    const auto ls = lagrange3(s), lt = lagrange3(t);
    std::array<double, 9> w{};
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) w[std::size_t(b * 3 + a)] = ls[std::size_t(a)] * lt[std::size_t(b)];
    return w;
}

double neville_interpolate(const std::array<double, 9>& v, double s, double t) {
    auto neville = [](std::array<double, 3> p, double x) {
        // Nodes 0, 1, 2.
        for (int m = 1; m < 3; ++m)
            for (int k = 0; k + m < 3; ++k)
                // Difference form, so constants come back exactly.
                p[std::size_t(k)] = p[std::size_t(k + 1)] +
                                    (x - (k + m)) * (p[std::size_t(k)] - p[std::size_t(k + 1)]) / double(-m);
        return p[0];
    };
    std::array<double, 3> rows{};
    for (int b = 0; b < 3; ++b)
        rows[std::size_t(b)] =
            neville({v[std::size_t(b * 3)], v[std::size_t(b * 3 + 1)], v[std::size_t(b * 3 + 2)]}, s);
    return neville(rows, t);
}

std::optional<DonorChoice> find_donor(const Decomposition& dec, int sp_id, int i, int j, int nf,
                                      bool require_clean) {
    const Subpatch& A = dec.subpatches[std::size_t(sp_id)];
    const int P = A.patch;
    const int I = A.i0 + i, J = A.j0 + j;

    std::optional<Candidate> best_intra, best_inter;
    auto consider = [&](std::optional<Candidate>& slot, const Candidate& c) {
        if (require_clean && !c.choice.clean) return;
        if (!slot || better(c, *slot)) slot = c;
    };

    for (int b : dec.subpatches_containing(P, I, J)) {
        if (b == sp_id) continue;
        const Subpatch& B = dec.subpatches[std::size_t(b)];
        const int li = I - B.i0, lj = J - B.j0;
        const int depth = B.internal_distance(li, lj);
        Candidate c{{b, true, li, lj, 0.0, 0.0, double(depth), depth >= nf},
                    int(dec.patches[std::size_t(P)].kind()), P, B.local};
        consider(best_intra, c);
    }
    if (best_intra) return best_intra->choice;

    const Vec2 x(A.x(i, j), A.y(i, j));
    for (int p = 0; p < int(dec.patches.size()); ++p) {
        if (p == P) continue;
        const auto hit = dec.locate_in(p, x);
        if (!hit) continue;
        for (int b : dec.subpatches_containing(p, hit->fi, hit->fj)) {
            const Subpatch& B = dec.subpatches[std::size_t(b)];
            const double u = hit->fi - B.i0, v = hit->fj - B.j0;
            const int ci = std::clamp(int(std::floor(u + 0.5)), 1, B.n - 2);
            const int cj = std::clamp(int(std::floor(v + 0.5)), 1, B.n - 2);
            // Internal distance is a min of linear functions, so the stencil
            // corners bound it.
            const int stencil_depth = std::min({B.internal_distance(ci - 1, cj - 1), B.internal_distance(ci + 1, cj - 1),
                                                B.internal_distance(ci - 1, cj + 1), B.internal_distance(ci + 1, cj + 1)});
            Candidate c{{b, false, ci - 1, cj - 1, u - (ci - 1), v - (cj - 1), B.internal_distance(u, v),
                         stencil_depth >= nf},
                        int(dec.patches[std::size_t(p)].kind()), p, B.local};
            consider(best_inter, c);
        }
    }
    if (best_inter) return best_inter->choice;
    return std::nullopt;
}

CommPlan build_comm_plan(const Decomposition& dec, int nf) {
    if (nf < 1) throw ConfigError("n_f must be positive");
    CommPlan plan;
    plan.nf = nf;
    plan.intra_count.assign(dec.subpatches.size(), 0);
    plan.inter_count.assign(dec.subpatches.size(), 0);
    std::vector<Orphan> orphans;
    std::size_t unclean = 0;
    for (int a = 0; a < int(dec.subpatches.size()); ++a) {
        const Subpatch& A = dec.subpatches[std::size_t(a)];
        for (const auto& [i, j] : geometry::fringe_points(A, nf)) {
            const auto d = find_donor(dec, a, i, j, nf, true);
            if (!d) {
                if (find_donor(dec, a, i, j, nf, false)) ++unclean;
                orphans.push_back({a, i, j, A.x(i, j), A.y(i, j)});
                continue;
            }
            const Subpatch& B = dec.subpatches[std::size_t(d->subpatch)];
            Record r;
            r.recv_sp = a;
            r.recv_index = j * A.n + i;
            r.donor_sp = d->subpatch;
            r.intra = d->intra;
            r.donor_index = d->cj * B.n + d->ci;
            r.s = d->s;
            r.t = d->t;
            r.w = d->intra ? std::array<double, 9>{} : lagrange_weights(d->s, d->t);
            (d->intra ? plan.intra_count : plan.inter_count)[std::size_t(a)]++;
            plan.records.push_back(r);
        }
    }
    if (!orphans.empty()) {
        std::ostringstream s;
        s << orphans.size() << " fringe points have no admissible donor (" << unclean
          << " only have donors inside a donor fringe):";
        for (std::size_t k = 0; k < std::min<std::size_t>(orphans.size(), 20); ++k) {
            const auto& o = orphans[k];
            const auto& sp = dec.subpatches[std::size_t(o.subpatch)];
            s << "\n  patch " << sp.patch << " subpatch " << sp.local << " (" << o.i << ", " << o.j << ") at ("
              << o.x << ", " << o.y << ")";
        }
        throw PlanError(s.str());
    }
    return plan;
}

void apply_exchange(const CommPlan& plan, Field& f) {
    const std::size_t n = plan.records.size();
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < n; ++k) {
        const Record& r = plan.records[k];
        const Grid& src = f[std::size_t(r.donor_sp)];
        double v;
        if (r.intra) {
            v = src.data()[r.donor_index];
        } else {
            const int w = src.n1();
            const double* p = src.data() + r.donor_index;
            v = 0.0;
            for (int b = 0; b < 3; ++b)
                for (int a = 0; a < 3; ++a) v += r.w[std::size_t(b * 3 + a)] * p[b * w + a];
        }
        f[std::size_t(r.recv_sp)].data()[r.recv_index] = v;
    }
}

void apply_exchange(const CommPlan& plan, std::span<Field* const> fields) {
    for (Field* f : fields) apply_exchange(plan, *f);
}

nlohmann::json CommPlan::dump() const {
    nlohmann::json j;
    j["nf"] = nf;
    j["records"] = records.size();
    std::size_t intra = 0, inter = 0;
    auto& per = j["subpatches"] = nlohmann::json::array();
    for (std::size_t k = 0; k < intra_count.size(); ++k) {
        intra += std::size_t(intra_count[k]);
        inter += std::size_t(inter_count[k]);
        per.push_back({{"subpatch", k}, {"intra", intra_count[k]}, {"inter", inter_count[k]}});
    }
    j["intra"] = intra;
    j["inter"] = inter;
    j["orphans"] = nlohmann::json::array();
    return j;
}

} // namespace fcsdnn::exchange
