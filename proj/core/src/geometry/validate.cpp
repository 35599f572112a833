#include "fcsdnn/geometry/validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fcsdnn/exchange/comm_plan.hpp"

namespace fcsdnn::geometry {

namespace {

const char* side_name(int s) {
    static const char* names[] = {"left", "right", "bottom", "top"};
    return names[s];
}

bool covered_by_other(const Decomposition& dec, int patch, const Vec2& x) {
    for (int p = 0; p < int(dec.patches.size()); ++p)
        if (p != patch && dec.locate_in(p, x)) return true;
    return false;
}

} // namespace

bool ValidationReport::ok() const {
    bool spacing_ok = std::all_of(spacing.begin(), spacing.end(), [](const auto& s) { return s.within_bound; });
    return overlap.empty() && donor_total == 0 && spacing_ok && uncovered_samples == 0 && outside_domain_samples == 0;
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json j;
    j["ok"] = ok();
    for (const auto& o : overlap)
        j["overlap_violations"].push_back({{"patch", o.patch},
                                           {"side", side_name(o.side)},
                                           {"uncovered", o.uncovered},
                                           {"example", {o.example.x(), o.example.y()}}});
    if (!j.contains("overlap_violations")) j["overlap_violations"] = nlohmann::json::array();
    j["donor_violations_total"] = donor_total;
    j["donor_violations"] = nlohmann::json::array();
    for (const auto& d : donor)
        j["donor_violations"].push_back(
            {{"subpatch", d.subpatch}, {"i", d.i}, {"j", d.j}, {"x", d.x}, {"y", d.y}, {"orphan", d.orphan}});
    for (const auto& s : spacing)
        j["spacing"].push_back({{"patch", s.patch}, {"h_min", s.h_min}, {"h_max", s.h_max}, {"ok", s.within_bound}});
    j["coverage"] = {{"samples", coverage_samples}, {"uncovered", uncovered_samples}};
    j["patch_samples_outside_domain"] = outside_domain_samples;
    j["boundary_rule_warnings"] = boundary_rule_warnings;
    j["min_abs_det_J"] = min_abs_det_J;
    j["max_inverse_residual"] = max_inverse_residual;
    return j;
}

std::string ValidationReport::to_text() const {
    std::ostringstream s;
    s << "validation: " << (ok() ? "OK" : "FAILED") << "\n";
    s << "  overlap violations: " << overlap.size() << "\n";
    for (const auto& o : overlap)
        s << "    patch " << o.patch << " " << side_name(o.side) << " side: " << o.uncovered
          << " layer points uncovered, e.g. (" << o.example.x() << ", " << o.example.y() << ")\n";
    s << "  donor-receiver violations: " << donor_total << "\n";
    for (std::size_t k = 0; k < std::min<std::size_t>(donor.size(), 10); ++k) {
        const auto& d = donor[k];
        s << "    subpatch " << d.subpatch << " (" << d.i << ", " << d.j << ") at (" << d.x << ", " << d.y << ")"
          << (d.orphan ? " has no donor" : " has only fringe donors") << "\n";
    }
    for (const auto& sp : spacing)
        s << "  patch " << sp.patch << ": h_min " << sp.h_min << " h_max " << sp.h_max
          << (sp.within_bound ? "" : "  exceeds h_bar") << "\n";
    s << "  cover: " << uncovered_samples << " of " << coverage_samples << " samples uncovered\n";
    s << "  patch samples outside the domain: " << outside_domain_samples << "\n";
    s << "  min |det J| " << min_abs_det_J << ", max inverse residual " << max_inverse_residual << "\n";
    for (const auto& w : boundary_rule_warnings) s << "  note: " << w << "\n";
    return s.str();
}

ValidationReport validate_decomposition(const Decomposition& dec, int nf, int nv, std::size_t cover_samples) {
    ValidationReport rep;

    // Minimum-overlap layers on every internal patch side.
    for (int p = 0; p < int(dec.patches.size()); ++p) {
        const Patch& P = dec.patches[std::size_t(p)];
        const int n1 = P.grid.points1(), n2 = P.grid.points2();
        const double h1 = P.grid.h1(), h2 = P.grid.h2();
        for (int side = 0; side < 4; ++side) {
            if (P.external[std::size_t(side)]) continue;
            OverlapViolation v{p, side, 0, Vec2::Zero()};
            const int along = side < 2 ? n2 : n1;
            const int across = side < 2 ? n1 : n2;
            for (int k = 0; k < along; ++k)
                for (int l = 0; l < std::min(2 * nv + 1, across); ++l) {
                    const int depth = (side == kLeft || side == kBottom) ? l : across - 1 - l;
                    const int i = side < 2 ? depth : k, j = side < 2 ? k : depth;
                    const Vec2 x = P.map->forward(Vec2(i * h1, j * h2));
                    if (!covered_by_other(dec, p, x)) {
                        if (v.uncovered == 0) v.example = x;
                        ++v.uncovered;
                    }
                }
            if (v.uncovered) rep.overlap.push_back(v);
        }
        for (int side = 0; side < 4; ++side)
            if (P.boundary_contacts[std::size_t(side)] > 1)
                rep.boundary_rule_warnings.push_back("patch " + std::to_string(p) + " (" + P.name + ") " +
                                                     side_name(side) + " side touches the boundary " +
                                                     std::to_string(P.boundary_contacts[std::size_t(side)]) +
                                                     " times");
        rep.spacing.push_back({p, P.h_min, P.h_max, !(dec.params.h_bar > 0.0) || P.h_max <= dec.params.h_bar * (1 + 1e-12)});
    }

    // Donor admissibility for every fringe point.
    for (int a = 0; a < int(dec.subpatches.size()); ++a) {
        const Subpatch& A = dec.subpatches[std::size_t(a)];
        for (const auto& [i, j] : fringe_points(A, nf)) {
            if (exchange::find_donor(dec, a, i, j, nf, true)) continue;
            const bool orphan = !exchange::find_donor(dec, a, i, j, nf, false);
            ++rep.donor_total;
            if (rep.donor.size() < 200) rep.donor.push_back({a, i, j, A.x(i, j), A.y(i, j), orphan});
        }
    }

    // Monte-Carlo cover of the domain.
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> ux(dec.domain.lo().x(), dec.domain.hi().x());
    std::uniform_real_distribution<double> uy(dec.domain.lo().y(), dec.domain.hi().y());
    while (rep.coverage_samples < cover_samples) {
        const Vec2 x(ux(rng), uy(rng));
        if (!dec.domain.contains(x)) continue;
        ++rep.coverage_samples;
        bool hit = false;
        for (int p = 0; p < int(dec.patches.size()) && !hit; ++p) hit = bool(dec.locate_in(p, x));
        if (!hit) ++rep.uncovered_samples;
    }

    // Map consistency and containment on a sample grid of each patch.
    rep.min_abs_det_J = INFINITY;
    const double tol = 1e-9 * dec.domain.diameter();
    for (const auto& P : dec.patches) {
        constexpr int m = 33;
        for (int jj = 0; jj < m; ++jj)
            for (int ii = 0; ii < m; ++ii) {
                const Vec2 q(double(ii) / (m - 1), double(jj) / (m - 1));
                const Vec2 x = P.map->forward(q);
                rep.min_abs_det_J = std::min(rep.min_abs_det_J, std::abs(P.map->jacobian(q).determinant()));
                const auto qi = P.map->inverse(x);
                const double res = qi ? (P.map->forward(*qi) - x).norm() : INFINITY;
                rep.max_inverse_residual = std::max(rep.max_inverse_residual, res);
                if (!dec.domain.contains(x, tol)) ++rep.outside_domain_samples;
            }
    }
    return rep;
}

} // namespace fcsdnn::geometry
