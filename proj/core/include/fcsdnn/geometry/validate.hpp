#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcsdnn/geometry/decomposition.hpp"

namespace fcsdnn::geometry {

struct OverlapViolation {
    int patch, side;
    std::size_t uncovered; // layer points not inside any other patch
    Vec2 example;
};

struct DonorViolation {
    int subpatch, i, j;
    double x, y;
    bool orphan; // no donor at all, as opposed to donors only inside a fringe
};

struct SpacingReport {
    int patch;
    double h_min, h_max;
    bool within_bound;
};

struct ValidationReport {
    std::vector<OverlapViolation> overlap;
    std::vector<DonorViolation> donor; // first 200 kept
    std::size_t donor_total = 0;
    std::vector<SpacingReport> spacing;
    std::size_t coverage_samples = 0;
    std::size_t uncovered_samples = 0;
    std::size_t outside_domain_samples = 0;
    // Sides touching the domain boundary more than once; informational.
    std::vector<std::string> boundary_rule_warnings;
    double min_abs_det_J = 0.0;
    double max_inverse_residual = 0.0;

    bool ok() const;
    nlohmann::json to_json() const;
    std::string to_text() const;
};

// Overlap layers of width 2 nv + 1, donor admissibility for every nf-fringe
// point, spacing against h_bar, Monte-Carlo cover of the domain and map
// consistency.
ValidationReport validate_decomposition(const Decomposition& dec, int nf, int nv, std::size_t cover_samples = 100000);

} // namespace fcsdnn::geometry
