#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcsdnn/geometry/decomposition.hpp"

namespace fcsdnn::exchange {

// One scalar grid function per subpatch, indexed like Decomposition::subpatches.
using Field = std::vector<Grid>;

Field make_field(const geometry::Decomposition& dec, double fill = 0.0);

// Tensor-product quadratic Lagrange weights on nodes {0,1,2}^2, w[b*3 + a]
// multiplying the value at stencil node (a, b).
std::array<double, 9> lagrange_weights(double s, double t);

// Iterated 1D quadratic interpolation (Neville) on a 3x3 stencil with
// values v[b*3 + a] at (a, b); (s, t) in stencil index units.
double neville_interpolate(const std::array<double, 9>& v, double s, double t);

struct Record {
    int recv_sp;
    int recv_index;  // j * n + i in the receiver subpatch
    int donor_sp;
    bool intra;
    int donor_index; // intra: the copied point; inter: stencil corner
    double s, t;     // receiver position relative to the stencil corner
    std::array<double, 9> w;
};

struct DonorChoice {
    int subpatch;
    bool intra;
    int ci, cj;    // intra: donor point; inter: stencil corner
    double s, t;
    double depth;  // internal-side distance of the receiver in the donor
    bool clean;    // donor points are outside the donor's fringe
};

// Farthest-from-boundary donor for receiver (sp, i, j). Intra-patch copies are
// preferred; ties go to the lowest (kind, patch, subpatch). With
// require_clean, candidates touching the donor fringe are skipped.
std::optional<DonorChoice> find_donor(const geometry::Decomposition& dec, int sp, int i, int j, int nf,
                                      bool require_clean);

struct Orphan {
    int subpatch, i, j;
    double x, y;
};

class CommPlan {
public:
    int nf = 0;
    std::vector<Record> records;
    std::vector<int> intra_count; // per receiver subpatch
    std::vector<int> inter_count;

    std::size_t size() const { return records.size(); }
    nlohmann::json dump() const;
};

// Throws PlanError listing orphan fringe points when any receiver has no
// admissible donor.
CommPlan build_comm_plan(const geometry::Decomposition& dec, int nf);

void apply_exchange(const CommPlan& plan, Field& f);
void apply_exchange(const CommPlan& plan, std::span<Field* const> fields);

} // namespace fcsdnn::exchange
