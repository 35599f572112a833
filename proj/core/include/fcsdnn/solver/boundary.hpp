#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcsdnn/fc/spectral.hpp"
#include "fcsdnn/geometry/decomposition.hpp"
#include "fcsdnn/solver/state.hpp"

namespace fcsdnn::solver {

enum class BcKind {
    SupersonicInflow,     // all of (rho, u, v, p) fixed
    SupersonicOutflow,    // nothing imposed
    PressureOutflow,      // p fixed
    SlipWall,             // zero normal velocity
    AdiabaticWall,        // u = v = 0, dtheta/dn = 0
    ZeroNormalDerivative, // dF/dn = 0 for every conserved variable
};

const char* to_string(BcKind k);
// Throws ConfigError for unknown names.
BcKind bc_kind_from_string(const std::string& s);

struct BoundaryCondition {
    BcKind kind = BcKind::SupersonicOutflow;
    Primitive state{};     // SupersonicInflow
    double pressure = 1.0; // PressureOutflow
};

// Conditions keyed by boundary id: 0 left, 1 right, 2 bottom, 3 top, 4 + k
// for obstacle k.
using BoundarySpec = std::map<int, BoundaryCondition>;

nlohmann::json to_json(const BoundarySpec& spec);
BoundarySpec boundary_spec_from_json(const nlohmann::json& j);

// Throws ConfigError when an external side has no condition or a condition
// names an id no external side carries.
void validate_boundary_spec(const geometry::Decomposition& dec, const BoundarySpec& spec);

// Grid-line view of one side: lines cross the side, index 0 of each line
// runs from the side inward when `end` is Left.
struct SideLines {
    std::ptrdiff_t first;        // offset of line 0, element 0
    std::ptrdiff_t line_stride;  // between lines
    std::ptrdiff_t elem_stride;  // along a line (normal direction)
    fc::End end;                 // which end of each line lies on the side
    double h;                    // parameter spacing along the lines
};
SideLines side_lines(const geometry::Subpatch& sp, geometry::Side side);

// Unit vector along grad q_perp at side point k (k-th line), pointing out of
// the parameter square.
geometry::Vec2 side_normal(const geometry::Subpatch& sp, geometry::Side side, int k);

class BoundaryOperator {
public:
    BoundaryOperator(const geometry::Decomposition& dec, BoundarySpec spec, double gamma = kGamma);

    // Overwrites boundary values on every external side. Within a subpatch
    // sides are processed in the order zero-normal-derivative, pressure
    // outflow, slip, adiabatic, inflow, so the last one wins at corners.
    void apply(State& state) const;
    void apply(State& state, int sp) const;

    // Replaces theta on adiabatic sides of subpatch sp by the values making
    // the FC normal derivative vanish.
    void adiabatic_theta(int sp, Grid& theta) const;
    bool has_adiabatic(int sp) const { return !adiabatic_[std::size_t(sp)].empty(); }

    const BoundarySpec& spec() const { return spec_; }
    double gamma() const { return gamma_; }

private:
    struct SideRule {
        geometry::Side side;
        const BoundaryCondition* bc;
    };
    const geometry::Decomposition* dec_;
    BoundarySpec spec_;
    double gamma_;
    std::vector<std::vector<SideRule>> rules_;             // per subpatch, in application order
    std::vector<std::vector<geometry::Side>> adiabatic_;   // per subpatch
    std::vector<std::shared_ptr<const fc::LineSpectral>> engine_;
};

} // namespace fcsdnn::solver
