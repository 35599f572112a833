#pragma once

#include <cstdint>
#include <vector>

#include "fcsdnn/exchange/comm_plan.hpp"
#include "fcsdnn/geometry/decomposition.hpp"

namespace fcsdnn::solver {

// 1 where the subpatch owns the grid point, per subpatch in j * n + i order.
using OwnershipMask = std::vector<std::vector<std::uint8_t>>;

// Each physical grid point is owned by the subpatch containing it at the
// largest index distance from that subpatch's internal sides; ties go to the
// lowest global subpatch index. Points shared by several subpatches of one
// patch are owned once.
OwnershipMask ownership_partition(const geometry::Decomposition& dec);

std::size_t owned_count(const OwnershipMask& mask);

// Sum of f * cell area over owned points, with trapezoid weights on the
// domain boundary.
double owned_integral(const exchange::Field& f, const geometry::Decomposition& dec, const OwnershipMask& mask);

} // namespace fcsdnn::solver
