#pragma once

#include <utility>
#include <vector>

#include "msap/mesh.hpp"
#include "msap/solvers.hpp"
#include "msap/types.hpp"

namespace msap {

/// Discrete L2 distance of two coarse nodal vectors, each node weighted by
/// its cell measure H^d.
Real error_norm(const Vector& a, const Vector& b, const NestedMesh& mesh);

/// Discrete L2(dx dv) distance between the kinetic solution and the
/// velocity-independent density `rho` (nodal values). Uses orthonormality
/// of the velocity basis, so every mode contributes its squared coefficient.
Real kinetic_error_norm(const KineticState& state, const Vector& rho, const NestedMesh& mesh);

struct RateFit {
  Real slope = 0;
  Real intercept = 0;
  Real residual = 0;  // root mean square of the log-log residuals
};

/// Least-squares line through (log parameter, log error). Needs at least
/// three pairs with positive entries.
RateFit fit_rate(const std::vector<std::pair<Real, Real>>& pairs);

}  // namespace msap
