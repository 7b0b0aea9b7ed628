#include "msap/velocity_basis.hpp"

#include <algorithm>
#include <string>

#include "msap/errors.hpp"

namespace msap {

GaussRule gauss_rule(int count, VelocityMode mode) {
  if (count < 1) throw ConfigError("quadrature needs at least one node");
  GaussRule rule;
  rule.mode = mode;
  gauss_legendre<Real>(count, rule.nodes, rule.weights);
  rule.nodes *= velocity_half_width<Real>(mode);
  rule.weights *= 0.5;
  return rule;
}

LegendreBasis::LegendreBasis(int order, VelocityMode mode) : order_(order), mode_(mode) {
  if (order < 1) throw ConfigError("velocity basis order must be at least 1");
}

Real VelocitySystem::diffusion_constant(int axis) const {
  const Matrix& f = flux(axis);
  return f.row(0).squaredNorm();
}

VelocitySystem assemble_velocity_matrices(const LegendreBasis& basis, const GaussRule& rule) {
  const int n = basis.order();
  if (rule.size() < n + 2)
    throw ConfigError("velocity quadrature too small: K = " + std::to_string(rule.size()) +
                      " < N + 2 = " + std::to_string(n + 2));
  if (rule.mode != basis.mode()) throw ConfigError("quadrature and basis modes differ");

  VelocitySystem sys;
  sys.order = n;
  sys.mode = basis.mode();
  sys.rule = rule;
  sys.identity = Matrix::Zero(n, n);
  sys.flux_cos = Matrix::Zero(n, n);
  if (sys.mode == VelocityMode::Circle2D) sys.flux_sin = Matrix::Zero(n, n);

  for (int k = 0; k < rule.size(); ++k) {
    const Real xi = rule.nodes(k);
    const Vector p = basis(xi);
    const Matrix outer = rule.weights(k) * (p * p.transpose());
    sys.identity += outer;
    if (sys.mode == VelocityMode::Circle2D) {
      sys.flux_cos += std::cos(xi) * outer;
      sys.flux_sin += std::sin(xi) * outer;
    }
  }

  if (sys.mode == VelocityMode::Slab1D) {
    // xi P_k = ((k + 1) P_{k+1} + k P_{k-1}) / (2k + 1) gives a tridiagonal F.
    for (int k = 1; k < n; ++k) {
      const Real v = k / std::sqrt(Real(2 * k - 1) * Real(2 * k + 1));
      sys.flux_cos(k - 1, k) = v;
      sys.flux_cos(k, k - 1) = v;
    }
  }

  sys.collision = Matrix::Identity(n, n);
  sys.collision(0, 0) = 0;
  sys.projection = Matrix::Zero(n, n);
  sys.projection(0, 0) = 1;
  return sys;
}

VelocitySystem make_velocity_system(int order, VelocityMode mode,
                                    std::optional<int> quadrature_points) {
  LegendreBasis basis(order, mode);
  // Circle integrands carry cos/sin, which 2N nodes underresolve for small N.
  const int floor = mode == VelocityMode::Circle2D ? 20 : 1;
  const int k = quadrature_points.value_or(std::max({2 * order, order + 2, floor}));
  return assemble_velocity_matrices(basis, gauss_rule(k, mode));
}

}  // namespace msap
