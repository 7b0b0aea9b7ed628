#include "msap/metrics.hpp"

#include <Eigen/QR>
#include <cmath>

#include "msap/errors.hpp"

namespace msap {

Real error_norm(const Vector& a, const Vector& b, const NestedMesh& mesh) {
  if (a.size() != b.size() || a.size() != mesh.num_coarse_nodes())
    throw MetricError("error_norm: vectors must both have one value per coarse node");
  return std::sqrt((a - b).squaredNorm() * mesh.element_measure());
}

Real kinetic_error_norm(const KineticState& state, const Vector& rho, const NestedMesh& mesh) {
  if (rho.size() != state.alpha.rows() || rho.size() != mesh.num_coarse_nodes())
    throw MetricError("kinetic_error_norm: density has the wrong length");
  Matrix diff = state.alpha + state.beta;
  diff.col(0) -= rho;
  return std::sqrt(diff.squaredNorm() * mesh.element_measure());
}

RateFit fit_rate(const std::vector<std::pair<Real, Real>>& pairs) {
  if (pairs.size() < 3) throw MetricError("fit_rate needs at least three points");
  const auto n = static_cast<Eigen::Index>(pairs.size());
  Matrix design(n, 2);
  Vector rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [p, e] = pairs[static_cast<std::size_t>(i)];
    if (!(p > 0) || !(e > 0)) throw MetricError("fit_rate needs positive parameters and errors");
    design(i, 0) = std::log(p);
    design(i, 1) = 1;
    rhs(i) = std::log(e);
  }
  const Vector coef = design.colPivHouseholderQr().solve(rhs);
  RateFit fit;
  fit.slope = coef(0);
  fit.intercept = coef(1);
  fit.residual = std::sqrt((design * coef - rhs).squaredNorm() / static_cast<Real>(n));
  return fit;
}

}  // namespace msap
