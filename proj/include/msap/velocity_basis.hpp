#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "msap/types.hpp"

namespace msap {

/// Velocity variable and measure:
///   Slab1D    xi in [-1, 1], v = xi, measure dxi / 2
///   Circle2D  xi in (-pi, pi], v = (cos xi, sin xi), measure dxi / (2 pi)
enum class VelocityMode { Slab1D, Circle2D };

template <class Scalar>
Scalar velocity_half_width(VelocityMode mode) {
  return mode == VelocityMode::Slab1D ? Scalar(1) : Scalar(kPi);
}

/// Values p_1(xi) ... p_N(xi) of the Legendre family normalized against the
/// uniform probability measure on the velocity interval. p_1 = 1 and p_n has
/// degree n - 1.
template <class Scalar>
DenseVector<Scalar> legendre_values(int order, VelocityMode mode, Scalar xi) {
  DenseVector<Scalar> p(order);
  const Scalar t = xi / velocity_half_width<Scalar>(mode);
  Scalar prev = 0, cur = 1;
  for (int k = 0; k < order; ++k) {
    p(k) = std::sqrt(Scalar(2 * k + 1)) * cur;
    const Scalar next = (Scalar(2 * k + 1) * t * cur - Scalar(k) * prev) / Scalar(k + 1);
    prev = cur;
    cur = next;
  }
  return p;
}

/// Gauss-Legendre nodes and weights on [-1, 1] (weights sum to 2), nodes
/// ascending.
template <class Scalar>
void gauss_legendre(int count, DenseVector<Scalar>& nodes, DenseVector<Scalar>& weights) {
  nodes.resize(count);
  weights.resize(count);
  if (count == 1) {
    nodes(0) = 0;
    weights(0) = 2;
    return;
  }
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    Scalar z = std::cos(Scalar(kPi) * (Scalar(i) + Scalar(0.75)) / (Scalar(count) + Scalar(0.5)));
    Scalar dp = 1;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0 = 1, p1 = z;
      for (int k = 1; k < count; ++k) {
        const Scalar p2 = (Scalar(2 * k + 1) * z * p1 - Scalar(k) * p0) / Scalar(k + 1);
        p0 = p1;
        p1 = p2;
      }
      dp = Scalar(count) * (z * p1 - p0) / (z * z - Scalar(1));
      const Scalar dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) <= Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
    }
    if (2 * i + 1 == count) z = 0;
    const Scalar w = Scalar(2) / ((Scalar(1) - z * z) * dp * dp);
    nodes(i) = -z;
    nodes(count - 1 - i) = z;
    weights(i) = w;
    weights(count - 1 - i) = w;
  }
}

/// K-point Gauss rule for the uniform probability measure on the velocity
/// interval.
struct GaussRule {
  VelocityMode mode = VelocityMode::Circle2D;
  Vector nodes;
  Vector weights;

  int size() const { return static_cast<int>(nodes.size()); }

  template <class F>
  Real integrate(F&& f) const {
    Real sum = 0;
    for (int k = 0; k < size(); ++k) sum += weights(k) * f(nodes(k));
    return sum;
  }
};

GaussRule gauss_rule(int count, VelocityMode mode);

/// Normalized Legendre basis p_1 ... p_N on the velocity interval.
class LegendreBasis {
 public:
  LegendreBasis(int order, VelocityMode mode);

  int order() const { return order_; }
  VelocityMode mode() const { return mode_; }
  Vector operator()(Real xi) const { return legendre_values<Real>(order_, mode_, xi); }
  /// p_n(xi) with 1-based n.
  Real value(int n, Real xi) const { return (*this)(xi)(n - 1); }

 private:
  int order_;
  VelocityMode mode_;
};

/// Velocity matrices of the Pn discretization.
///
/// In Slab1D mode the single flux matrix <xi p_m p_n> is stored in `flux_cos`
/// and `flux_sin` is empty.
struct VelocitySystem {
  int order = 0;
  VelocityMode mode = VelocityMode::Circle2D;
  GaussRule rule;
  Matrix identity;    // <p_m p_n> by quadrature
  Matrix collision;   // -<L p_m, p_n> = diag(0, 1, ..., 1)
  Matrix projection;  // <p_m><p_n> = e1 e1^T
  Matrix flux_cos;
  Matrix flux_sin;

  int spatial_axes() const { return mode == VelocityMode::Slab1D ? 1 : 2; }
  const Matrix& flux(int axis) const { return axis == 0 ? flux_cos : flux_sin; }
  /// (F_axis F_axis)_{11}: the diffusion constant the scheme produces in the
  /// limit along `axis`. Tends to 1/3 (slab) or 1/2 (circle).
  Real diffusion_constant(int axis) const;
};

/// Builds the five velocity matrices. Requires K >= N + 2.
VelocitySystem assemble_velocity_matrices(const LegendreBasis& basis, const GaussRule& rule);

/// Basis plus a default rule unless given: K = 2N on the slab (exact) and
/// K = max(2N, 20) on the circle.
VelocitySystem make_velocity_system(int order, VelocityMode mode,
                                    std::optional<int> quadrature_points = std::nullopt);

}  // namespace msap
