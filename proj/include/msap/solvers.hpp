#pragma once

#include <Eigen/LU>
#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>

#include "msap/assembly.hpp"
#include "msap/mesh.hpp"
#include "msap/msfem_basis.hpp"
#include "msap/types.hpp"
#include "msap/velocity_basis.hpp"

namespace msap {

/// Expansion coefficients of the even (alpha) and odd (beta) parts:
/// f = sum_mn (alpha_mn + beta_mn) phi_m(x) p_n(xi). Both are M x N.
struct KineticState {
  Matrix alpha;
  Matrix beta;
  Real time = 0;
};

/// Coefficients of a scalar density in the coarse basis.
struct ScalarState {
  Vector values;
  Real time = 0;
};

enum class Formulation {
  Symmetric,   // even equation divided by a before projection
  Asymmetric,  // even equation projected as is
};

struct StepperConfig {
  Real epsilon = 1.0;
  Real dt = 1e-3;
  Formulation formulation = Formulation::Symmetric;
  Real tolerance = 1e-10;  // relative residual of the coupled step
};

using DensityFunction = std::function<Real(Point)>;
using KineticFunction = std::function<Real(Point, Real)>;

/// Nodal values in x (the basis is nodal) and L2 projection in xi by the
/// velocity Gauss rule; components even in xi go to alpha, odd to beta.
KineticState project_initial(const KineticFunction& f0, const NestedMesh& mesh,
                             const VelocitySystem& velocity);
/// Velocity-independent data: alpha(:, 1) = rho0 at the coarse nodes.
KineticState project_initial(const DensityFunction& rho0, const NestedMesh& mesh,
                             const VelocitySystem& velocity);

/// Implicit (backward Euler) even-odd Galerkin step.
///
/// The odd unknowns are eliminated with the factorized block
/// Sigma + dt/eps^2 Phi, which is the same for every velocity mode, leaving
/// a dense MN x MN system for alpha that is factorized once on construction.
class TransportStepper {
 public:
  TransportStepper(const SpatialSystem& spatial, const VelocitySystem& velocity,
                   StepperConfig config);

  KineticState step(const KineticState& state) const;
  /// Relative residual of the coupled system for the most recent step.
  Real last_residual() const { return last_residual_; }
  const StepperConfig& config() const { return config_; }

 private:
  Matrix even_rhs(const KineticState& state, Matrix& odd_rhs) const;
  Real residual(const KineticState& previous, const KineticState& next) const;

  const SpatialSystem* spatial_;
  const VelocitySystem* velocity_;
  StepperConfig config_;
  int axes_;
  SparseMatrix even_mass_, even_relaxation_;
  std::array<const SparseMatrix*, 2> even_coupling_{};
  Eigen::SimplicialLDLT<SparseMatrix> odd_solver_;
  Matrix schur_;
  Eigen::PartialPivLU<Matrix> schur_lu_;
  mutable Real last_residual_ = 0;
};

KineticState transport_step(const KineticState& state, const SpatialSystem& spatial,
                            const VelocitySystem& velocity, const StepperConfig& config);
/// Same as transport_step with the asymmetric even equation.
KineticState transport_step_asymmetric(const KineticState& state, const SpatialSystem& spatial,
                                       const VelocitySystem& velocity, StepperConfig config);

/// Backward Euler for Phi d(eta)/dt = c A eta:
/// (Phi - c dt A) eta^{n+1} = Phi eta^n. The factorization is reused.
class HeatStepper {
 public:
  HeatStepper(const SparseMatrix& mass, const SparseMatrix& stiffness, Real dt,
              Real diffusion_constant = 0.5);
  ScalarState step(const ScalarState& state) const;

 private:
  SparseMatrix mass_;
  Real dt_;
  Eigen::SimplicialLDLT<SparseMatrix> solver_;
};

ScalarState heat_step(const ScalarState& state, const SparseMatrix& mass,
                      const SparseMatrix& stiffness, Real dt, Real diffusion_constant = 0.5);

/// Limit scheme (Phi - c dt D) alpha^{n+1} = Phi alpha^n with dense D.
class LimitStepper {
 public:
  LimitStepper(const SparseMatrix& mass, const Matrix& limit, Real dt,
               Real diffusion_constant = 0.5);
  ScalarState step(const ScalarState& state) const;

 private:
  SparseMatrix mass_;
  Real dt_;
  Eigen::PartialPivLU<Matrix> lu_;
};

ScalarState limit_step(const ScalarState& state, const SparseMatrix& mass, const Matrix& limit,
                       Real dt, Real diffusion_constant = 0.5);

/// Density at the coarse nodes: alpha(:, 1), since p_1 = 1 and the
/// odd part and higher modes average to zero.
Vector density(const KineticState& state);
/// Density at every fine node: sum_m alpha_m1 phi_m.
Vector density(const KineticState& state, const BasisSet& basis);

/// Scalar state from nodal samples of rho.
ScalarState interpolate_density(const DensityFunction& rho, const NestedMesh& mesh);

}  // namespace msap
