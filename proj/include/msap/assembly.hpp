#pragma once

#include <array>
#include <optional>
#include <string>

#include "msap/media.hpp"
#include "msap/mesh.hpp"
#include "msap/msfem_basis.hpp"
#include "msap/types.hpp"
#include "msap/velocity_basis.hpp"

namespace msap {

/// Coarse-grid matrices of the spatial Galerkin discretization (M x M).
///
///   mass                   Phi_mn   = <phi_m, phi_n>
///   weighted_mass          Sigma_mn = <a phi_m, phi_n>
///   inverse_weighted_mass           = <a^-1 phi_m, phi_n>
///   weighted_gradient[k]            = <phi_m, (a grad phi_n)_k>
///   gradient[k]            Xi       = <phi_m, d_k phi_n>
///   stiffness              A_mn     = -<a grad phi_m, grad phi_n>
///   limit_parts[k]                  = gradient[k] Phi^-1 weighted_gradient[k]
///   limit                  D        = sum_k limit_parts[k]
///
/// With a matrix coefficient (homogenized systems) `a grad` is the
/// matrix-vector product and the two weighted mass matrices are absent.
struct SpatialSystem {
  int dimension = 1;
  BasisMode mode = BasisMode::Affine;
  bool homogenized = false;
  SparseMatrix mass;
  SparseMatrix weighted_mass;
  SparseMatrix inverse_weighted_mass;
  std::array<SparseMatrix, 2> weighted_gradient;
  std::array<SparseMatrix, 2> gradient;
  SparseMatrix stiffness;
  std::array<Matrix, 2> limit_parts;
  Matrix limit;

  int size() const { return static_cast<int>(mass.rows()); }
  bool has_weighted_mass() const { return weighted_mass.rows() > 0; }
};

/// All matrices with a scalar oscillatory coefficient, by the composite
/// trapezoidal rule over fine cells (media sampled at fine-cell centers,
/// basis gradients at fine-cell centers). The stiffness uses the exact
/// fine-cell (bi)linear stiffness.
SpatialSystem assemble_spatial(const BasisSet& basis, const MediaSpec& media, int threads = 1);

/// Homogenized counterparts with a constant d x d coefficient.
SpatialSystem assemble_spatial(const BasisSet& basis, const Matrix& a_hom, int threads = 1);

/// A = -<a grad phi_m, grad phi_n>.
SparseMatrix assemble_heat(const BasisSet& basis, const MediaSpec& media);
SparseMatrix assemble_heat(const BasisSet& basis, const Matrix& a_hom);

/// D = sum_k Xi^k Phi^-1 Sigma^k, applied through a factorization of Phi.
/// Fills system.limit_parts and system.limit and returns D.
const Matrix& compute_limit_operator(SpatialSystem& system);

/// sum_k c_k Xi^k Phi^-1 Sigma^k with c_k = (F_k F_k)_{11} of the velocity
/// system: the operator the transport scheme actually reaches as eps -> 0.
Matrix velocity_weighted_limit(const SpatialSystem& system, const VelocitySystem& velocity);

}  // namespace msap
