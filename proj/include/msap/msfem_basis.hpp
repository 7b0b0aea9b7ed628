#pragma once

#include <vector>

#include "msap/media.hpp"
#include "msap/mesh.hpp"
#include "msap/types.hpp"

namespace msap {

enum class BasisMode {
  Multiscale,  // a-harmonic on each element with hat boundary traces
  Affine,      // standard (bi)linear hats
};

/// Coarse-node basis functions stored element by element on the fine grid.
///
/// local[e] is a (ratio+1)^d x 2^d matrix: column c holds the restriction to
/// element e of the global function of the element's c-th corner node,
/// sampled at the element's local fine nodes (x fastest).
struct BasisSet {
  BasisMode mode = BasisMode::Affine;
  NestedMesh mesh;
  std::vector<Matrix> local;

  /// phi_l at every logical fine node.
  Vector global_values(int node) const;
  /// sum_l coefficients(l) phi_l at every logical fine node.
  Vector combine(const Vector& coefficients) const;
};

/// The 2^d local functions on one element: solutions of
/// -div(a grad phi) = 0 with (bi)linear hat boundary traces, discretized by
/// (bi)linear elements on the fine grid with `a` sampled at cell centers.
/// Columns as in BasisSet::local.
Matrix solve_local_basis(const NestedMesh& mesh, const MediaSpec& media, int element);

/// The hat functions restricted to one element.
Matrix affine_local_basis(const NestedMesh& mesh);

BasisSet build_global_basis(const NestedMesh& mesh, const MediaSpec& media, BasisMode mode,
                            int threads = 1);

/// Effective coefficient from the periodic cell problem and its correctors.
struct HomogenizationResult {
  Matrix a_hom;                     // d x d
  std::vector<Vector> correctors;   // chi_x (, chi_y) at cell nodes, zero mean
  int resolution = 0;
};

/// Solves the corrector problem on one period cell of the media with
/// `cell_resolution` (>= 16) cells per axis.
HomogenizationResult homogenized_coefficient(const MediaSpec& media, int cell_resolution = 128);

}  // namespace msap
