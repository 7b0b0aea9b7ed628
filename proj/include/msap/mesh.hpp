#pragma once

#include <array>
#include <vector>

#include "msap/types.hpp"

namespace msap {

/// Uniform periodic tensor grid on [lower, upper]^d with a nested fine grid
/// of `ratio` fine cells per coarse cell per axis.
///
/// Nodes on opposite boundaries are identified, so an axis with n cells has n
/// logical nodes. Node and cell indices are lexicographic with x fastest.
/// Element corners are ordered (0,0), (1,0), (0,1), (1,1).
class NestedMesh {
 public:
  NestedMesh(int dimension, int coarse_cells, int ratio, Real lower = -1.0, Real upper = 1.0);

  int dimension() const { return dimension_; }
  Real lower() const { return lower_; }
  Real upper() const { return upper_; }
  Real length() const { return upper_ - lower_; }
  Real domain_measure() const;

  int coarse_cells_per_axis() const { return coarse_; }
  int fine_cells_per_axis() const { return coarse_ * ratio_; }
  int ratio() const { return ratio_; }
  Real coarse_size() const { return length() / coarse_; }
  Real fine_size() const { return length() / fine_cells_per_axis(); }

  /// M, the number of logical coarse nodes (equals the number of elements).
  int num_coarse_nodes() const { return ipow(coarse_); }
  int num_elements() const { return ipow(coarse_); }
  int num_fine_nodes() const { return ipow(fine_cells_per_axis()); }
  int num_fine_cells() const { return ipow(fine_cells_per_axis()); }
  int corners_per_element() const { return dimension_ == 1 ? 2 : 4; }
  Real element_measure() const;
  Real fine_cell_measure() const;

  Point coarse_node(int node) const;
  Point fine_node(int node) const;
  /// Fine-grid index of a coarse node.
  int fine_index_of_coarse(int node) const;

  /// Coarse node ids at the element's corners.
  std::vector<int> element_nodes(int element) const;
  /// Lower-left corner coordinates of the element (unwrapped).
  Point element_origin(int element) const;
  /// Elements containing the node: 2 in 1D, 4 in 2D. Throws std::out_of_range.
  const std::vector<int>& patch_of(int node) const;

  /// Nodes of an element's local fine grid, (ratio + 1)^d of them.
  int local_nodes_per_element() const { return ipow(ratio_ + 1); }
  /// Logical fine node of local fine node (a, b) of an element.
  int fine_node_of(int element, int a, int b = 0) const;
  /// Fine cells of a coarse element, ratio^d of them.
  std::vector<int> fine_cells_of(int element) const;

 private:
  int ipow(int n) const { return dimension_ == 1 ? n : n * n; }

  int dimension_;
  int coarse_;
  int ratio_;
  Real lower_;
  Real upper_;
  std::vector<std::vector<int>> patches_;
};

NestedMesh build_nested_mesh(int dimension, int coarse_cells_per_axis, int refinement_ratio,
                             Real lower = -1.0, Real upper = 1.0);

}  // namespace msap
