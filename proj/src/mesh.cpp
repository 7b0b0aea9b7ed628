#include "msap/mesh.hpp"

#include <stdexcept>
#include <string>

#include "msap/errors.hpp"

namespace msap {

NestedMesh::NestedMesh(int dimension, int coarse_cells, int ratio, Real lower, Real upper)
    : dimension_(dimension), coarse_(coarse_cells), ratio_(ratio), lower_(lower), upper_(upper) {
  if (dimension != 1 && dimension != 2) throw ConfigError("mesh dimension must be 1 or 2");
  if (coarse_cells < 2) throw ConfigError("mesh needs at least 2 coarse cells per axis");
  if (ratio < 1) throw ConfigError("refinement ratio must be at least 1");
  if (!(upper > lower)) throw ConfigError("mesh domain is empty");

  patches_.resize(static_cast<std::size_t>(num_coarse_nodes()));
  const int n = coarse_;
  for (int node = 0; node < num_coarse_nodes(); ++node) {
    auto& patch = patches_[static_cast<std::size_t>(node)];
    const int i = node % n;
    const int im = (i + n - 1) % n;
    if (dimension_ == 1) {
      patch = {im, i};
    } else {
      const int j = node / n;
      const int jm = (j + n - 1) % n;
      patch = {jm * n + im, jm * n + i, j * n + im, j * n + i};
    }
  }
}

Real NestedMesh::domain_measure() const {
  return dimension_ == 1 ? length() : length() * length();
}

Real NestedMesh::element_measure() const {
  const Real h = coarse_size();
  return dimension_ == 1 ? h : h * h;
}

Real NestedMesh::fine_cell_measure() const {
  const Real h = fine_size();
  return dimension_ == 1 ? h : h * h;
}

Point NestedMesh::fine_node(int node) const {
  const int nf = fine_cells_per_axis();
  auto coord = [&](int k) { return lower_ + length() * static_cast<Real>(k) / nf; };
  if (dimension_ == 1) return {coord(node), 0.0};
  return {coord(node % nf), coord(node / nf)};
}

int NestedMesh::fine_index_of_coarse(int node) const {
  if (dimension_ == 1) return node * ratio_;
  const int nf = fine_cells_per_axis();
  return (node / coarse_) * ratio_ * nf + (node % coarse_) * ratio_;
}

Point NestedMesh::coarse_node(int node) const { return fine_node(fine_index_of_coarse(node)); }

std::vector<int> NestedMesh::element_nodes(int element) const {
  const int n = coarse_;
  const int i = element % n;
  const int ip = (i + 1) % n;
  if (dimension_ == 1) return {i, ip};
  const int j = element / n;
  const int jp = (j + 1) % n;
  return {j * n + i, j * n + ip, jp * n + i, jp * n + ip};
}

Point NestedMesh::element_origin(int element) const {
  const Real h = coarse_size();
  const int i = element % coarse_;
  if (dimension_ == 1) return {lower_ + h * i, 0.0};
  return {lower_ + h * i, lower_ + h * (element / coarse_)};
}

const std::vector<int>& NestedMesh::patch_of(int node) const {
  if (node < 0 || node >= num_coarse_nodes())
    throw std::out_of_range("coarse node " + std::to_string(node) + " out of range");
  return patches_[static_cast<std::size_t>(node)];
}

int NestedMesh::fine_node_of(int element, int a, int b) const {
  const int nf = fine_cells_per_axis();
  const int fx = ((element % coarse_) * ratio_ + a) % nf;
  if (dimension_ == 1) return fx;
  const int fy = ((element / coarse_) * ratio_ + b) % nf;
  return fy * nf + fx;
}

std::vector<int> NestedMesh::fine_cells_of(int element) const {
  std::vector<int> cells;
  const int nf = fine_cells_per_axis();
  const int x0 = (element % coarse_) * ratio_;
  if (dimension_ == 1) {
    for (int a = 0; a < ratio_; ++a) cells.push_back(x0 + a);
    return cells;
  }
  const int y0 = (element / coarse_) * ratio_;
  for (int b = 0; b < ratio_; ++b)
    for (int a = 0; a < ratio_; ++a) cells.push_back((y0 + b) * nf + x0 + a);
  return cells;
}

NestedMesh build_nested_mesh(int dimension, int coarse_cells_per_axis, int refinement_ratio,
                             Real lower, Real upper) {
  return NestedMesh(dimension, coarse_cells_per_axis, refinement_ratio, lower, upper);
}

}  // namespace msap
