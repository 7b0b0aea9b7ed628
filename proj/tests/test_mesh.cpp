#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "msap/errors.hpp"
#include "msap/mesh.hpp"

using namespace msap;

TEST_SUITE("mesh") {

TEST_CASE("uniform 1D grid arithmetic") {
  const NestedMesh m = build_nested_mesh(1, 4, 4);
  CHECK(m.num_coarse_nodes() == 4);
  CHECK(m.num_fine_cells() == 16);
  CHECK(m.coarse_size() == 0.5);
  CHECK(m.fine_size() == 0.125);
}

TEST_CASE("uniform 2D grid arithmetic") {
  const NestedMesh m = build_nested_mesh(2, 2, 2);
  CHECK(m.num_coarse_nodes() == 4);
  CHECK(m.num_fine_cells() == 16);
  CHECK(m.corners_per_element() == 4);
}

TEST_CASE("invalid construction") {
  CHECK_THROWS_AS(build_nested_mesh(1, 1, 4), ConfigError);
  CHECK_THROWS_AS(build_nested_mesh(2, 4, 0), ConfigError);
  CHECK_THROWS_AS(build_nested_mesh(3, 4, 2), ConfigError);
}

TEST_CASE("coarse nodes are exactly fine nodes") {
  for (int dim : {1, 2}) {
    const NestedMesh m = build_nested_mesh(dim, 5, 7);
    for (int node = 0; node < m.num_coarse_nodes(); ++node) {
      const Point c = m.coarse_node(node);
      const Point f = m.fine_node(m.fine_index_of_coarse(node));
      CHECK(c.x == f.x);
      CHECK(c.y == f.y);
    }
  }
}

TEST_CASE("element sub-grid reproduces the element corners") {
  for (int dim : {1, 2}) {
    const NestedMesh m = build_nested_mesh(dim, 3, 4);
    for (int e = 0; e < m.num_elements(); ++e) {
      const auto corners = m.element_nodes(e);
      const int r = m.ratio();
      if (dim == 1) {
        CHECK(m.fine_node_of(e, 0) == m.fine_index_of_coarse(corners[0]));
        CHECK(m.fine_node_of(e, r) == m.fine_index_of_coarse(corners[1]));
      } else {
        CHECK(m.fine_node_of(e, 0, 0) == m.fine_index_of_coarse(corners[0]));
        CHECK(m.fine_node_of(e, r, 0) == m.fine_index_of_coarse(corners[1]));
        CHECK(m.fine_node_of(e, 0, r) == m.fine_index_of_coarse(corners[2]));
        CHECK(m.fine_node_of(e, r, r) == m.fine_index_of_coarse(corners[3]));
      }
      const Point o = m.element_origin(e);
      const Point f = m.fine_node(m.fine_node_of(e, 0, 0));
      CHECK(o.x == f.x);
      CHECK(o.y == f.y);
    }
  }
}

TEST_CASE("periodic wrap identifies opposite boundary nodes") {
  const NestedMesh m = build_nested_mesh(1, 4, 2);
  const auto last = m.element_nodes(3);
  CHECK(last[0] == 3);
  CHECK(last[1] == 0);
  const NestedMesh m2 = build_nested_mesh(2, 3, 2);
  const auto corner = m2.element_nodes(8);
  CHECK(corner == std::vector<int>{8, 6, 2, 0});
}

TEST_CASE("patches") {
  const NestedMesh m1 = build_nested_mesh(1, 6, 2);
  const auto& p0 = m1.patch_of(0);
  CHECK(p0.size() == 2);
  CHECK(std::set<int>(p0.begin(), p0.end()) == std::set<int>{5, 0});
  CHECK_THROWS_AS(m1.patch_of(6), std::out_of_range);
  CHECK_THROWS_AS(m1.patch_of(-1), std::out_of_range);

  for (int dim : {1, 2}) {
    const NestedMesh m = build_nested_mesh(dim, 4, 2);
    std::map<int, int> uses;
    for (int node = 0; node < m.num_coarse_nodes(); ++node) {
      const auto& patch = m.patch_of(node);
      CHECK(patch.size() == (dim == 1 ? 2u : 4u));
      for (int e : patch) {
        ++uses[e];
        const auto nodes = m.element_nodes(e);
        CHECK(std::find(nodes.begin(), nodes.end(), node) != nodes.end());
      }
    }
    CHECK(static_cast<int>(uses.size()) == m.num_elements());
    for (const auto& [e, count] : uses) CHECK(count == (dim == 1 ? 2 : 4));
  }
}

TEST_CASE("element measures sum to the domain measure") {
  for (int dim : {1, 2}) {
    const NestedMesh m = build_nested_mesh(dim, 7, 3);
    CHECK(std::abs(m.num_elements() * m.element_measure() - m.domain_measure()) <= 1e-12);
    CHECK(std::abs(m.num_fine_cells() * m.fine_cell_measure() - m.domain_measure()) <= 1e-12);
  }
}

TEST_CASE("fine cells of an element tile it") {
  const NestedMesh m = build_nested_mesh(2, 3, 4);
  std::set<int> all;
  for (int e = 0; e < m.num_elements(); ++e) {
    const auto cells = m.fine_cells_of(e);
    CHECK(cells.size() == 16u);
    all.insert(cells.begin(), cells.end());
  }
  CHECK(static_cast<int>(all.size()) == m.num_fine_cells());
}

}
