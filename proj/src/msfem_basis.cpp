#include "msap/msfem_basis.hpp"

#include <Eigen/SparseCholesky>
#include <string>

#include "fine_element.hpp"
#include "msap/errors.hpp"

namespace msap {

namespace {

// Hat trace of corner c at local node (a, b) of an r x r element grid.
Real hat_value(int dimension, int r, int corner, int a, int b) {
  const Real tx = static_cast<Real>(a) / r;
  const Real lx = (corner % 2) ? tx : 1 - tx;
  if (dimension == 1) return lx;
  const Real ty = static_cast<Real>(b) / r;
  const Real ly = (corner / 2) ? ty : 1 - ty;
  return lx * ly;
}

template <class Solver>
void factorize_or_throw(Solver& solver, const SparseMatrix& k, const std::string& what) {
  solver.compute(k);
  if (solver.info() != Eigen::Success) throw AssemblyError(what + ": factorization failed");
  const auto d = solver.vectorD();
  if (d.size() > 0 && !(d.minCoeff() > 0))
    throw AssemblyError(what + ": system is not positive definite");
}

}  // namespace

Vector BasisSet::global_values(int node) const {
  Vector c = Vector::Zero(mesh.num_coarse_nodes());
  c(node) = 1;
  return combine(c);
}

Vector BasisSet::combine(const Vector& coefficients) const {
  const int r = mesh.ratio();
  const int nf = mesh.fine_cells_per_axis();
  const int d = mesh.dimension();
  Vector out(mesh.num_fine_nodes());
  for (int k = 0; k < mesh.num_fine_nodes(); ++k) {
    const int fx = k % nf;
    const int fy = d == 1 ? 0 : k / nf;
    const int element = d == 1 ? fx / r : (fy / r) * mesh.coarse_cells_per_axis() + fx / r;
    const int a = fx % r;
    const int b = fy % r;
    const int row = b * (r + 1) + a;
    const auto nodes = mesh.element_nodes(element);
    const Matrix& values = local[static_cast<std::size_t>(element)];
    Real v = 0;
    for (std::size_t c = 0; c < nodes.size(); ++c)
      v += coefficients(nodes[c]) * values(row, static_cast<int>(c));
    out(k) = v;
  }
  return out;
}

Matrix affine_local_basis(const NestedMesh& mesh) {
  const int r = mesh.ratio();
  const int d = mesh.dimension();
  const int rows = mesh.local_nodes_per_element();
  Matrix out(rows, mesh.corners_per_element());
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < out.cols(); ++c)
      out(i, c) = hat_value(d, r, c, i % (r + 1), d == 1 ? 0 : i / (r + 1));
  return out;
}

Matrix solve_local_basis(const NestedMesh& mesh, const MediaSpec& media, int element) {
  const int r = mesh.ratio();
  const int d = mesh.dimension();
  if (r < 2) throw ConfigError("multiscale basis needs at least 2 fine cells per element axis");
  if (media.dimension() != d) throw ConfigError("media and mesh dimensions differ");

  const Real h = mesh.fine_size();
  const Point origin = mesh.element_origin(element);
  const int side = r + 1;
  const int n = mesh.local_nodes_per_element();

  // Interior numbering; boundary nodes keep -1.
  std::vector<int> interior(static_cast<std::size_t>(n), -1);
  int n_interior = 0;
  for (int i = 0; i < n; ++i) {
    const int a = i % side;
    const int b = d == 1 ? 1 : i / side;
    if (a > 0 && a < r && b > 0 && b < r) interior[static_cast<std::size_t>(i)] = n_interior++;
  }

  Matrix out = affine_local_basis(mesh);
  if (n_interior == 0) return out;

  std::vector<Triplet> trip;
  Matrix rhs = Matrix::Zero(n_interior, out.cols());
  const int cells = d == 1 ? r : r * r;
  const Eigen::Matrix4d kq = detail::q1_stiffness(h, h);
  const Eigen::Matrix2d kp = detail::p1_stiffness(h);
  for (int cell = 0; cell < cells; ++cell) {
    const int ca = cell % r;
    const int cb = d == 1 ? 0 : cell / r;
    const Point centre{origin.x + (ca + 0.5) * h, d == 1 ? 0.0 : origin.y + (cb + 0.5) * h};
    const Real a = evaluate_media(media, centre);
    const int corners = d == 1 ? 2 : 4;
    int ids[4];
    for (int c = 0; c < corners; ++c) ids[c] = (cb + c / 2) * side + ca + c % 2;
    for (int i = 0; i < corners; ++i) {
      const int row = interior[static_cast<std::size_t>(ids[i])];
      if (row < 0) continue;
      for (int j = 0; j < corners; ++j) {
        const Real kij = a * (d == 1 ? kp(i, j) : kq(i, j));
        const int col = interior[static_cast<std::size_t>(ids[j])];
        if (col >= 0)
          trip.emplace_back(row, col, kij);
        else
          rhs.row(row) -= kij * out.row(ids[j]);
      }
    }
  }
  SparseMatrix k(n_interior, n_interior);
  k.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SparseMatrix> solver;
  factorize_or_throw(solver, k, "local basis on element " + std::to_string(element));
  const Matrix sol = solver.solve(rhs);
  for (int i = 0; i < n; ++i) {
    const int row = interior[static_cast<std::size_t>(i)];
    if (row >= 0) out.row(i) = sol.row(row);
  }
  return out;
}

BasisSet build_global_basis(const NestedMesh& mesh, const MediaSpec& media, BasisMode mode,
                            int threads) {
  if (media.dimension() != mesh.dimension())
    throw ConfigError("media and mesh dimensions differ");
  BasisSet set{mode, mesh, {}};
  set.local.resize(static_cast<std::size_t>(mesh.num_elements()));
  if (mode == BasisMode::Affine) {
    const Matrix hat = affine_local_basis(mesh);
    for (auto& m : set.local) m = hat;
    return set;
  }
  detail::parallel_for(mesh.num_elements(), threads, [&](int e) {
    set.local[static_cast<std::size_t>(e)] = solve_local_basis(mesh, media, e);
  });
  return set;
}

HomogenizationResult homogenized_coefficient(const MediaSpec& media, int cell_resolution) {
  if (cell_resolution < 16) throw ConfigError("cell resolution must be at least 16");
  const int d = media.dimension();
  const int n = cell_resolution;
  const Real hx = media.period().x() / n;
  const Real hy = d == 2 ? media.period().y() / n : 1.0;
  const int nodes = d == 1 ? n : n * n;
  const Real cell_measure = hx * hy;
  const Real volume = cell_measure * nodes;

  std::vector<Triplet> trip;
  Matrix load = Matrix::Zero(nodes, d);  // g_e(i) = int a e . grad v_i
  Real mean_a = 0;
  const Eigen::Matrix4d kq = detail::q1_stiffness(hx, hy);
  const Eigen::Matrix2d kp = detail::p1_stiffness(hx);
  for (int cell = 0; cell < nodes; ++cell) {
    const int ci = cell % n;
    const int cj = d == 1 ? 0 : cell / n;
    const Real a = evaluate_media(media, Point{(ci + 0.5) * hx, d == 1 ? 0.0 : (cj + 0.5) * hy});
    mean_a += a * cell_measure;
    const int corners = d == 1 ? 2 : 4;
    int ids[4];
    for (int c = 0; c < corners; ++c) {
      const int ix = (ci + c % 2) % n;
      const int iy = (cj + c / 2) % n;
      ids[c] = d == 1 ? ix : iy * n + ix;
    }
    for (int i = 0; i < corners; ++i) {
      for (int j = 0; j < corners; ++j)
        trip.emplace_back(ids[i], ids[j], a * (d == 1 ? kp(i, j) : kq(i, j)));
      // int over the cell of d(phi_i)/dx is +-hy/2 (or +-1 in 1D).
      const Real sx = (i % 2) ? 1.0 : -1.0;
      load(ids[i], 0) += a * (d == 1 ? sx : sx * hy / 2);
      if (d == 2) load(ids[i], 1) += a * ((i / 2) ? 1.0 : -1.0) * hx / 2;
    }
  }
  mean_a /= volume;

  SparseMatrix k(nodes, nodes);
  k.setFromTriplets(trip.begin(), trip.end());
  // Pin node 0 to remove the constant null vector, then shift to zero mean.
  const SparseMatrix reduced = k.bottomRightCorner(nodes - 1, nodes - 1);
  Eigen::SimplicialLDLT<SparseMatrix> solver;
  factorize_or_throw(solver, reduced, "cell problem");

  HomogenizationResult result;
  result.resolution = n;
  Matrix chi(nodes, d);
  for (int e = 0; e < d; ++e) {
    Vector x = Vector::Zero(nodes);
    x.tail(nodes - 1) = solver.solve(Vector(-load.col(e).tail(nodes - 1)));
    x.array() -= x.mean();
    chi.col(e) = x;
    result.correctors.push_back(x);
  }
  const Matrix energy = load.transpose() * chi;
  result.a_hom = mean_a * Matrix::Identity(d, d) + energy / volume;
  result.a_hom = (0.5 * (result.a_hom + result.a_hom.transpose())).eval();
  return result;
}

}  // namespace msap
