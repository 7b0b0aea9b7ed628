#include "msap/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <variant>

#include "fine_element.hpp"
#include "msap/errors.hpp"

namespace msap {

namespace {

using Coefficient = std::variant<const MediaSpec*, Mat2>;

// Element-local contributions, one (corners x corners) block per matrix.
struct LocalBlocks {
  Matrix mass, weighted, inverse_weighted, stiffness;
  Matrix gradient[2], weighted_gradient[2];
};

Mat2 as_mat2(const Matrix& a, int d) {
  if (a.rows() != d || a.cols() != d)
    throw AssemblyError("homogenized coefficient must be " + std::to_string(d) + "x" +
                        std::to_string(d));
  Mat2 m = Mat2::Zero();
  m.topLeftCorner(d, d) = a;
  return m;
}

LocalBlocks element_blocks(const BasisSet& basis, const Coefficient& coeff, int element) {
  const NestedMesh& mesh = basis.mesh;
  const int d = mesh.dimension();
  const int r = mesh.ratio();
  const int side = r + 1;
  const int nc = mesh.corners_per_element();
  const Real h = mesh.fine_size();
  const Real measure = mesh.fine_cell_measure();
  const Matrix& u = basis.local[static_cast<std::size_t>(element)];
  const Point origin = mesh.element_origin(element);
  const auto* media = std::holds_alternative<const MediaSpec*>(coeff)
                          ? std::get<const MediaSpec*>(coeff)
                          : nullptr;
  const Mat2 tensor = media ? Mat2::Identity() : std::get<Mat2>(coeff);

  LocalBlocks b;
  for (Matrix* m : {&b.mass, &b.weighted, &b.inverse_weighted, &b.stiffness, &b.gradient[0],
                    &b.gradient[1], &b.weighted_gradient[0], &b.weighted_gradient[1]})
    *m = Matrix::Zero(nc, nc);

  const Eigen::Matrix4d kq = detail::q1_stiffness(h, h, tensor);
  const Eigen::Matrix2d kp = detail::p1_stiffness(h);
  const int cells = d == 1 ? r : r * r;
  const int corners = d == 1 ? 2 : 4;
  Matrix cu(corners, nc);  // basis values at the fine cell's corners
  for (int cell = 0; cell < cells; ++cell) {
    const int ca = cell % r;
    const int cb = d == 1 ? 0 : cell / r;
    for (int c = 0; c < corners; ++c) cu.row(c) = u.row((cb + c / 2) * side + ca + c % 2);

    Real a = 1.0;
    if (media) {
      const Point centre{origin.x + (ca + 0.5) * h, d == 1 ? 0.0 : origin.y + (cb + 0.5) * h};
      a = evaluate_media(*media, centre);
    } else if (d == 1) {
      a = tensor(0, 0);
    }

    // Trapezoidal rule: cell measure times the corner average.
    const Matrix products = cu.transpose() * cu / corners;
    const Vector average = cu.colwise().sum().transpose() / corners;
    Vector grad[2];
    if (d == 1) {
      grad[0] = (cu.row(1) - cu.row(0)).transpose() / h;
    } else {
      grad[0] = (cu.row(1) + cu.row(3) - cu.row(0) - cu.row(2)).transpose() / (2 * h);
      grad[1] = (cu.row(2) + cu.row(3) - cu.row(0) - cu.row(1)).transpose() / (2 * h);
    }

    b.mass += measure * products;
    if (media) {
      b.weighted += measure * a * products;
      b.inverse_weighted += measure / a * products;
    }
    for (int k = 0; k < d; ++k) {
      const Matrix g = measure * average * grad[k].transpose();
      b.gradient[k] += g;
      if (media || d == 1) {
        b.weighted_gradient[k] += a * g;
      } else {
        const Vector flux = tensor(k, 0) * grad[0] + tensor(k, 1) * grad[1];
        b.weighted_gradient[k] += measure * average * flux.transpose();
      }
    }
    if (d == 1)
      b.stiffness -= a * cu.transpose() * kp * cu;
    else
      b.stiffness -= (media ? a : 1.0) * cu.transpose() * kq * cu;
  }
  return b;
}

SparseMatrix canonical(const std::vector<Triplet>& trip, int m) {
  SparseMatrix s(m, m);
  s.setFromTriplets(trip.begin(), trip.end());
  // Same sparsity as a dense round trip, so cached and fresh systems factor
  // identically.
  return Matrix(s).sparseView();
}

SpatialSystem assemble(const BasisSet& basis, const Coefficient& coeff, int threads) {
  const NestedMesh& mesh = basis.mesh;
  const int d = mesh.dimension();
  const int m = mesh.num_coarse_nodes();
  const bool scalar = std::holds_alternative<const MediaSpec*>(coeff);
  if (scalar && std::get<const MediaSpec*>(coeff)->dimension() != d)
    throw AssemblyError("media and basis dimensions differ");
  if (static_cast<int>(basis.local.size()) != mesh.num_elements())
    throw AssemblyError("basis does not match its mesh");

  std::vector<LocalBlocks> blocks(static_cast<std::size_t>(mesh.num_elements()));
  detail::parallel_for(mesh.num_elements(), threads, [&](int e) {
    blocks[static_cast<std::size_t>(e)] = element_blocks(basis, coeff, e);
  });

  std::vector<Triplet> t_mass, t_w, t_iw, t_k, t_g[2], t_wg[2];
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const LocalBlocks& b = blocks[static_cast<std::size_t>(e)];
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const int li = static_cast<int>(i), lj = static_cast<int>(j);
        t_mass.emplace_back(nodes[i], nodes[j], b.mass(li, lj));
        t_k.emplace_back(nodes[i], nodes[j], b.stiffness(li, lj));
        if (scalar) {
          t_w.emplace_back(nodes[i], nodes[j], b.weighted(li, lj));
          t_iw.emplace_back(nodes[i], nodes[j], b.inverse_weighted(li, lj));
        }
        for (int k = 0; k < d; ++k) {
          t_g[k].emplace_back(nodes[i], nodes[j], b.gradient[k](li, lj));
          t_wg[k].emplace_back(nodes[i], nodes[j], b.weighted_gradient[k](li, lj));
        }
      }
  }

  SpatialSystem sys;
  sys.dimension = d;
  sys.mode = basis.mode;
  sys.homogenized = !scalar;
  sys.mass = canonical(t_mass, m);
  sys.stiffness = canonical(t_k, m);
  if (scalar) {
    sys.weighted_mass = canonical(t_w, m);
    sys.inverse_weighted_mass = canonical(t_iw, m);
  }
  for (int k = 0; k < d; ++k) {
    sys.gradient[k] = canonical(t_g[k], m);
    sys.weighted_gradient[k] = canonical(t_wg[k], m);
  }
  compute_limit_operator(sys);
  return sys;
}

}  // namespace

SpatialSystem assemble_spatial(const BasisSet& basis, const MediaSpec& media, int threads) {
  return assemble(basis, Coefficient{&media}, threads);
}

SpatialSystem assemble_spatial(const BasisSet& basis, const Matrix& a_hom, int threads) {
  return assemble(basis, Coefficient{as_mat2(a_hom, basis.mesh.dimension())}, threads);
}

SparseMatrix assemble_heat(const BasisSet& basis, const MediaSpec& media) {
  return assemble_spatial(basis, media).stiffness;
}

SparseMatrix assemble_heat(const BasisSet& basis, const Matrix& a_hom) {
  return assemble_spatial(basis, a_hom).stiffness;
}

const Matrix& compute_limit_operator(SpatialSystem& system) {
  Eigen::SimplicialLDLT<SparseMatrix> mass;
  mass.compute(system.mass);
  if (mass.info() != Eigen::Success || !(mass.vectorD().minCoeff() > 0))
    throw AssemblyError("mass matrix factorization failed");
  const int m = system.size();
  system.limit = Matrix::Zero(m, m);
  for (int k = 0; k < system.dimension; ++k) {
    const Matrix flux = Matrix(system.weighted_gradient[k]);
    const Matrix inner = mass.solve(flux);
    system.limit_parts[k] = system.gradient[k] * inner;
    system.limit += system.limit_parts[k];
  }
  return system.limit;
}

Matrix velocity_weighted_limit(const SpatialSystem& system, const VelocitySystem& velocity) {
  if (velocity.spatial_axes() != system.dimension)
    throw AssemblyError("velocity and spatial dimensions differ");
  Matrix d = Matrix::Zero(system.size(), system.size());
  for (int k = 0; k < system.dimension; ++k)
    d += velocity.diffusion_constant(k) * system.limit_parts[k];
  return d;
}

}  // namespace msap
