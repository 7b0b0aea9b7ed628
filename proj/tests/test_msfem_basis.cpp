#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "msap/errors.hpp"
#include "msap/msfem_basis.hpp"
#include "oracles.hpp"

using namespace msap;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

MediaSpec layered(double period) {
  return MediaSpec("layered", 2, period, Vec2(period, period), [period](double, double y) {
    return 2.0 + std::sin(2 * kPi * y / period) + 0.5 * std::cos(4 * kPi * y / period);
  });
}

}  // namespace

TEST_SUITE("msfem_basis") {

TEST_CASE("constant media gives the bilinear shape functions") {
  for (int dim : {1, 2}) {
    const NestedMesh mesh = build_nested_mesh(dim, 3, 6);
    const MediaSpec c = MediaSpec::constant(2.7, dim);
    const Matrix hats = affine_local_basis(mesh);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      CHECK(max_abs(solve_local_basis(mesh, c, e) - hats) <= 1e-12);
    }
  }
}

TEST_CASE("1D local basis is the normalized running integral of 1/a") {
  const MediaSpec media = builtin_media("sine20");
  const int r = 64;
  const NestedMesh mesh = build_nested_mesh(1, 8, r);
  const double h = mesh.fine_size();
  for (int e : {0, 3, 6}) {
    const Matrix local = solve_local_basis(mesh, media, e);
    const double xl = mesh.element_origin(e).x;
    const auto inv = [&](double x) { return 1.0 / media(x); };
    const double total = oracle::simpson(inv, xl, xl + mesh.coarse_size(), 20000);
    // Midpoint sums reproduce the fine P1 solution exactly.
    double running = 0, total_mid = 0;
    for (int i = 0; i < r; ++i) total_mid += 1.0 / media(xl + (i + 0.5) * h);
    for (int i = 0; i <= r; ++i) {
      const double x = xl + i * h;
      const double exact = oracle::simpson(inv, xl, x, 2 * std::max(i, 1) * 50) / total;
      CHECK(std::abs(local(i, 1) - exact) <= 2e-3);
      CHECK(std::abs(local(i, 1) - running / total_mid) <= 1e-12);
      CHECK(std::abs(local(i, 0) + local(i, 1) - 1.0) <= 1e-12);
      if (i < r) running += 1.0 / media(xl + (i + 0.5) * h);
    }
  }
}

TEST_CASE("local functions stay within [0, 1] and sum to one") {
  const NestedMesh mesh = build_nested_mesh(2, 5, 8);
  const MediaSpec media = builtin_media("benchmark2d");
  for (int e = 0; e < mesh.num_elements(); e += 3) {
    const Matrix local = solve_local_basis(mesh, media, e);
    CHECK(local.minCoeff() >= -1e-10);
    CHECK(local.maxCoeff() <= 1 + 1e-10);
    CHECK((local.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("local problems need two fine cells per axis") {
  const NestedMesh mesh = build_nested_mesh(1, 4, 1);
  CHECK_THROWS_AS(solve_local_basis(mesh, builtin_media("sine10"), 0), ConfigError);
  CHECK_THROWS_AS(build_global_basis(build_nested_mesh(2, 4, 4), builtin_media("sine10"),
                                     BasisMode::Multiscale),
                  ConfigError);
}

TEST_CASE("affine mode gives standard 1D hats") {
  const NestedMesh mesh = build_nested_mesh(1, 5, 4);
  const BasisSet basis = build_global_basis(mesh, MediaSpec::constant(1, 1), BasisMode::Affine);
  const double big_h = mesh.coarse_size();
  for (int l = 0; l < mesh.num_coarse_nodes(); ++l) {
    const Vector phi = basis.global_values(l);
    const double xl = mesh.coarse_node(l).x;
    for (int j = 0; j < mesh.num_fine_nodes(); ++j) {
      double d = std::abs(mesh.fine_node(j).x - xl);
      d = std::min(d, mesh.length() - d);
      CHECK(phi(j) == doctest::Approx(std::max(0.0, 1 - d / big_h)).epsilon(1e-12));
    }
  }
}

TEST_CASE("multiscale with unit media equals affine") {
  for (int dim : {1, 2}) {
    const NestedMesh mesh = build_nested_mesh(dim, 4, 4);
    const MediaSpec one = MediaSpec::constant(1, dim);
    const BasisSet ms = build_global_basis(mesh, one, BasisMode::Multiscale);
    const BasisSet af = build_global_basis(mesh, one, BasisMode::Affine);
    for (int e = 0; e < mesh.num_elements(); ++e) CHECK(max_abs(ms.local[e] - af.local[e]) <= 1e-12);
  }
}

TEST_CASE("global basis: nodal property, partition of unity, patch support") {
  const struct {
    int dim;
    const char* media;
  } cases[] = {{1, "sine10"}, {2, "aniso2d"}, {2, "benchmark2d"}};
  for (const auto& c : cases) {
    CAPTURE(c.media);
    const NestedMesh mesh = build_nested_mesh(c.dim, 4, 6);
    const BasisSet basis = build_global_basis(mesh, builtin_media(c.media), BasisMode::Multiscale, 2);
    Vector sum = Vector::Zero(mesh.num_fine_nodes());
    for (int l = 0; l < mesh.num_coarse_nodes(); ++l) {
      const Vector phi = basis.global_values(l);
      sum += phi;
      for (int j = 0; j < mesh.num_coarse_nodes(); ++j) {
        CHECK(phi(mesh.fine_index_of_coarse(j)) == (l == j ? 1.0 : 0.0));
      }
      // Zero outside the patch: mark fine nodes of patch elements.
      std::vector<bool> inside(static_cast<std::size_t>(mesh.num_fine_nodes()), false);
      const int r = mesh.ratio();
      for (int e : mesh.patch_of(l)) {
        for (int b = 0; b <= (c.dim == 2 ? r : 0); ++b)
          for (int a = 0; a <= r; ++a) inside[static_cast<std::size_t>(mesh.fine_node_of(e, a, b))] = true;
      }
      for (int j = 0; j < mesh.num_fine_nodes(); ++j) {
        if (!inside[static_cast<std::size_t>(j)]) CHECK(phi(j) == 0.0);
      }
    }
    CHECK((sum.array() - 1.0).abs().maxCoeff() <= 1e-10);
    CHECK((basis.combine(Vector::Ones(mesh.num_coarse_nodes())).array() - 1.0).abs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("multiscale basis approaches the hats as the media period grows") {
  const NestedMesh mesh = build_nested_mesh(1, 8, 32);
  const BasisSet hats = build_global_basis(mesh, MediaSpec::constant(1, 1), BasisMode::Affine);
  double previous = 1e300;
  for (double delta : {0.25, 1.0, 2.0}) {
    const BasisSet ms = build_global_basis(mesh, builtin_media("cos_delta", delta), BasisMode::Multiscale);
    double dev = 0;
    for (int l = 0; l < mesh.num_coarse_nodes(); ++l) {
      dev = std::max(dev, (ms.global_values(l) - hats.global_values(l)).cwiseAbs().maxCoeff());
    }
    CHECK(dev < previous);
    previous = dev;
  }
}

TEST_CASE("homogenized coefficient of constant media") {
  for (int dim : {1, 2}) {
    const auto res = homogenized_coefficient(MediaSpec::constant(3.25, dim), 32);
    CHECK(max_abs(res.a_hom - 3.25 * Matrix::Identity(dim, dim)) <= 1e-10);
    for (const Vector& chi : res.correctors) CHECK(chi.cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("homogenized coefficient of the cosine media is one quarter") {
  for (double delta : {0.125, 0.025}) {
    const auto res = homogenized_coefficient(builtin_media("cos_delta", delta), 128);
    CHECK(std::abs(res.a_hom(0, 0) - 0.25) <= 1e-4);
    CHECK(std::abs(res.correctors[0].mean()) <= 1e-12);
  }
}

TEST_CASE("layered media give arithmetic and harmonic means") {
  const double period = 0.5;
  const MediaSpec m = layered(period);
  const auto g = [&](double y) { return m(0.0, y); };
  const double arith = oracle::simpson(g, 0, period, 20000) / period;
  const double harm = period / oracle::simpson([&](double y) { return 1 / g(y); }, 0, period, 20000);
  const auto res = homogenized_coefficient(m, 128);
  CHECK(std::abs(res.a_hom(0, 0) - arith) <= 1e-3);
  CHECK(std::abs(res.a_hom(1, 1) - harm) <= 1e-3);
  CHECK(std::abs(res.a_hom(0, 1)) <= 1e-10);
  for (const Vector& chi : res.correctors) CHECK(std::abs(chi.mean()) <= 1e-12);
}

TEST_CASE("homogenization sandwich, symmetry and refinement stability") {
  for (const char* name : {"sine10", "sine20", "aniso2d", "benchmark2d"}) {
    CAPTURE(name);
    const MediaSpec m = builtin_media(name);
    const auto r128 = homogenized_coefficient(m, 128);
    const auto r64 = homogenized_coefficient(m, 64);
    const int d = m.dimension();
    CHECK(max_abs(r128.a_hom - r128.a_hom.transpose()) <= 1e-10);
    // Cell means of a and 1/a by a fine midpoint rule.
    const int n = 400;
    double sum = 0, inv = 0;
    for (int j = 0; j < (d == 2 ? n : 1); ++j) {
      for (int i = 0; i < n; ++i) {
        const double v = m((i + 0.5) * m.period().x() / n, d == 2 ? (j + 0.5) * m.period().y() / n : 0.0);
        sum += v;
        inv += 1 / v;
      }
    }
    const double count = d == 2 ? double(n) * n : n;
    const double arith = sum / count, harm = count / inv;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(r128.a_hom);
    CHECK(eig.eigenvalues().minCoeff() >= harm - 1e-3);
    CHECK(eig.eigenvalues().maxCoeff() <= arith + 1e-3);
    CHECK(max_abs(r128.a_hom - r64.a_hom) <= 1e-3 * max_abs(r128.a_hom));
  }
  CHECK_THROWS_AS(homogenized_coefficient(builtin_media("sine10"), 8), ConfigError);
}

}
