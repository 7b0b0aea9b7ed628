#include <doctest.h>

#include <cmath>

#include "msap/errors.hpp"
#include "msap/metrics.hpp"

using namespace msap;

TEST_SUITE("metrics") {

TEST_CASE("error norm basics") {
  const NestedMesh mesh = build_nested_mesh(1, 10, 1);
  const Vector a = Vector::LinSpaced(10, -1, 3);
  CHECK(error_norm(a, a, mesh) == 0.0);
  CHECK(error_norm(a, (a.array() + 0.3).matrix(), mesh) == doctest::Approx(0.3 * std::sqrt(2.0)));
  const NestedMesh mesh2 = build_nested_mesh(2, 6, 1);
  const Vector z = Vector::Zero(36);
  CHECK(error_norm(Vector::Constant(36, 0.5), z, mesh2) == doctest::Approx(0.5 * 2.0));
  CHECK_THROWS_AS(error_norm(a, Vector::Zero(9), mesh), MetricError);
}

TEST_CASE("discrete norm of sin(pi x) converges to the analytic L2 norm") {
  double previous = 1e300;
  for (int cells : {4, 8, 16, 64}) {
    const NestedMesh mesh = build_nested_mesh(1, cells, 1);
    Vector f(cells);
    for (int m = 0; m < cells; ++m) f(m) = std::sin(kPi * mesh.coarse_node(m).x);
    const double gap = std::abs(error_norm(f, Vector::Zero(cells), mesh) - 1.0);
    CHECK(gap <= previous);
    previous = gap;
  }
  CHECK(previous <= 1e-12);
}

TEST_CASE("kinetic norm counts every velocity mode") {
  const NestedMesh mesh = build_nested_mesh(1, 4, 1);
  KineticState st{Matrix::Zero(4, 3), Matrix::Zero(4, 3), 0};
  st.alpha.col(0).setConstant(2.0);
  st.alpha(1, 2) = 0.3;
  st.beta(2, 1) = 0.4;
  const Vector rho = Vector::Constant(4, 2.0);
  CHECK(kinetic_error_norm(st, rho, mesh) == doctest::Approx(std::sqrt((0.09 + 0.16) * 0.5)));
  CHECK(kinetic_error_norm(st, rho, mesh) >= error_norm(density(st), rho, mesh));
  CHECK_THROWS_AS(kinetic_error_norm(st, Vector::Zero(3), mesh), MetricError);
}

TEST_CASE("rate fitting") {
  std::vector<std::pair<double, double>> linear, quadratic;
  for (double x : {0.5, 0.25, 0.125, 0.0625}) {
    linear.emplace_back(x, 3 * x);
    quadratic.emplace_back(x, 5 * x * x);
  }
  const RateFit l = fit_rate(linear);
  CHECK(l.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l.residual <= 1e-12);
  CHECK(std::exp(l.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit_rate(quadratic).slope == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<std::pair<double, double>> noisy = {{1, 1}, {2, 2.5}, {4, 3.5}};
  CHECK(fit_rate(noisy).residual > 0);
  CHECK_THROWS_AS(fit_rate({{1, 1}, {2, 2}}), MetricError);
  CHECK_THROWS_AS(fit_rate({{1, 1}, {2, 0}, {3, 1}}), MetricError);
  CHECK_THROWS_AS(fit_rate({{-1, 1}, {2, 1}, {3, 1}}), MetricError);
}

}
