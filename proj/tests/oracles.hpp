#pragma once

// Reference computations that share no code with the library.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 4000) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Orthonormal polynomials in t = xi / w under the uniform probability
// measure, by Gram-Schmidt on monomials with Simpson inner products.
// Returns coefficient rows: p_n(t) = sum_k c(n, k) t^k.
inline Matrix gram_schmidt_monomials(int order) {
  auto inner = [&](const Vector& a, const Vector& b) {
    auto eval = [](const Vector& c, double t) {
      double v = 0, pw = 1;
      for (int k = 0; k < c.size(); ++k) {
        v += c(k) * pw;
        pw *= t;
      }
      return v;
    };
    return 0.5 * simpson([&](double t) { return eval(a, t) * eval(b, t); }, -1.0, 1.0, 20000);
  };
  Matrix coeffs = Matrix::Zero(order, order);
  for (int n = 0; n < order; ++n) {
    Vector v = Vector::Zero(order);
    v(n) = 1.0;
    for (int k = 0; k < n; ++k) {
      const Vector q = coeffs.row(k).transpose();
      v -= inner(v, q) * q;
    }
    v /= std::sqrt(inner(v, v));
    coeffs.row(n) = v.transpose();
  }
  return coeffs;
}

inline double poly(const Matrix& coeffs, int n, double t) {
  double v = 0, pw = 1;
  for (int k = 0; k < coeffs.cols(); ++k) {
    v += coeffs(n, k) * pw;
    pw *= t;
  }
  return v;
}

// <g(xi) p_m p_n> under the uniform probability measure on [-w, w].
inline Matrix velocity_moment(int order, double w, const std::function<double(double)>& g) {
  const Matrix c = gram_schmidt_monomials(order);
  Matrix out(order, order);
  for (int m = 0; m < order; ++m) {
    for (int n = 0; n < order; ++n) {
      out(m, n) = 0.5 * simpson([&](double t) { return g(w * t) * poly(c, m, t) * poly(c, n, t); },
                                -1.0, 1.0, 20000);
    }
  }
  return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Row-major flattening: index m * N + n.
inline Vector flatten(const Matrix& m) {
  Vector v(m.size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

inline Matrix unflatten(const Vector& v, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  return m;
}

struct MonolithicInput {
  Matrix even_mass, even_relaxation;   // Phi, Sigma_inv (or Sigma, Phi)
  std::vector<Matrix> even_coupling;   // Xi^k (or Sigma^k)
  Matrix odd_mass, odd_relaxation;     // Sigma, Phi
  std::vector<Matrix> odd_coupling;    // Sigma^k
  std::vector<Matrix> flux;            // F_cos (, F_sin)
  Matrix projection;                   // P
  double epsilon = 1, dt = 1;
};

// One backward Euler step of the full 2MN x 2MN block system, written out
// term by term and solved densely.
inline void monolithic_step(const MonolithicInput& in, const Matrix& alpha0, const Matrix& beta0,
                            Matrix& alpha1, Matrix& beta1) {
  const int m = static_cast<int>(alpha0.rows());
  const int n = static_cast<int>(alpha0.cols());
  const int size = m * n;
  const Matrix id = Matrix::Identity(n, n);
  const double c1 = in.dt / (in.epsilon * in.epsilon);
  const double c2 = in.dt / in.epsilon;
  Matrix big = Matrix::Zero(2 * size, 2 * size);
  big.topLeftCorner(size, size) = kron(in.even_mass, id) + c1 * kron(in.even_relaxation, id - in.projection);
  big.bottomRightCorner(size, size) = kron(in.odd_mass, id) + c1 * kron(in.odd_relaxation, id);
  for (std::size_t k = 0; k < in.flux.size(); ++k) {
    big.topRightCorner(size, size) += c2 * kron(in.even_coupling[k], in.flux[k]);
    big.bottomLeftCorner(size, size) += c2 * kron(in.odd_coupling[k], in.flux[k]);
  }
  Vector rhs(2 * size);
  rhs.head(size) = kron(in.even_mass, id) * flatten(alpha0);
  rhs.tail(size) = kron(in.odd_mass, id) * flatten(beta0);
  const Vector x = big.fullPivLu().solve(rhs);
  alpha1 = unflatten(x.head(size), m, n);
  beta1 = unflatten(x.tail(size), m, n);
}

}  // namespace oracle
