#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace msap {

using Real = double;

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = DenseMatrix<Real>;
using Vector = DenseVector<Real>;
using SparseMatrix = Eigen::SparseMatrix<Real, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<Real>;
using Vec2 = Eigen::Matrix<Real, 2, 1>;
using Mat2 = Eigen::Matrix<Real, 2, 2>;

/// A point in one or two spatial dimensions; `y` is ignored in 1D.
struct Point {
  Real x = 0.0;
  Real y = 0.0;
};

inline constexpr Real kPi = 3.14159265358979323846264338327950288;

}  // namespace msap
