#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "msap/types.hpp"

namespace msap {

/// Nodal values of a coefficient on a tensor grid, evaluated by (bi)linear
/// interpolation. The grid extent is one period in each direction.
struct TabulatedField {
  std::vector<Real> xs;
  std::vector<Real> ys;  // empty in 1D
  Matrix values;         // ys.size() x xs.size() (1 x nx in 1D)

  int dimension() const { return ys.empty() ? 1 : 2; }
  Real operator()(Point p) const;
};

/// The inverse scattering coefficient a = 1 / sigma, periodic in space.
///
/// Instances are immutable; copies share the underlying evaluator.
class MediaSpec {
 public:
  using Evaluator = std::function<Real(Real, Real)>;

  MediaSpec(std::string name, int dimension, Real delta, Vec2 period,
            Evaluator evaluator);

  static MediaSpec constant(Real value, int dimension);
  static MediaSpec tabulated(std::string name, TabulatedField field);

  const std::string& name() const { return name_; }
  int dimension() const { return dimension_; }
  /// Oscillation length scale.
  Real delta() const { return delta_; }
  /// Period along x and y (y entry unused in 1D).
  const Vec2& period() const { return period_; }
  /// Constant value, if the media is constant.
  std::optional<Real> constant_value() const { return constant_; }

  /// Raw evaluation, no positivity check.
  Real operator()(Point p) const { return evaluator_(p.x, p.y); }
  Real operator()(Real x, Real y = 0.0) const { return evaluator_(x, y); }

 private:
  std::string name_;
  int dimension_;
  Real delta_;
  Vec2 period_;
  Evaluator evaluator_;
  std::optional<Real> constant_;
};

/// a(point), throwing InvalidMediaError if the value is not strictly positive.
Real evaluate_media(const MediaSpec& media, Point point);

/// Names accepted by builtin_media().
const std::vector<std::string>& builtin_media_names();

/// Media used in the numerical experiments:
///   sine10       1.1 + sin(10 pi x)
///   sine20       1.1 + sin(20 pi x)
///   cos_delta    1 / (cos(2 pi x / delta) + 4)
///   aniso2d      1.1 + sin(2 pi x) sin(10 pi y)
///   benchmark2d  (2 + 1.8 sin(10 pi x)) / (2 + 1.8 cos(10 pi y))
///                  + (2 + sin(10 pi y)) / (2 + 1.8 sin(10 pi x))
/// `delta` is required for cos_delta; for the fixed formulas it may be
/// omitted and must match the formula's period when given.
MediaSpec builtin_media(const std::string& name,
                        std::optional<Real> delta = std::nullopt);

/// Samples the media on [lower, upper]^d with `samples_per_period` points per
/// period per axis and throws InvalidMediaError at the first non-positive or
/// non-finite value.
void validate_media(const MediaSpec& media, Real lower = -1.0,
                    Real upper = 1.0, int samples_per_period = 64);

/// Reads a CSV table (header row, columns x[,y],value) on a full tensor grid.
TabulatedField read_media_table(const std::string& path);

}  // namespace msap
