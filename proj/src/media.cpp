#include "msap/media.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "msap/errors.hpp"

namespace msap {

namespace {

std::string point_string(Real x, Real y, int dimension) {
  std::ostringstream os;
  os.precision(17);
  if (dimension == 1)
    os << "(" << x << ")";
  else
    os << "(" << x << ", " << y << ")";
  return os.str();
}

// Index of the interval [grid[i], grid[i+1]] containing t, with t wrapped
// into [grid.front(), grid.back()).
std::pair<std::size_t, Real> locate(const std::vector<Real>& grid, Real t) {
  const Real lo = grid.front();
  const Real span = grid.back() - lo;
  Real s = std::fmod(t - lo, span);
  if (s < 0) s += span;
  s += lo;
  auto it = std::upper_bound(grid.begin(), grid.end(), s);
  std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  i = std::min(i, grid.size() - 2);
  const Real w = (s - grid[i]) / (grid[i + 1] - grid[i]);
  return {i, w};
}

bool divides_domain(Real period, Real length) {
  const Real ratio = length / period;
  return std::abs(ratio - std::round(ratio)) < 1e-9 * std::max<Real>(1.0, ratio);
}

}  // namespace

Real TabulatedField::operator()(Point p) const {
  const auto [i, wx] = locate(xs, p.x);
  if (ys.empty())
    return (1 - wx) * values(0, i) + wx * values(0, i + 1);
  const auto [j, wy] = locate(ys, p.y);
  return (1 - wx) * (1 - wy) * values(j, i) + wx * (1 - wy) * values(j, i + 1) +
         (1 - wx) * wy * values(j + 1, i) + wx * wy * values(j + 1, i + 1);
}

MediaSpec::MediaSpec(std::string name, int dimension, Real delta, Vec2 period,
                     Evaluator evaluator)
    : name_(std::move(name)),
      dimension_(dimension),
      delta_(delta),
      period_(period),
      evaluator_(std::move(evaluator)) {
  if (dimension_ != 1 && dimension_ != 2)
    throw ConfigError("media dimension must be 1 or 2");
  if (!(delta_ > 0) || !(period_.x() > 0) || (dimension_ == 2 && !(period_.y() > 0)))
    throw ConfigError("media '" + name_ + "': delta and period must be positive");
}

MediaSpec MediaSpec::constant(Real value, int dimension) {
  MediaSpec media("constant", dimension, 2.0, Vec2(2.0, 2.0),
                  [value](Real, Real) { return value; });
  media.constant_ = value;
  return media;
}

MediaSpec MediaSpec::tabulated(std::string name, TabulatedField field) {
  if (field.xs.size() < 2 || (field.dimension() == 2 && field.ys.size() < 2))
    throw ConfigError("tabulated media needs at least two nodes per axis");
  const Real px = field.xs.back() - field.xs.front();
  const Real py = field.ys.empty() ? px : field.ys.back() - field.ys.front();
  const int dim = field.dimension();
  return MediaSpec(std::move(name), dim, std::min(px, py), Vec2(px, py),
                   [f = std::move(field)](Real x, Real y) { return f(Point{x, y}); });
}

Real evaluate_media(const MediaSpec& media, Point point) {
  const Real value = media(point);
  if (!(value > 0) || !std::isfinite(value))
    throw InvalidMediaError("media '" + media.name() + "' is not positive at " +
                                point_string(point.x, point.y, media.dimension()),
                            point.x, point.y);
  return value;
}

const std::vector<std::string>& builtin_media_names() {
  static const std::vector<std::string> names = {"sine10", "sine20", "cos_delta",
                                                 "aniso2d", "benchmark2d"};
  return names;
}

MediaSpec builtin_media(const std::string& name, std::optional<Real> delta) {
  auto check_fixed = [&](Real expected) {
    if (delta && std::abs(*delta - expected) > 1e-12)
      throw ConfigError("media '" + name + "' has fixed delta " + std::to_string(expected));
    return expected;
  };
  if (name == "sine10") {
    const Real d = check_fixed(0.2);
    return MediaSpec(name, 1, d, Vec2(d, d),
                     [](Real x, Real) { return 1.1 + std::sin(10 * kPi * x); });
  }
  if (name == "sine20") {
    const Real d = check_fixed(0.1);
    return MediaSpec(name, 1, d, Vec2(d, d),
                     [](Real x, Real) { return 1.1 + std::sin(20 * kPi * x); });
  }
  if (name == "cos_delta") {
    if (!delta) throw ConfigError("media 'cos_delta' requires delta");
    const Real d = *delta;
    if (!(d > 0) || !divides_domain(d, 2.0))
      throw ConfigError("media 'cos_delta': delta must divide the domain length 2");
    return MediaSpec(name, 1, d, Vec2(d, d), [d](Real x, Real) {
      return 1.0 / (std::cos(2 * kPi * x / d) + 4.0);
    });
  }
  if (name == "aniso2d") {
    const Real d = check_fixed(0.2);
    return MediaSpec(name, 2, d, Vec2(1.0, 0.2), [](Real x, Real y) {
      return 1.1 + std::sin(2 * kPi * x) * std::sin(10 * kPi * y);
    });
  }
  if (name == "benchmark2d") {
    const Real d = check_fixed(0.2);
    return MediaSpec(name, 2, d, Vec2(d, d), [](Real x, Real y) {
      const Real sx = std::sin(10 * kPi * x);
      return (2 + 1.8 * sx) / (2 + 1.8 * std::cos(10 * kPi * y)) +
             (2 + std::sin(10 * kPi * y)) / (2 + 1.8 * sx);
    });
  }
  throw ConfigError("unknown media '" + name + "'");
}

void validate_media(const MediaSpec& media, Real lower, Real upper,
                    int samples_per_period) {
  const Real length = upper - lower;
  auto count = [&](Real period) {
    return std::max(1, static_cast<int>(std::ceil(length / period * samples_per_period)));
  };
  const int nx = count(media.period().x());
  const int ny = media.dimension() == 2 ? count(media.period().y()) : 1;
  for (int j = 0; j < ny; ++j) {
    const Real y = media.dimension() == 2 ? lower + length * j / ny : 0.0;
    for (int i = 0; i < nx; ++i)
      evaluate_media(media, Point{lower + length * i / nx, y});
  }
}

TabulatedField read_media_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open media table '" + path + "'");
  std::vector<std::vector<Real>> rows;
  std::string line;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<Real> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw ConfigError(path + ":" + std::to_string(line_no) + ": non-numeric entry");
    }
    if (columns == 0) columns = row.size();
    if (row.size() != columns || (columns != 2 && columns != 3))
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected columns x[,y],value");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path + ": empty media table");

  TabulatedField field;
  std::map<Real, std::size_t> xi, yi;
  for (const auto& r : rows) {
    xi.emplace(r[0], 0);
    if (columns == 3) yi.emplace(r[1], 0);
  }
  for (auto& [v, idx] : xi) {
    idx = field.xs.size();
    field.xs.push_back(v);
  }
  for (auto& [v, idx] : yi) {
    idx = field.ys.size();
    field.ys.push_back(v);
  }
  const std::size_t ny = columns == 3 ? field.ys.size() : 1;
  if (rows.size() != field.xs.size() * ny)
    throw ConfigError(path + ": media table is not a full tensor grid");
  field.values = Matrix::Constant(static_cast<Eigen::Index>(ny),
                                  static_cast<Eigen::Index>(field.xs.size()),
                                  std::numeric_limits<Real>::quiet_NaN());
  for (const auto& r : rows) {
    const auto i = static_cast<Eigen::Index>(xi.at(r[0]));
    const auto j = columns == 3 ? static_cast<Eigen::Index>(yi.at(r[1])) : 0;
    field.values(j, i) = r.back();
  }
  if (field.values.hasNaN()) throw ConfigError(path + ": duplicate or missing grid nodes");
  return field;
}

}  // namespace msap
