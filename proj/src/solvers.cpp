#include "msap/solvers.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "msap/errors.hpp"

namespace msap {

namespace {

using RowMajorMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Coefficients are ordered alpha_11, alpha_12, ..., alpha_1N, alpha_21, ...
Vector to_vector(const Matrix& coeffs) {
  const RowMajorMatrix row = coeffs;
  return Eigen::Map<const Vector>(row.data(), row.size());
}

Matrix from_vector(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const RowMajorMatrix>(v.data(), rows, cols);
}

// out += scale * kron(a, b) for the row-major coefficient ordering.
template <class Lhs>
void add_kron(Matrix& out, const Lhs& a, const Matrix& b, Real scale) {
  const Eigen::Index n = b.rows();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const Real v = a(i, j);
      if (v != 0) out.block(i * n, j * n, n, n) += (scale * v) * b;
    }
}

void add_kron(Matrix& out, const SparseMatrix& a, const Matrix& b, Real scale) {
  const Eigen::Index n = b.rows();
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      out.block(it.row() * n, it.col() * n, n, n) += (scale * it.value()) * b;
}

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw SolverError(std::string("non-finite entries in ") + what);
}

}  // namespace

KineticState project_initial(const KineticFunction& f0, const NestedMesh& mesh,
                             const VelocitySystem& velocity) {
  const int m = mesh.num_coarse_nodes();
  const int n = velocity.order;
  const LegendreBasis basis(n, velocity.mode);
  KineticState state{Matrix::Zero(m, n), Matrix::Zero(m, n), 0.0};
  const GaussRule& rule = velocity.rule;
  for (int node = 0; node < m; ++node) {
    const Point x = mesh.coarse_node(node);
    Vector c = Vector::Zero(n);
    for (int k = 0; k < rule.size(); ++k)
      c += rule.weights(k) * f0(x, rule.nodes(k)) * basis(rule.nodes(k));
    // p_n has parity (-1)^(n-1): columns 1, 3, ... are even in xi.
    for (int j = 0; j < n; ++j) (j % 2 == 0 ? state.alpha : state.beta)(node, j) = c(j);
  }
  return state;
}

KineticState project_initial(const DensityFunction& rho0, const NestedMesh& mesh,
                             const VelocitySystem& velocity) {
  const int m = mesh.num_coarse_nodes();
  KineticState state{Matrix::Zero(m, velocity.order), Matrix::Zero(m, velocity.order), 0.0};
  for (int node = 0; node < m; ++node) state.alpha(node, 0) = rho0(mesh.coarse_node(node));
  return state;
}

TransportStepper::TransportStepper(const SpatialSystem& spatial, const VelocitySystem& velocity,
                                   StepperConfig config)
    : spatial_(&spatial), velocity_(&velocity), config_(config), axes_(spatial.dimension) {
  if (!(config.epsilon > 0) || !(config.dt > 0))
    throw ConfigError("epsilon and dt must be positive");
  if (velocity.spatial_axes() != spatial.dimension)
    throw ConfigError("velocity mode does not match the spatial dimension");
  if (!spatial.has_weighted_mass())
    throw ConfigError("transport step needs a spatial system assembled with media");

  const Real eps = config.epsilon;
  const Real dt = config.dt;
  const Real relax = dt / (eps * eps);
  const Real couple = dt / eps;
  const int m = spatial.size();
  const int n = velocity.order;

  if (config.formulation == Formulation::Symmetric) {
    even_mass_ = spatial.mass;
    even_relaxation_ = spatial.inverse_weighted_mass;
    for (int k = 0; k < axes_; ++k) even_coupling_[k] = &spatial.gradient[k];
  } else {
    even_mass_ = spatial.weighted_mass;
    even_relaxation_ = spatial.mass;
    for (int k = 0; k < axes_; ++k) even_coupling_[k] = &spatial.weighted_gradient[k];
  }

  const SparseMatrix odd = spatial.weighted_mass + relax * spatial.mass;
  odd_solver_.compute(odd);
  if (odd_solver_.info() != Eigen::Success)
    throw SolverError("odd block factorization failed");

  const Matrix identity = Matrix::Identity(n, n);
  const Matrix relaxation = identity - velocity.projection;
  schur_ = Matrix::Zero(static_cast<Eigen::Index>(m) * n, static_cast<Eigen::Index>(m) * n);
  add_kron(schur_, even_mass_, identity, 1.0);
  add_kron(schur_, even_relaxation_, relaxation, relax);
  for (int b = 0; b < axes_; ++b) {
    const Matrix solved = odd_solver_.solve(Matrix(spatial.weighted_gradient[b]));
    for (int a = 0; a < axes_; ++a) {
      const Matrix g = (*even_coupling_[a]) * solved;
      const Matrix f = velocity.flux(a) * velocity.flux(b);
      add_kron(schur_, g, f, -couple * couple);
    }
  }
  schur_lu_.compute(schur_);
}

Matrix TransportStepper::even_rhs(const KineticState& state, Matrix& odd_rhs) const {
  const Real couple = config_.dt / config_.epsilon;
  odd_rhs = spatial_->weighted_mass * state.beta;
  const Matrix solved = odd_solver_.solve(odd_rhs);
  Matrix rhs = even_mass_ * state.alpha;
  for (int a = 0; a < axes_; ++a)
    rhs -= couple * ((*even_coupling_[a]) * solved) * velocity_->flux(a);
  return rhs;
}

KineticState TransportStepper::step(const KineticState& state) const {
  const int m = spatial_->size();
  const int n = velocity_->order;
  if (state.alpha.rows() != m || state.alpha.cols() != n || state.beta.rows() != m ||
      state.beta.cols() != n)
    throw ConfigError("state shape does not match the discretization");
  const Real couple = config_.dt / config_.epsilon;

  Matrix odd_rhs;
  const Vector b = to_vector(even_rhs(state, odd_rhs));
  Vector x = schur_lu_.solve(b);
  x += schur_lu_.solve(Vector(b - schur_ * x));

  KineticState next;
  next.time = state.time + config_.dt;
  next.alpha = from_vector(x, m, n);
  Matrix rhs = odd_rhs;
  for (int k = 0; k < axes_; ++k)
    rhs -= couple * (spatial_->weighted_gradient[k] * next.alpha) * velocity_->flux(k);
  next.beta = odd_solver_.solve(rhs);
  check_finite(next.alpha, "alpha");
  check_finite(next.beta, "beta");

  last_residual_ = residual(state, next);
  if (!(last_residual_ <= config_.tolerance)) {
    std::ostringstream what;
    what << "transport step residual " << last_residual_ << " above tolerance "
         << config_.tolerance;
    throw SolverError(what.str(), last_residual_);
  }
  return next;
}

Real TransportStepper::residual(const KineticState& previous, const KineticState& next) const {
  const Real eps = config_.epsilon;
  const Real relax = config_.dt / (eps * eps);
  const Real couple = config_.dt / eps;
  const Matrix relaxation = Matrix::Identity(velocity_->order, velocity_->order) -
                            velocity_->projection;

  Matrix terms[8];
  terms[0] = even_mass_ * next.alpha;
  terms[1] = relax * (even_relaxation_ * next.alpha) * relaxation;
  terms[2] = Matrix::Zero(next.alpha.rows(), next.alpha.cols());
  for (int a = 0; a < axes_; ++a)
    terms[2] += couple * ((*even_coupling_[a]) * next.beta) * velocity_->flux(a);
  terms[3] = -(even_mass_ * previous.alpha);
  terms[4] = spatial_->weighted_mass * next.beta;
  terms[5] = relax * (spatial_->mass * next.beta);
  terms[6] = Matrix::Zero(next.beta.rows(), next.beta.cols());
  for (int k = 0; k < axes_; ++k)
    terms[6] += couple * (spatial_->weighted_gradient[k] * next.alpha) * velocity_->flux(k);
  terms[7] = -(spatial_->weighted_mass * previous.beta);

  const Matrix even = terms[0] + terms[1] + terms[2] + terms[3];
  const Matrix odd = terms[4] + terms[5] + terms[6] + terms[7];
  Real scale = 0;
  for (const auto& t : terms) scale += t.norm();
  const Real r = std::sqrt(even.squaredNorm() + odd.squaredNorm());
  return scale > 0 ? r / scale : r;
}

KineticState transport_step(const KineticState& state, const SpatialSystem& spatial,
                            const VelocitySystem& velocity, const StepperConfig& config) {
  return TransportStepper(spatial, velocity, config).step(state);
}

KineticState transport_step_asymmetric(const KineticState& state, const SpatialSystem& spatial,
                                       const VelocitySystem& velocity, StepperConfig config) {
  config.formulation = Formulation::Asymmetric;
  return TransportStepper(spatial, velocity, config).step(state);
}

HeatStepper::HeatStepper(const SparseMatrix& mass, const SparseMatrix& stiffness, Real dt,
                         Real diffusion_constant)
    : mass_(mass), dt_(dt) {
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  const SparseMatrix system = mass - (diffusion_constant * dt) * stiffness;
  solver_.compute(system);
  if (solver_.info() != Eigen::Success || !(solver_.vectorD().minCoeff() > 0))
    throw SolverError("heat system factorization failed");
}

ScalarState HeatStepper::step(const ScalarState& state) const {
  if (state.values.size() != mass_.rows()) throw ConfigError("heat state has the wrong size");
  ScalarState next{solver_.solve(Vector(mass_ * state.values)), state.time + dt_};
  if (!next.values.allFinite()) throw SolverError("non-finite heat solution");
  return next;
}

ScalarState heat_step(const ScalarState& state, const SparseMatrix& mass,
                      const SparseMatrix& stiffness, Real dt, Real diffusion_constant) {
  return HeatStepper(mass, stiffness, dt, diffusion_constant).step(state);
}

LimitStepper::LimitStepper(const SparseMatrix& mass, const Matrix& limit, Real dt,
                           Real diffusion_constant)
    : mass_(mass), dt_(dt) {
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  const Matrix system = Matrix(mass) - (diffusion_constant * dt) * limit;
  lu_.compute(system);
  if (!std::isfinite(lu_.rcond()) || lu_.rcond() == 0)
    throw SolverError("limit system factorization failed");
}

ScalarState LimitStepper::step(const ScalarState& state) const {
  if (state.values.size() != mass_.rows()) throw ConfigError("limit state has the wrong size");
  ScalarState next{lu_.solve(Vector(mass_ * state.values)), state.time + dt_};
  if (!next.values.allFinite()) throw SolverError("non-finite limit solution");
  return next;
}

ScalarState limit_step(const ScalarState& state, const SparseMatrix& mass, const Matrix& limit,
                       Real dt, Real diffusion_constant) {
  return LimitStepper(mass, limit, dt, diffusion_constant).step(state);
}

Vector density(const KineticState& state) { return state.alpha.col(0); }

Vector density(const KineticState& state, const BasisSet& basis) {
  return basis.combine(state.alpha.col(0));
}

ScalarState interpolate_density(const DensityFunction& rho, const NestedMesh& mesh) {
  ScalarState s{Vector(mesh.num_coarse_nodes()), 0.0};
  for (int i = 0; i < mesh.num_coarse_nodes(); ++i) s.values(i) = rho(mesh.coarse_node(i));
  return s;
}

}  // namespace msap
