#include "apcones/cone_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace apcones {

namespace {

void require_dim(int expected, Eigen::Index got, const char* what) {
  if (got != expected) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (expected " << expected << ", got " << got << ")";
    throw std::invalid_argument(msg.str());
  }
}

// Descending eigenpairs of a symmetric matrix.
void descending_eigen(const Matrix& a, Vector& values, Matrix& vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  values = solver.eigenvalues().reverse();
  vectors = solver.eigenvectors().rowwise().reverse();
}

}  // namespace

Exponent make_exponent(double gamma) {
  if (!(gamma >= 0.5 && gamma <= 1.5)) {
    std::ostringstream msg;
    msg << "gamma = " << gamma << " outside the admissible interval [1/2, 3/2]";
    throw std::domain_error(msg.str());
  }
  Exponent e;
  e.gamma = gamma;
  e.beta = 2.0 / (2.0 - gamma);
  const double rhs = (2.0 - gamma) * (2.0 - gamma) / 2.0;
  e.c_gamma = std::pow(rhs, 1.0 / (2.0 - gamma));
  return e;
}

ParabolaCone::ParabolaCone(Matrix a) : matrix_(std::move(a)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw std::invalid_argument("parabola cone: matrix must be square and non-empty");
  }
  const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    std::ostringstream msg;
    msg << "parabola cone: matrix not symmetric (max |A_ij - A_ji| = " << asym << ")";
    throw std::invalid_argument(msg.str());
  }
  const double trace_dev = std::abs(matrix_.trace() - 1.0);
  if (trace_dev > kTraceTolerance) {
    std::ostringstream msg;
    msg << "parabola cone: trace deviates from 1 by " << trace_dev;
    throw std::invalid_argument(msg.str());
  }
  descending_eigen(matrix_, eigenvalues_, eigenvectors_);
  if (lambda_min() < -kPsdTolerance) {
    std::ostringstream msg;
    msg << "parabola cone: not positive semidefinite (lambda_min = " << lambda_min() << ")";
    throw std::invalid_argument(msg.str());
  }
  const Matrix rebuilt = eigenvectors_ * eigenvalues_.asDiagonal() * eigenvectors_.transpose();
  if ((rebuilt - matrix_).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::runtime_error("parabola cone: eigendecomposition does not reconstruct A");
  }
}

ParabolaCone ParabolaCone::from_spectrum(std::span<const double> eigenvalues,
                                         const std::optional<Matrix>& rotation) {
  const auto d = static_cast<Eigen::Index>(eigenvalues.size());
  Vector lambda(d);
  for (Eigen::Index i = 0; i < d; ++i) lambda(i) = eigenvalues[static_cast<std::size_t>(i)];
  Matrix a = lambda.asDiagonal();
  if (rotation) {
    require_dim(static_cast<int>(d), rotation->rows(), "from_spectrum rotation");
    a = (*rotation) * a * rotation->transpose();
    a = 0.5 * (a + a.transpose()).eval();
  }
  return ParabolaCone(std::move(a));
}

ParabolaCone ParabolaCone::radial(int dim) {
  return ParabolaCone(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

HalfSpaceCone::HalfSpaceCone(Vector direction, double scale)
    : direction_(std::move(direction)), scale_(scale) {
  if (std::abs(direction_.norm() - 1.0) > 1e-14) {
    throw std::invalid_argument("half-space cone: direction must be a unit vector");
  }
  if (!(scale_ > 0.0)) throw std::invalid_argument("half-space cone: scale must be positive");
}

double HalfSpaceCone::value(const Vector& x) const {
  require_dim(dim(), x.size(), "half-space cone");
  const double s = std::max(0.0, x.dot(direction_));
  return scale_ * s * s;
}

SymmetricCone::SymmetricCone(int dim, int k, std::optional<Matrix> rotation)
    : dim_(dim), k_(k), rotation_(rotation ? std::move(*rotation) : Matrix::Identity(dim, dim)) {
  if (dim < 1) throw std::invalid_argument("symmetric cone: dim must be positive");
  if (k < 0 || k > dim) throw std::invalid_argument("symmetric cone: k must lie in {0, ..., d}");
  require_dim(dim, rotation_.rows(), "symmetric cone rotation");
  require_dim(dim, rotation_.cols(), "symmetric cone rotation");
}

double SymmetricCone::value(const Vector& x) const {
  require_dim(dim_, x.size(), "symmetric cone");
  const Vector y = rotation_.transpose() * x;
  if (k_ == 0) {
    const double s = std::max(0.0, y(0));
    return 0.5 * s * s;
  }
  return y.head(k_).squaredNorm() / (2.0 * k_);
}

ParabolaCone SymmetricCone::parabola() const {
  if (k_ == 0) throw std::logic_error("P_0 is a half-space cone, not a parabola cone");
  const Vector spectrum = symmetric_spectrum(dim_, k_);
  return ParabolaCone::from_spectrum(std::span<const double>(spectrum.data(), spectrum.size()),
                                     rotation_);
}

double eval_parabola(const ParabolaCone& cone, const Vector& x) {
  require_dim(cone.dim(), x.size(), "eval_parabola");
  return cone.value(x);
}

Vector gradient_parabola(const ParabolaCone& cone, const Vector& x) {
  require_dim(cone.dim(), x.size(), "gradient_parabola");
  return cone.gradient(x);
}

Vector tangential_gradient(const ParabolaCone& cone, const Vector& x) {
  require_dim(cone.dim(), x.size(), "tangential_gradient");
  if (std::abs(x.norm() - 1.0) > kUnitTolerance) {
    throw std::invalid_argument("tangential_gradient: point is not on the unit sphere");
  }
  const Vector ax = cone.gradient(x);
  return ax - x.dot(ax) * x;
}

ParabolaCone Interpolant::cone() const {
  if (!valid) throw std::logic_error("interpolant is not positive semidefinite");
  return ParabolaCone(matrix);
}

Interpolant interpolate(const ParabolaCone& cone, double t) {
  if (t < 0.0) throw std::invalid_argument("interpolate: t must be nonnegative");
  const int d = cone.dim();
  const double radial = (1.0 - t) / d;
  Interpolant out;
  out.matrix = t * cone.matrix();
  out.matrix.diagonal().array() += radial;
  out.eigenvalues = (t * cone.eigenvalues()).array() + radial;
  out.valid = out.eigenvalues(d - 1) >= -kPsdTolerance;
  return out;
}

ExtendedReal t_bar(const ParabolaCone& cone) {
  const double inv_d = 1.0 / cone.dim();
  const double gap = inv_d - cone.lambda_min();
  if (gap <= 1e-15) return ExtendedReal::infinity();
  return ExtendedReal::finite(inv_d / gap);
}

Vector symmetric_spectrum(int dim, int k) {
  if (k < 1 || k > dim) throw std::invalid_argument("symmetric spectrum needs 1 <= k <= d");
  Vector mu = Vector::Zero(dim);
  mu.head(k).setConstant(1.0 / k);
  return mu;
}

SymmetricCone SymmetricMatch::cone() const {
  return SymmetricCone(static_cast<int>(rotation.rows()), k, rotation);
}

SymmetricMatch nearest_symmetric(const ParabolaCone& cone) {
  const int d = cone.dim();
  SymmetricMatch best;
  best.distance = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= d; ++k) {
    const Vector mu = symmetric_spectrum(d, k);
    const double dist = 0.5 * (cone.eigenvalues() - mu).cwiseAbs().maxCoeff();
    if (dist < best.distance) {
      best.distance = dist;
      best.k = k;
    }
  }
  best.rotation = cone.eigenvectors();
  return best;
}

double linf_distance_quadratics(const ParabolaCone& a, const ParabolaCone& b) {
  require_dim(a.dim(), b.dim(), "linf_distance_quadratics");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().maxCoeff();
}

double flat_cone_eval(const Exponent& exp, const Vector& e, const Vector& x) {
  require_dim(static_cast<int>(e.size()), x.size(), "flat_cone_eval");
  if (std::abs(e.norm() - 1.0) > kUnitTolerance) {
    throw std::invalid_argument("flat_cone_eval: direction must be a unit vector");
  }
  const double s = x.dot(e);
  if (s <= 0.0) return 0.0;
  return exp.c_gamma * std::pow(s, exp.beta);
}

}  // namespace apcones
