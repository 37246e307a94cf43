#pragma once

// Closed-form cone families of the Alt-Phillips problem near the obstacle
// exponent: flat (half-space) cones, parabola cones p(x) = x.Ax/2 with A >= 0
// and trace(A) = 1, and the symmetric cones P_k.

#include <Eigen/Dense>

#include <optional>
#include <span>

namespace apcones {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kPsdTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kSymmetryTolerance = 1e-14;
inline constexpr double kUnitTolerance = 1e-12;

/// Exponent bookkeeping: gamma in [1/2, 3/2], the homogeneity beta = 2/(2-gamma)
/// and the flat-cone coefficient c_gamma with c^(2-gamma) = (2-gamma)^2/2.
struct Exponent {
  double gamma = 1.0;
  double beta = 2.0;
  double c_gamma = 0.5;
};

/// Throws std::domain_error outside [1/2, 3/2].
Exponent make_exponent(double gamma);

/// A value on the extended half line [0, +inf]. Infinite values carry no
/// payload so callers never do arithmetic with a huge sentinel.
struct ExtendedReal {
  double value = 0.0;
  bool infinite = false;

  static ExtendedReal finite(double v) { return {v, false}; }
  static ExtendedReal infinity() { return {0.0, true}; }
};

/// p(x) = x.Ax/2 with A symmetric positive semidefinite and trace one.
///
/// The eigendecomposition is computed once at construction. Eigenvalues are
/// stored in descending order and eigenvectors() holds the matching columns.
class ParabolaCone {
 public:
  /// Throws std::invalid_argument when A is not square, not symmetric to
  /// 1e-14, not PSD to 1e-12, or its trace differs from one by more than 1e-12.
  explicit ParabolaCone(Matrix a);

  /// diag(eigenvalues) rotated by `rotation` (columns are the eigenvectors).
  static ParabolaCone from_spectrum(std::span<const double> eigenvalues,
                                    const std::optional<Matrix>& rotation = std::nullopt);

  /// The radial cone P_d = |x|^2/(2d).
  static ParabolaCone radial(int dim);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  double lambda_max() const { return eigenvalues_(0); }
  double lambda_min() const { return eigenvalues_(dim() - 1); }

  double value(const Vector& x) const { return 0.5 * x.dot(matrix_ * x); }
  Vector gradient(const Vector& x) const { return matrix_ * x; }

 private:
  Matrix matrix_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

/// scale * [(x.e)_+]^2; scale is 1/2 for the obstacle problem and
/// (2-gamma)/(2 gamma) for transformed flat cones.
class HalfSpaceCone {
 public:
  HalfSpaceCone(Vector direction, double scale);

  int dim() const { return static_cast<int>(direction_.size()); }
  const Vector& direction() const { return direction_; }
  double scale() const { return scale_; }
  double value(const Vector& x) const;

 private:
  Vector direction_;
  double scale_;
};

/// P_k composed with a rotation: P_k(R^T x) where P_k(y) = (1/2k) sum_{j<k} y_j^2.
/// k = 0 is the half-space form [(R^T x)_1]_+^2 / 2.
class SymmetricCone {
 public:
  SymmetricCone(int dim, int k, std::optional<Matrix> rotation = std::nullopt);

  int dim() const { return dim_; }
  int k() const { return k_; }
  const Matrix& rotation() const { return rotation_; }
  double value(const Vector& x) const;

  /// Only for k >= 1; throws std::logic_error for the half-space form.
  ParabolaCone parabola() const;

 private:
  int dim_;
  int k_;
  Matrix rotation_;
};

double eval_parabola(const ParabolaCone& cone, const Vector& x);
Vector gradient_parabola(const ParabolaCone& cone, const Vector& x);

/// Ax - (x.Ax)x on the unit sphere. Throws std::invalid_argument off the sphere.
Vector tangential_gradient(const ParabolaCone& cone, const Vector& x);

/// A_t = tA + (1-t)I/d. Trace stays one for every t; `valid` reports whether
/// A_t is still PSD (lambda_min >= -1e-12).
struct Interpolant {
  Matrix matrix;
  Vector eigenvalues;  // descending, shares eigenvectors with the source cone
  bool valid = false;

  /// The interpolant as a cone; throws if not valid.
  ParabolaCone cone() const;
};

Interpolant interpolate(const ParabolaCone& cone, double t);

/// sup{t : A_t >= 0}; infinite exactly for A = I/d.
ExtendedReal t_bar(const ParabolaCone& cone);

/// Nearest symmetric cone in the sup-norm on the unit ball.
struct SymmetricMatch {
  int k = 1;
  Matrix rotation;
  double distance = 0.0;

  SymmetricCone cone() const;
};

SymmetricMatch nearest_symmetric(const ParabolaCone& cone);

/// sup over the unit ball of |p_a - p_b| = spectral radius of (A - B) / 2.
double linf_distance_quadratics(const ParabolaCone& a, const ParabolaCone& b);

/// c_gamma [(x.e)_+]^beta. Throws std::invalid_argument for a non-unit e.
double flat_cone_eval(const Exponent& exp, const Vector& e, const Vector& x);

/// (1/k, ..., 1/k, 0, ..., 0): the spectrum of P_k in dimension d.
Vector symmetric_spectrum(int dim, int k);

}  // namespace apcones
