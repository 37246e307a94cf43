#pragma once

// The sphere integral
//
//   Q(t) = int_{S^{d-1}} (|grad p_t|^2 / p_t) (p_t - |x|^2/(2d)),
//   p_t  = t p + (1 - t) P_d,
//
// in its direct and expanded forms, the normalisation q = Q/t^2, the closed
// form of q'', the equality-case classification of Q(1) >= 0 and the
// dimension-reduction constant for cones with a kernel direction.
//
// All integrals are taken in the principal frame of the cone: rule coordinate
// i carries the i-th largest eigenvalue, so the smallest one sits on the polar
// axis of the tensor rule. Sphere integrals are rotation invariant, and in
// this frame the integrand of a degenerate cone is smooth in the polar angle.

#include "apcones/cone_algebra.hpp"
#include "apcones/sphere_quadrature.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace apcones {

/// p_t below this is treated as the kernel: integrands vanish there.
inline constexpr double kKernelFloor = 1e-14;
/// Verdicts carry this many quadrature errors as their tolerance.
inline constexpr double kErrorBudget = 10.0;
/// Distance to the symmetric family below which a cone counts as symmetric.
inline constexpr double kSymmetricDistance = 1e-8;

/// Coarse/fine rules for two-level Richardson estimates; coarse = fine / 2.
struct RulePair {
  SphereRule coarse;
  SphereRule fine;

  static RulePair build(int dim, int fine_level);
  int dim() const { return fine.dim; }
};

/// (|A_t x|^2 / p_t)(p_t - 1/(2d)) at a unit point, evaluated in the
/// eigenbasis of A_t; zero where p_t < kKernelFloor. Throws for an invalid A_t.
double q_integrand(const Matrix& a_t, std::span<const double> x, int d);

/// Throws std::domain_error naming t_bar when p_t is not nonnegative.
double q_direct(const ParabolaCone& cone, double t, const SphereRule& rule);
double q_expanded(const ParabolaCone& cone, double t, const SphereRule& rule);

/// Q(t)/t^2; at t = 0 the limit 4 int (p - P_d)^2.
double q_value(const ParabolaCone& cone, double t, const SphereRule& rule);

/// -(1/d) int |grad_tau p|^2 (p - P_d)^2 / p_t^3 for 0 < t < t_bar.
double q_second_derivative(const ParabolaCone& cone, double t, const SphereRule& rule);

/// Spectrum-level entry points; `spectrum` is any PSD spectrum (trace need
/// not be one) listed in descending order.
Quadrature q_direct_spectrum(std::span<const double> spectrum, double t, const SphereRule& rule);

struct QReport {
  double t = 0.0;
  double q_direct = 0.0;
  double q_expanded = 0.0;
  double quad_error = 0.0;
  int rule_level = 0;
};

/// Richardson estimate |I_fine - I_coarse|, floored at the rounding bound of
/// the fine sum (Richardson cannot resolve below rounding).
double estimate_error(const Quadrature& coarse, const Quadrature& fine);

QReport q_report(const ParabolaCone& cone, double t, const RulePair& rules);

struct InequalityVerdict {
  ParabolaCone cone;
  double q1 = 0.0;
  double margin = 0.0;  // equals q1
  double quad_error = 0.0;
  bool is_equality_case = false;
  int nearest_k = 1;
  double dist_to_sp = 0.0;
  bool anomaly = false;

  /// Q(1) below -10 quad_error.
  bool violates() const { return margin < -kErrorBudget * quad_error; }
};

InequalityVerdict verify_inequality(const ParabolaCone& cone, const RulePair& rules);

struct DimensionReduction {
  std::optional<double> alpha_measured;
  double alpha_predicted = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  double denominator_error = 0.0;
};

/// alpha_d = ((d - 1)/d) W_{d-2}.
double dimension_reduction_constant(int d);

/// Lifts q from R^{d-1} to R^d with a zero row and column and compares the
/// two sphere integrals. `q` may be any PSD matrix: the identity behind the
/// constant does not use trace(q) = 1.
DimensionReduction dimension_reduction_check(const Matrix& q, const RulePair& rules_d,
                                             const RulePair& rules_dm1);
DimensionReduction dimension_reduction_check(const ParabolaCone& q, const RulePair& rules_d,
                                             const RulePair& rules_dm1);

enum class ConeFamily { interior, boundary, near_symmetric };

ConeFamily parse_family(const std::string& name);
std::string to_string(ConeFamily family);

/// Mixes a base seed and a sample index into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Haar-distributed rotation from a seeded stream.
Matrix random_rotation(int dim, std::uint64_t seed);

/// interior: G G^T / trace with G a d x d standard normal matrix.
/// boundary: G is d x r with r < d (r drawn from {1..d-1} unless given).
/// near_symmetric: the P_k spectrum (k drawn from {1..d}) moved by at most
/// 1e-3 per eigenvalue, renormalised and randomly rotated.
ParabolaCone random_parabola(int dim, std::uint64_t seed, ConeFamily family,
                             std::optional<int> rank = std::nullopt);

/// `count` Chebyshev-spaced points on [1e-3 t_end, (1 - 1e-3) t_end].
std::vector<double> chebyshev_scan(double t_end, int count);

struct QCurvePoint {
  double t = 0.0;
  double q_direct = 0.0;
  double q_expanded = 0.0;
  double q = 0.0;
  double q_dd_formula = 0.0;
  double q_dd_finite_diff = 0.0;
  double quad_error = 0.0;     // of Q_direct
  double q_error = 0.0;        // of q
  double dd_quad_error = 0.0;  // of the q'' integral
  bool interior = false;       // far enough from both ends for the finite-difference comparison
};

struct QCurve {
  ExtendedReal t_bar;
  double t_end = 0.0;  // min(t_bar, 4)
  double q0 = 0.0;
  double q0_error = 0.0;
  double q_end = 0.0;
  double q_end_error = 0.0;
  std::vector<QCurvePoint> points;
};

inline constexpr double kFiniteDifferenceStep = 1e-3;
inline constexpr double kFiniteDifferenceTolerance = 1e-4;
inline constexpr int kDefaultScanPoints = 33;

QCurve q_curve(const ParabolaCone& cone, const RulePair& rules, int t_points = kDefaultScanPoints);

/// |a - b| <= tol * max(1, |a|, |b|).
bool mixed_close(double a, double b, double tol);

struct QCurveCheck {
  bool equivalence = true;
  bool concavity = true;
  bool finite_difference = true;
  bool endpoints = true;
  bool chord = true;
  std::string first_failure;

  bool ok() const { return equivalence && concavity && finite_difference && endpoints && chord; }
};

QCurveCheck check_q_curve(const QCurve& curve, double fd_tolerance = kFiniteDifferenceTolerance);

}  // namespace apcones
