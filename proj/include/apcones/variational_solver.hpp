#pragma once

// Finite-difference minimization of
//
//   E(u) = int_{B1} |grad u|^2 / 2 + u^gamma 1_{u>0},   u >= 0,  u = g on the boundary,
//
// on the lattice of GridField, plus residual, homogeneity and Green-identity
// diagnostics for the fields it produces.
//
// Discrete energy: every lattice edge with at least one interior endpoint
// contributes (u_i - u_j)^2 / (2 h^2), every interior node contributes
// Phi(u_i); the sum is scaled by h^d. Minimizing over a single interior node
// then involves exactly the (2d+1)-point Laplacian.

#include "apcones/cone_algebra.hpp"
#include "apcones/grid_field.hpp"
#include "apcones/sphere_quadrature.hpp"

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace apcones {

struct SolverConfig {
  Exponent exponent;
  /// Floors for gamma < 1; empty selects default_schedule(). Ignored for
  /// gamma >= 1, where the reaction term is bounded and one unregularized
  /// stage is run.
  std::vector<double> delta_schedule;
  int sweep_limit = 50000;
  /// On max |Delta_h u - f(u)| over interior nodes, measured as the
  /// node-update size times 2d/h^2.
  double residual_tol = 1e-8;
  /// Tolerance for the stages before the last, which only provide a warm
  /// start; the larger of this and residual_tol applies.
  double stage_tol = 1e-4;
  /// Over-relaxation factor in (0, 2); unset selects 2/(1 + sin(pi h / 2)).
  std::optional<double> relaxation;
  /// Start from zero instead of the extension of the boundary data.
  bool zero_initial_guess = false;
  /// Keep the regularized energy after every sweep (memory: one double per sweep).
  bool record_sweep_energy = false;
};

/// 1e-2, 1e-3, 1e-4, 1e-6.
std::vector<double> default_schedule();

/// Throws std::invalid_argument for a bad schedule, sweep limit, tolerance or relaxation.
void validate(const SolverConfig& config);

/// 2/(1 + sin(pi h/2)), the optimal SOR factor of the model Laplacian.
double optimal_relaxation(double h);

struct StageReport {
  double delta = 0.0;
  int sweeps = 0;
  double residual = 0.0;
  double energy = 0.0;              // unregularized
  double regularized_energy = 0.0;  // the functional this stage minimizes
  bool converged = false;
};

struct SolveResult {
  GridField field;
  std::vector<StageReport> stages;
  std::vector<double> energy_history;  // unregularized energy after each stage
  std::vector<double> sweep_energy;    // only with record_sweep_energy
  double residual = 0.0;
  int total_sweeps = 0;
  double relaxation = 1.0;
  bool converged = false;
  /// energy_history non-increasing up to 1e-10.
  bool energy_monotone = true;
};

using BoundaryData = std::function<double(const Vector&)>;

/// Dirichlet nodes take g; interior nodes start from g or zero. Throws
/// std::invalid_argument if g is negative or not finite on a Dirichlet node.
SolveResult minimize(int dim, int n, const BoundaryData& g, const SolverConfig& config);

/// Same, with Dirichlet values and initial guess taken from `initial`.
SolveResult minimize(GridField initial, const SolverConfig& config);

/// Phi_delta(u): u^gamma 1_{u>0} for delta = 0 or gamma >= 1; for gamma < 1 and
/// delta > 0 the C^1 potential with derivative gamma max(u, delta)^(gamma-1).
double reaction_potential(double u, double gamma, double delta);

/// Energy of the discretization described at the top of this header.
double discrete_energy(const GridField& field, const Exponent& exp, double delta = 0.0);

/// sup over interior nodes with u > threshold of |Delta_h u - gamma u^(gamma-1)|;
/// threshold defaults to 10 h^2. Returns 0 when no node qualifies.
double el_residual(const GridField& field, const Exponent& exp,
                   std::optional<double> threshold = std::nullopt);

/// u = v^(2/beta) / (gamma (2 - gamma)).
GridField transform_field(const GridField& v, const Exponent& exp);

/// The map applied to boundary data: a 2-homogeneous target U becomes
/// v = (gamma (2 - gamma) U)^(beta/2), the inverse of transform_field.
double untransform_value(double u, const Exponent& exp);

/// sup over interior nodes with u > threshold of
/// |Delta_h u + ((beta - 2)/2) |grad_h u|^2 / u - 1|, central gradients.
double transformed_residual(const GridField& u, const Exponent& exp,
                            std::optional<double> threshold = std::nullopt);

/// max over r in {1/4, 1/2} of |r^-beta u(r x) - u(x)| over nodes x with
/// |x| <= 1/2 for which r x is itself a node (offsets divisible by 1/r).
double homogeneity_defect(const GridField& field, double beta);

/// Fraction of interior nodes with u <= threshold (default 10 h^2).
double contact_fraction(const GridField& field, std::optional<double> threshold = std::nullopt);

struct GreenIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double quad_error = 0.0;  // Richardson estimate on |lhs - rhs|; 0 for a single rule
  double radius = 0.0;
};

/// ((2-beta)/2) int (|grad u|^2/u)(p - 1/(2d))  versus  int (p - 1/(2d)) 1_{u=0}
/// over the sphere of radius 1 - 2h, both sides rescaled to the unit sphere
/// by 2-homogeneity. u and grad_h u are interpolated multilinearly; a point
/// counts as contact when u <= 10 h^2 and then only enters the right side.
/// Throws std::invalid_argument for gamma = 1.
GreenIdentity green_identity_check(const GridField& u, const ParabolaCone& p,
                                   const Exponent& exp, const SphereRule& rule);
GreenIdentity green_identity_check(const GridField& u, const ParabolaCone& p,
                                   const Exponent& exp, const SphereRule& coarse,
                                   const SphereRule& fine);

using AnyCone = std::variant<SymmetricCone, ParabolaCone, HalfSpaceCone>;

/// max over interior and Dirichlet nodes of |field - cone|. Throws on a dimension mismatch.
double linf_distance_to_cone(const GridField& field, const AnyCone& cone);

/// Least-squares A in u ~ x.Ax/2 over nodes with |x| <= radius (and x != 0).
Matrix fit_quadratic(const GridField& field, double radius = 0.5);

struct ConeFit {
  int k = 1;             // 0 is the half-space form
  double distance = 0.0;
  Matrix rotation;       // eigenvectors of the fitted Hessian, descending
  Matrix hessian;
  std::vector<double> distances;  // per k = 0..d
};

/// Aligns P_k (k = 1..d) and the half-space cone half_space_scale [(x.e)_+]^2
/// to the eigenbasis of fit_quadratic and keeps the closest in L-infinity.
/// For the half-space form both signs of the top eigenvector are tried.
ConeFit nearest_symmetric_fit(const GridField& field, double half_space_scale = 0.5);

}  // namespace apcones
