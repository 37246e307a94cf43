#pragma once

// Quadrature on the unit sphere S^{d-1}, d = 1..5, and the Wallis integrals.
//
// d = 1: the two points {-1, +1} with unit weights.
// d = 2: 4*level equispaced angles, offset by half a step so no node sits on a
//        coordinate axis.
// d >= 3: x = (sqrt(1 - u^2) y, u) with y on S^{d-2}; the polar variable u uses
//        `level` Gauss-Gegenbauer nodes for the weight (1 - u^2)^((d-3)/2), so
//        the Jacobian of the spherical parametrisation sits in the weights.
//
// Every node set is exactly antipodal: the second half of each factor is the
// negated first half.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace apcones {

inline constexpr int kMinSphereDim = 1;
inline constexpr int kMaxSphereDim = 5;

struct SphereRule {
  int dim = 0;
  int level = 0;
  int exactness_degree = 0;
  std::vector<double> nodes;  // row-major, size() * dim entries
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return {nodes.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// 2 pi^(d/2) / Gamma(d/2).
double sphere_area(int dim);

/// Throws std::invalid_argument for d outside 1..5 or level < 4.
SphereRule build_rule(int dim, int level);

/// Gauss rule for the weight (1 - u^2)^alpha on [-1, 1], alpha > -1.
/// Nodes ascending; exactly symmetric about zero.
void gauss_gegenbauer(int count, double alpha, std::vector<double>& nodes,
                      std::vector<double>& weights);

/// Fixed-order pairwise summation: blocks of 64 summed left to right, then
/// combined as a balanced binary tree. Result is independent of threading.
double pairwise_sum(std::span<const double> values);

/// Quadrature value together with sum |w_i f(x_i)|, used to bound rounding.
struct Quadrature {
  double value = 0.0;
  double abs_sum = 0.0;

  /// A conservative bound on the rounding error of `value`.
  double rounding_bound() const {
    return 64.0 * std::numeric_limits<double>::epsilon() * abs_sum;
  }
};

/// sum w_i f(x_i). `f` takes std::span<const double>. Exceptions thrown by f
/// are rethrown as std::runtime_error naming the node index.
template <class F>
Quadrature integrate_detailed(const SphereRule& rule, F&& f) {
  const std::size_t n = rule.size();
  std::vector<double> terms(n);
  std::vector<double> abs_terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double fx = 0.0;
    try {
      fx = f(rule.node(i));
    } catch (const std::exception& err) {
      std::ostringstream msg;
      msg << "integrand failed at node " << i << ": " << err.what();
      throw std::runtime_error(msg.str());
    }
    terms[i] = rule.weights[i] * fx;
    abs_terms[i] = std::abs(terms[i]);
  }
  return {pairwise_sum(terms), pairwise_sum(abs_terms)};
}

template <class F>
double integrate(const SphereRule& rule, F&& f) {
  return integrate_detailed(rule, std::forward<F>(f)).value;
}

/// |I_hi - I_lo|, the error estimate attached to I_hi.
/// Requires rule_hi.level >= 2 * rule_lo.level.
template <class F>
double richardson_error(const SphereRule& rule_lo, const SphereRule& rule_hi, F&& f) {
  if (rule_hi.dim != rule_lo.dim) {
    throw std::invalid_argument("richardson_error: rules live on different spheres");
  }
  if (rule_hi.level < 2 * rule_lo.level) {
    throw std::invalid_argument("richardson_error: fine level must be at least twice the coarse level");
  }
  return std::abs(integrate(rule_hi, f) - integrate(rule_lo, f));
}

/// W_m = integral of cos^m over [-pi/2, pi/2], via W_m = ((m-1)/m) W_{m-2}.
double wallis(int m);

}  // namespace apcones
