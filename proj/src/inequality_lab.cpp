#include "apcones/inequality_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace apcones {

namespace {

constexpr double kMaxScanT = 4.0;
// Scan points closer than this fraction of t_end to either end are excluded
// from the finite-difference comparison.
constexpr double kFiniteDifferenceMargin = 0.05;

std::vector<double> spectrum_of(const ParabolaCone& cone) {
  const Vector& ev = cone.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

void require_rule_dim(std::size_t dim, const SphereRule& rule) {
  if (static_cast<int>(dim) != rule.dim) {
    std::ostringstream msg;
    msg << "sphere rule of dimension " << rule.dim << " used for a cone of dimension " << dim;
    throw std::invalid_argument(msg.str());
  }
}

// Spectrum of A_t = tA + (1-t)I/d for the spectrum of A; throws past t_bar.
std::vector<double> interpolated_spectrum(std::span<const double> lambda, double t) {
  const double d = static_cast<double>(lambda.size());
  std::vector<double> mu(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) mu[i] = t * lambda[i] + (1.0 - t) / d;
  const double mu_min = *std::min_element(mu.begin(), mu.end());
  if (mu_min < -kPsdTolerance) {
    const double gap = 1.0 / d - *std::min_element(lambda.begin(), lambda.end());
    std::ostringstream msg;
    msg << "t = " << t << " lies beyond t_bar = " << (1.0 / d) / gap
        << ": p_t is negative somewhere on the sphere";
    throw std::domain_error(msg.str());
  }
  for (double& m : mu) m = std::max(m, 0.0);
  return mu;
}

// Pointwise pieces of p = y.Ly/2 on the unit sphere in the principal frame.
// diff and tang2 are formed from eigenvalue differences, so both vanish
// identically for a uniform spectrum and carry no cancellation error.
struct FramePoint {
  double p;        // y.Ly / 2
  double tang2;    // |grad_tau p|^2 = sum_{i<j} (l_i - l_j)^2 y_i^2 y_j^2 / |y|^2
  double radial;   // |y|^2 / (2d), i.e. P_d
  double diff;     // p - P_d = sum (l_i - 1/d) y_i^2 / 2
};

inline FramePoint frame_point(std::span<const double> lambda, std::span<const double> y) {
  const std::size_t n = y.size();
  const double inv_d = 1.0 / static_cast<double>(n);
  std::array<double, kMaxSphereDim> y2{};
  double s1 = 0.0;
  double r2 = 0.0;
  double dev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y2[i] = y[i] * y[i];
    s1 += lambda[i] * y2[i];
    r2 += y2[i];
    dev += (lambda[i] - inv_d) * y2[i];
  }
  double cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = lambda[i] - lambda[j];
      cross += gap * gap * y2[i] * y2[j];
    }
  }
  return {0.5 * s1, cross / r2, 0.5 * r2 * inv_d, 0.5 * dev};
}

// p_t on the sphere from p, t and P_d.
inline double frame_pt(const FramePoint& fp, double t) { return t * fp.p + (1.0 - t) * fp.radial; }

// On the circle the uniform rule converges like exp(-N a) when p_t has
// eigenvalue ratio a^2 = mu_min/mu_max: the integrand has complex poles at
// distance ~a from the kernel direction. The substitution psi = am(u, k) with
// k^2 = 1/(1 + a^2), taken in the principal frame, has Jacobian
// dn(u, k) = sqrt(a^2 + cos^2 psi)/sqrt(1 + a^2), which grades the nodes
// geometrically toward the kernel; the rate becomes exp(-N pi^2/(4K(k))) with
// K ~ log(4/a). The rule's angles s serve as the grid u = 2Ks/pi. When that
// rate cannot beat the size ~a of the unresolved kernel dip, the plain rule
// is kept. For d >= 3 the rule's innermost circle carries the first two
// principal axes; on every polar slice the angular profile has the same
// form plus a constant, so the same map applies with the radius kept.
struct CircleMap {
  bool active = false;
  double k = 1.0;
  double kp = 0.0;  // complementary modulus sqrt(1 - k^2)
  double quarter = 0.0;  // K(k)
};

CircleMap circle_map(std::span<const double> mu, const SphereRule& rule) {
  CircleMap m;
  if (rule.dim < 2 || mu.size() != static_cast<std::size_t>(rule.dim) || !(mu[1] > 0.0) || !(mu[0] > 0.0)) {
    return m;
  }
  const double a = std::sqrt(mu[1] / mu[0]);
  if (!(a < 0.5)) return m;
  m.k = 1.0 / std::sqrt(1.0 + a * a);
  m.kp = a * m.k;
  double x = 1.0;
  double y = m.kp;
  for (int it = 0; it < 64 && std::abs(x - y) > 1e-16 * x; ++it) {
    const double nx = 0.5 * (x + y);
    y = std::sqrt(x * y);
    x = nx;
  }
  m.quarter = std::numbers::pi / (2.0 * x);
  const double n = 4.0 * rule.level;  // points on the innermost circle
  m.active = std::exp(-n * std::numbers::pi * std::numbers::pi / (4.0 * m.quarter)) < a;
  return m;
}

// Jacobi amplitude by the arithmetic-geometric mean (descending Landen).
double jacobi_am(double u, double k, double kp) {
  std::array<double, 40> a{};
  std::array<double, 40> c{};
  a[0] = 1.0;
  double b = kp;
  c[0] = k;
  int n = 0;
  while (n + 1 < 40 && std::abs(c[n]) > 1e-17) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  for (int j = n; j > 0; --j) phi = 0.5 * (phi + std::asin(c[j] / a[j] * std::sin(phi)));
  return phi;
}

template <class F>
Quadrature integrate_frame(const SphereRule& rule, const CircleMap& map, F&& f) {
  if (!map.active) return integrate_detailed(rule, f);
  const double scale = 2.0 * map.quarter / std::numbers::pi;
  return integrate_detailed(rule, [&](std::span<const double> y) {
    const double rho = std::hypot(y[0], y[1]);
    const double u = scale * std::atan2(y[1], y[0]);
    const double psi = jacobi_am(u, map.k, map.kp);
    std::array<double, kMaxSphereDim> z{};
    std::copy(y.begin(), y.end(), z.begin());
    const double c = std::cos(psi);
    z[0] = rho * c;
    z[1] = rho * std::sin(psi);
    const double dn = std::sqrt(map.kp * map.kp + map.k * map.k * c * c);
    return f(std::span<const double>(z.data(), y.size())) * scale * dn;
  });
}

std::vector<double> spectrum_at(std::span<const double> lambda, double t) {
  const double d = static_cast<double>(lambda.size());
  std::vector<double> mu(lambda.size());
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = std::max(0.0, t * lambda[i] + (1.0 - t) / d);
  return mu;
}

// The bracket of the expanded form: |grad_tau p|^2 + 4(p - P_d)^2 - |grad_tau p|^2/(2d p_t).
Quadrature q_bracket(std::span<const double> lambda, double t, const SphereRule& rule) {
  const double inv2d = 1.0 / (2.0 * rule.dim);
  const CircleMap map = circle_map(spectrum_at(lambda, t), rule);
  return integrate_frame(rule, map, [&](std::span<const double> y) {
    const FramePoint fp = frame_point(lambda, y);
    const double diff = fp.diff;
    double value = fp.tang2 + 4.0 * diff * diff;
    const double pt = frame_pt(fp, t);
    if (pt >= kKernelFloor) value -= inv2d * fp.tang2 / pt;
    return value;
  });
}

Quadrature q_zero_limit(std::span<const double> lambda, const SphereRule& rule) {
  return integrate_detailed(rule, [&](std::span<const double> y) {
    const FramePoint fp = frame_point(lambda, y);
    return 4.0 * fp.diff * fp.diff;
  });
}

Quadrature q_dd_spectrum(std::span<const double> lambda, double t, const SphereRule& rule) {
  const double inv_d = 1.0 / rule.dim;
  const CircleMap map = circle_map(spectrum_at(lambda, t), rule);
  return integrate_frame(rule, map, [&](std::span<const double> y) {
    const FramePoint fp = frame_point(lambda, y);
    const double pt = frame_pt(fp, t);
    if (pt < kKernelFloor) return 0.0;
    const double diff = fp.diff;
    return -inv_d * fp.tang2 * diff * diff / (pt * pt * pt);
  });
}

}  // namespace

RulePair RulePair::build(int dim, int fine_level) {
  if (fine_level < 8 || fine_level % 2 != 0) {
    throw std::invalid_argument("rule pair: fine level must be even and at least 8");
  }
  return {build_rule(dim, fine_level / 2), build_rule(dim, fine_level)};
}

double estimate_error(const Quadrature& coarse, const Quadrature& fine) {
  return std::max(std::abs(fine.value - coarse.value), fine.rounding_bound());
}

double q_integrand(const Matrix& a_t, std::span<const double> x, int d) {
  if (a_t.rows() != d || a_t.cols() != d || static_cast<int>(x.size()) != d) {
    throw std::invalid_argument("q_integrand: dimension mismatch");
  }
  if (std::abs(a_t.trace() - 1.0) > kTraceTolerance) {
    throw std::invalid_argument("q_integrand: trace(A_t) must be one");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a_t + a_t.transpose()));
  if (solver.eigenvalues()(0) < -kPsdTolerance) {
    throw std::invalid_argument("q_integrand: A_t is not positive semidefinite");
  }
  Vector xv(d);
  for (int i = 0; i < d; ++i) xv(i) = x[static_cast<std::size_t>(i)];
  if (std::abs(xv.norm() - 1.0) > kUnitTolerance) {
    throw std::invalid_argument("q_integrand: point is not on the unit sphere");
  }
  const Vector y = solver.eigenvectors().transpose() * xv;
  double s1 = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < d; ++i) {
    const double mu = std::max(0.0, solver.eigenvalues()(i));
    s1 += mu * y(i) * y(i);
    s2 += mu * mu * y(i) * y(i);
  }
  const double pt = 0.5 * s1;
  if (pt < kKernelFloor) return 0.0;
  return (s2 / pt) * (pt - 1.0 / (2.0 * d));
}

Quadrature q_direct_spectrum(std::span<const double> spectrum, double t, const SphereRule& rule) {
  require_rule_dim(spectrum.size(), rule);
  const std::vector<double> mu = interpolated_spectrum(spectrum, t);
  const double inv_d = 1.0 / rule.dim;
  return integrate_frame(rule, circle_map(mu, rule), [&](std::span<const double> y) {
    double s1 = 0.0;
    double s2 = 0.0;
    double dev = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double yi2 = y[i] * y[i];
      s1 += mu[i] * yi2;
      s2 += mu[i] * mu[i] * yi2;
      dev += (spectrum[i] - inv_d) * yi2;
    }
    const double pt = 0.5 * s1;
    if (pt < kKernelFloor) return 0.0;
    // p_t - P_d = t (p - P_d) since A_t - I/d = t (A - I/d)
    return (s2 / pt) * (0.5 * t * dev);
  });
}

double q_direct(const ParabolaCone& cone, double t, const SphereRule& rule) {
  if (t < 0.0) throw std::invalid_argument("q_direct: t must be nonnegative");
  require_rule_dim(static_cast<std::size_t>(cone.dim()), rule);
  if (cone.dim() == 1) return 0.0;  // x^2/2 is the only cone on the line
  const auto lambda = spectrum_of(cone);
  return q_direct_spectrum(lambda, t, rule).value;
}

double q_expanded(const ParabolaCone& cone, double t, const SphereRule& rule) {
  if (t < 0.0) throw std::invalid_argument("q_expanded: t must be nonnegative");
  require_rule_dim(static_cast<std::size_t>(cone.dim()), rule);
  const auto lambda = spectrum_of(cone);
  interpolated_spectrum(lambda, t);
  if (t == 0.0 || cone.dim() == 1) return 0.0;
  return t * t * q_bracket(lambda, t, rule).value;
}

double q_value(const ParabolaCone& cone, double t, const SphereRule& rule) {
  if (t < 0.0) throw std::invalid_argument("q_value: t must be nonnegative");
  require_rule_dim(static_cast<std::size_t>(cone.dim()), rule);
  const auto lambda = spectrum_of(cone);
  interpolated_spectrum(lambda, t);
  if (t == 0.0) return q_zero_limit(lambda, rule).value;
  return q_bracket(lambda, t, rule).value;
}

double q_second_derivative(const ParabolaCone& cone, double t, const SphereRule& rule) {
  require_rule_dim(static_cast<std::size_t>(cone.dim()), rule);
  const ExtendedReal tb = t_bar(cone);
  if (!(t > 0.0) || (!tb.infinite && !(t < tb.value))) {
    std::ostringstream msg;
    msg << "q_second_derivative: t = " << t << " outside (0, t_bar) with t_bar = "
        << (tb.infinite ? std::string("inf") : std::to_string(tb.value));
    throw std::domain_error(msg.str());
  }
  const auto lambda = spectrum_of(cone);
  return q_dd_spectrum(lambda, t, rule).value;
}

QReport q_report(const ParabolaCone& cone, double t, const RulePair& rules) {
  QReport r;
  r.t = t;
  r.rule_level = rules.fine.level;
  if (cone.dim() == 1) return r;
  const auto lambda = spectrum_of(cone);
  const Quadrature lo = q_direct_spectrum(lambda, t, rules.coarse);
  const Quadrature hi = q_direct_spectrum(lambda, t, rules.fine);
  r.q_direct = hi.value;
  r.q_expanded = q_expanded(cone, t, rules.fine);
  r.quad_error = estimate_error(lo, hi);
  return r;
}

InequalityVerdict verify_inequality(const ParabolaCone& cone, const RulePair& rules) {
  require_rule_dim(static_cast<std::size_t>(cone.dim()), rules.fine);
  const SymmetricMatch match = nearest_symmetric(cone);
  InequalityVerdict v{.cone = cone, .nearest_k = match.k, .dist_to_sp = match.distance};
  if (cone.dim() > 1) {
    const auto lambda = spectrum_of(cone);
    const Quadrature lo = q_direct_spectrum(lambda, 1.0, rules.coarse);
    const Quadrature hi = q_direct_spectrum(lambda, 1.0, rules.fine);
    v.q1 = hi.value;
    v.quad_error = estimate_error(lo, hi);
  }
  v.margin = v.q1;
  v.is_equality_case = std::abs(v.q1) <= kErrorBudget * v.quad_error;
  v.anomaly = v.is_equality_case != (v.dist_to_sp <= kSymmetricDistance);
  return v;
}

double dimension_reduction_constant(int d) {
  if (d < 2) throw std::invalid_argument("dimension reduction needs d >= 2");
  return (static_cast<double>(d - 1) / d) * wallis(d - 2);
}

DimensionReduction dimension_reduction_check(const Matrix& q, const RulePair& rules_d,
                                             const RulePair& rules_dm1) {
  const int dm1 = static_cast<int>(q.rows());
  const int d = dm1 + 1;
  if (q.cols() != dm1 || rules_dm1.dim() != dm1 || rules_d.dim() != d) {
    throw std::invalid_argument("dimension_reduction_check: rules must match dimensions d and d-1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (q + q.transpose()), Eigen::EigenvaluesOnly);
  const Vector asc = solver.eigenvalues();
  if (asc(0) < -kPsdTolerance) {
    throw std::invalid_argument("dimension_reduction_check: q is not positive semidefinite");
  }
  std::vector<double> q_spec(dm1);
  for (int i = 0; i < dm1; ++i) q_spec[i] = std::max(0.0, asc(dm1 - 1 - i));
  std::vector<double> p_spec = q_spec;
  p_spec.push_back(0.0);  // the kernel direction lands on the polar axis

  DimensionReduction out;
  out.alpha_predicted = dimension_reduction_constant(d);
  const Quadrature num = q_direct_spectrum(p_spec, 1.0, rules_d.fine);
  const Quadrature den_lo = q_direct_spectrum(q_spec, 1.0, rules_dm1.coarse);
  const Quadrature den_hi = q_direct_spectrum(q_spec, 1.0, rules_dm1.fine);
  out.numerator = num.value;
  out.denominator = den_hi.value;
  out.denominator_error = estimate_error(den_lo, den_hi);
  if (std::abs(out.denominator) > kErrorBudget * out.denominator_error) {
    out.alpha_measured = out.numerator / out.denominator;
  }
  return out;
}

DimensionReduction dimension_reduction_check(const ParabolaCone& q, const RulePair& rules_d,
                                             const RulePair& rules_dm1) {
  return dimension_reduction_check(q.matrix(), rules_d, rules_dm1);
}

ConeFamily parse_family(const std::string& name) {
  if (name == "interior") return ConeFamily::interior;
  if (name == "boundary") return ConeFamily::boundary;
  if (name == "near_symmetric" || name == "near-symmetric") return ConeFamily::near_symmetric;
  throw std::invalid_argument("unknown cone family '" + name +
                              "' (expected interior, boundary or near_symmetric)");
}

std::string to_string(ConeFamily family) {
  switch (family) {
    case ConeFamily::interior: return "interior";
    case ConeFamily::boundary: return "boundary";
    case ConeFamily::near_symmetric: return "near_symmetric";
  }
  return "unknown";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finaliser applied twice
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(seed ^ mix(index));
}

namespace {

Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  // fill column by column so the draw order is fixed
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = normal(rng);
  return g;
}

Matrix haar_rotation(int dim, std::mt19937_64& rng) {
  const Matrix g = gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix qm = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) qm.col(j) *= -1.0;
  }
  return qm;
}

ParabolaCone normalised_gram(const Matrix& g) {
  Matrix a = g * g.transpose();
  a = 0.5 * (a + a.transpose()).eval();
  a /= a.trace();
  a = 0.5 * (a + a.transpose()).eval();
  return ParabolaCone(std::move(a));
}

}  // namespace

Matrix random_rotation(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_rotation(dim, rng);
}

ParabolaCone random_parabola(int dim, std::uint64_t seed, ConeFamily family,
                             std::optional<int> rank) {
  if (dim < 1) throw std::invalid_argument("random_parabola: dim must be positive");
  if (dim == 1) return ParabolaCone::radial(1);
  std::mt19937_64 rng(seed);
  switch (family) {
    case ConeFamily::interior:
      return normalised_gram(gaussian_matrix(dim, dim, rng));
    case ConeFamily::boundary: {
      int r = 0;
      if (rank) {
        r = *rank;
      } else {
        std::uniform_int_distribution<int> pick(1, dim - 1);
        r = pick(rng);
      }
      if (r < 1 || r >= dim) throw std::invalid_argument("random_parabola: boundary rank must lie in [1, d)");
      return normalised_gram(gaussian_matrix(dim, r, rng));
    }
    case ConeFamily::near_symmetric: {
      std::uniform_int_distribution<int> pick(1, dim);
      const int k = pick(rng);
      std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
      Vector spectrum = symmetric_spectrum(dim, k);
      for (int i = 0; i < dim; ++i) {
        const double delta = jitter(rng);
        spectrum(i) = spectrum(i) > 0.0 ? spectrum(i) + delta : std::abs(delta);
      }
      spectrum /= spectrum.sum();
      const Matrix rotation = haar_rotation(dim, rng);
      return ParabolaCone::from_spectrum(std::span<const double>(spectrum.data(), spectrum.size()),
                                         rotation);
    }
  }
  throw std::invalid_argument("random_parabola: unknown family");
}

std::vector<double> chebyshev_scan(double t_end, int count) {
  if (!(t_end > 0.0) || count < 2) throw std::invalid_argument("chebyshev_scan: bad range");
  const double a = 1e-3 * t_end;
  const double b = (1.0 - 1e-3) * t_end;
  std::vector<double> ts(count);
  for (int j = 0; j < count; ++j) {
    const double c = std::cos(std::numbers::pi * j / (count - 1));
    ts[j] = a + (b - a) * 0.5 * (1.0 - c);
  }
  ts.front() = a;
  ts.back() = b;
  return ts;
}

QCurve q_curve(const ParabolaCone& cone, const RulePair& rules, int t_points) {
  require_rule_dim(static_cast<std::size_t>(cone.dim()), rules.fine);
  const auto lambda = spectrum_of(cone);
  QCurve curve;
  curve.t_bar = t_bar(cone);
  curve.t_end = curve.t_bar.infinite ? kMaxScanT : std::min(curve.t_bar.value, kMaxScanT);

  const Quadrature z_lo = q_zero_limit(lambda, rules.coarse);
  const Quadrature z_hi = q_zero_limit(lambda, rules.fine);
  curve.q0 = z_hi.value;
  curve.q0_error = estimate_error(z_lo, z_hi);
  // Evaluating exactly at t_bar can fall a rounding step past it.
  const double t_end_safe = std::min(curve.t_end, curve.t_end * (1.0 - 1e-15));
  const Quadrature e_lo = q_bracket(lambda, t_end_safe, rules.coarse);
  const Quadrature e_hi = q_bracket(lambda, t_end_safe, rules.fine);
  curve.q_end = e_hi.value;
  curve.q_end_error = estimate_error(e_lo, e_hi);

  const double h = kFiniteDifferenceStep;
  auto q_at = [&](double t) {
    return t == 0.0 ? q_zero_limit(lambda, rules.fine).value
                    : q_bracket(lambda, std::min(t, t_end_safe), rules.fine).value;
  };
  for (double t : chebyshev_scan(curve.t_end, t_points)) {
    QCurvePoint pt;
    pt.t = t;
    const Quadrature d_lo = q_direct_spectrum(lambda, t, rules.coarse);
    const Quadrature d_hi = q_direct_spectrum(lambda, t, rules.fine);
    pt.q_direct = d_hi.value;
    pt.quad_error = estimate_error(d_lo, d_hi);
    const Quadrature b_lo = q_bracket(lambda, t, rules.coarse);
    const Quadrature b_hi = q_bracket(lambda, t, rules.fine);
    pt.q = b_hi.value;
    pt.q_error = estimate_error(b_lo, b_hi);
    pt.q_expanded = t * t * pt.q;
    const Quadrature dd_lo = q_dd_spectrum(lambda, t, rules.coarse);
    const Quadrature dd_hi = q_dd_spectrum(lambda, t, rules.fine);
    pt.q_dd_formula = dd_hi.value;
    pt.dd_quad_error = estimate_error(dd_lo, dd_hi);
    const double lo_t = std::max(0.0, t - h);
    const double hi_t = t + h;
    const double q_minus = q_at(lo_t);
    const double q_plus = q_at(hi_t);
    const double hm = t - lo_t;
    const double hp = hi_t - t;
    // nonuniform three-point second difference (uniform whenever t >= h)
    pt.q_dd_finite_diff = 2.0 * (hm * q_plus - (hm + hp) * pt.q + hp * q_minus) / (hm * hp * (hm + hp));
    pt.interior = t >= kFiniteDifferenceMargin * curve.t_end &&
                  t <= (1.0 - kFiniteDifferenceMargin) * curve.t_end;
    curve.points.push_back(pt);
  }
  return curve;
}

bool mixed_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

QCurveCheck check_q_curve(const QCurve& curve, double fd_tolerance) {
  QCurveCheck c;
  auto fail = [&](bool& flag, const std::string& what, double t) {
    if (flag) {
      flag = false;
      if (c.first_failure.empty()) {
        std::ostringstream msg;
        msg << what << " at t = " << t;
        c.first_failure = msg.str();
      }
    }
  };
  if (curve.q0 < -kErrorBudget * curve.q0_error) fail(c.endpoints, "q(0) < 0", 0.0);
  if (curve.q_end < -kErrorBudget * curve.q_end_error) fail(c.endpoints, "q(t_end) < 0", curve.t_end);
  const double chord_floor = std::min(curve.q0, curve.q_end);
  for (const auto& p : curve.points) {
    if (std::abs(p.q_direct - p.q_expanded) > kErrorBudget * p.quad_error) {
      fail(c.equivalence, "Q_direct and Q_expanded disagree", p.t);
    }
    if (p.q_dd_formula > kErrorBudget * p.dd_quad_error) fail(c.concavity, "q'' > 0", p.t);
    if (p.interior && !mixed_close(p.q_dd_formula, p.q_dd_finite_diff, fd_tolerance)) {
      fail(c.finite_difference, "q'' formula and finite difference disagree", p.t);
    }
    const double slack = kErrorBudget * std::max({p.q_error, curve.q0_error, curve.q_end_error});
    if (p.q < chord_floor * (1.0 - 1e-6) - slack) fail(c.chord, "q below its endpoint chord", p.t);
  }
  return c;
}

}  // namespace apcones
