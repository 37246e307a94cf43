#include "apcones/variational_solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace apcones {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kMonotoneSlack = 1e-10;

double default_threshold(const GridField& f, std::optional<double> threshold) {
  return threshold ? *threshold : 10.0 * f.h() * f.h();
}

// phi(u) = d u^2 - S u + h^2 Phi_delta(u): the energy as a function of one
// interior node (times h^(2-d), constants dropped). Powers u^gamma are passed
// in so callers can cache them; pow dominates the cost of a sweep.
struct LocalProblem {
  int d;
  double h2;
  double gamma;
  double delta = 0.0;  // 0 unless gamma < 1
  double cap = 0.0;    // gamma delta^(gamma-1)
  double shift = 0.0;  // (gamma-1) delta^gamma
  double m = 0.0;      // phi is convex on the power branch above m = max(delta, u_c)
  double m_pow = 0.0;  // m^(gamma-1)

  LocalProblem(int dim, double h, double g, double dl) : d(dim), h2(h * h), gamma(g) {
    if (gamma < 1.0) {
      delta = dl;
      cap = gamma * std::pow(delta, gamma - 1.0);
      shift = (gamma - 1.0) * std::pow(delta, gamma);
      const double u_c = std::pow(h2 * gamma * (1.0 - gamma) / (2.0 * d), 1.0 / (2.0 - gamma));
      m = std::max(delta, u_c);
      m_pow = std::pow(m, gamma - 1.0);
    }
  }

  bool on_power_branch(double u) const { return u > 0.0 && gamma != 1.0 && (gamma > 1.0 || u > delta); }
  double power(double u) const { return on_power_branch(u) ? std::pow(u, gamma) : 0.0; }

  double potential(double u, double upow) const {
    if (u <= 0.0) return 0.0;
    if (gamma == 1.0) return u;
    if (gamma > 1.0) return upow;
    if (u <= delta) return cap * u;
    return upow + shift;
  }

  double phi(double u, double s, double upow) const { return d * u * u - s * u + h2 * potential(u, upow); }

  // Root of F(u) = 2du - s + h^2 gamma u^(gamma-1) in [lo, hi] with F(lo) < 0 < F(hi).
  double power_root(double s, double lo, double hi, double start) const {
    double x = std::clamp(start, lo, hi);
    if (!(x > lo && x < hi)) x = hi;
    for (int it = 0; it < 100; ++it) {
      const double pw = std::pow(x, gamma - 2.0);
      const double f = 2.0 * d * x - s + h2 * gamma * pw * x;
      if (f > 0.0) hi = x; else lo = x;
      const double fp = 2.0 * d + h2 * gamma * (gamma - 1.0) * pw;
      double next = (fp > 0.0) ? x - f / fp : 0.5 * (lo + hi);
      const bool newton = next > lo && next < hi;
      if (!newton) next = 0.5 * (lo + hi);
      // Quadratic convergence: a Newton step of relative size 1e-9 leaves an
      // error far below rounding.
      if ((newton && std::abs(next - x) <= 1e-9 * x) || hi - lo <= 4.0 * kEps * hi) return next;
      x = next;
    }
    return x;
  }

  // Global minimizer of phi over u >= 0.
  double minimizer(double s, double hint) const {
    if (gamma == 1.0) return std::max(0.0, (s - h2) / (2.0 * d));
    if (gamma > 1.0) {
      if (s <= 0.0) return 0.0;
      return power_root(s, 0.0, s / (2.0 * d), hint);
    }
    // Linear branch on [0, delta] is a quadratic with vertex `raw`. When
    // raw >= delta, phi still decreases past delta and the power branch wins.
    const double raw = (s - h2 * cap) / (2.0 * d);
    if (raw >= delta) {
      const double fm = 2.0 * d * m - s + h2 * gamma * m_pow;
      return fm < 0.0 ? power_root(s, m, s / (2.0 * d), std::max(hint, m)) : m;
    }
    const double a = std::max(raw, 0.0);
    // Power branch: convex on [m, inf); on [delta, u_c] phi is concave and its
    // minimum there is at an end point already covered.
    double b = m;
    const double fm = 2.0 * d * m - s + h2 * gamma * m_pow;
    if (fm < 0.0) b = power_root(s, m, s / (2.0 * d), std::max(hint, m));
    return (phi(a, s, 0.0) <= phi(b, s, power(b))) ? a : b;
  }
};

std::vector<std::size_t> interior_nodes(const GridField& f) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.kind(i) == NodeKind::interior) idx.push_back(i);
  }
  return idx;
}

struct SweepResult {
  double max_update = 0.0;
};

// One lexicographic sweep of projected over-relaxation. For gamma != 1 an
// over-relaxed value that raises phi is replaced by the exact minimizer, so
// the regularized energy never increases. `powers` caches u_i^gamma.
SweepResult sweep(GridField& f, const std::vector<std::size_t>& nodes, const LocalProblem& lp,
                  double omega, std::vector<double>& powers) {
  double* u = f.values().data();
  const int d = f.dim();
  std::array<std::size_t, 3> st{};
  for (int a = 0; a < d; ++a) st[a] = f.stride(a);
  const bool guard = lp.gamma != 1.0;
  SweepResult r;
  for (std::size_t i : nodes) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += u[i - st[a]] + u[i + st[a]];
    const double old = u[i];
    const double star = lp.minimizer(s, old);
    r.max_update = std::max(r.max_update, std::abs(star - old));
    double next = std::max(0.0, old + omega * (star - old));
    if (guard) {
      double next_pow = lp.power(next);
      if (next != star && lp.phi(next, s, next_pow) > lp.phi(old, s, powers[i])) {
        next = star;
        next_pow = lp.power(star);
      }
      powers[i] = next_pow;
    }
    u[i] = next;
  }
  return r;
}

}  // namespace

std::vector<double> default_schedule() { return {1e-2, 1e-3, 1e-4, 1e-6}; }

void validate(const SolverConfig& config) {
  make_exponent(config.exponent.gamma);
  for (std::size_t i = 0; i < config.delta_schedule.size(); ++i) {
    const double dl = config.delta_schedule[i];
    if (!(dl > 0.0)) throw std::invalid_argument("solver: regularization floors must be positive");
    if (i > 0 && !(dl < config.delta_schedule[i - 1])) {
      throw std::invalid_argument("solver: regularization schedule must be strictly decreasing");
    }
  }
  if (config.sweep_limit < 1) throw std::invalid_argument("solver: sweep limit must be positive");
  if (!(config.residual_tol > 0.0)) throw std::invalid_argument("solver: residual tolerance must be positive");
  if (!(config.stage_tol > 0.0)) throw std::invalid_argument("solver: stage tolerance must be positive");
  if (config.relaxation && !(*config.relaxation > 0.0 && *config.relaxation < 2.0)) {
    throw std::invalid_argument("solver: relaxation must lie in (0, 2)");
  }
}

double optimal_relaxation(double h) {
  return 2.0 / (1.0 + std::sin(std::numbers::pi * h / 2.0));
}

double reaction_potential(double u, double gamma, double delta) {
  if (u <= 0.0) return 0.0;
  if (gamma == 1.0) return u;
  if (gamma > 1.0 || delta <= 0.0) return std::pow(u, gamma);
  if (u <= delta) return gamma * std::pow(delta, gamma - 1.0) * u;
  return std::pow(u, gamma) + (gamma - 1.0) * std::pow(delta, gamma);
}

SolveResult minimize(int dim, int n, const BoundaryData& g, const SolverConfig& config) {
  validate(config);
  GridField f(dim, n);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f.active(i)) continue;
    const bool dirichlet = f.kind(i) == NodeKind::dirichlet;
    if (!dirichlet && config.zero_initial_guess) continue;
    const double v = g(f.point(i));
    if (dirichlet && !(std::isfinite(v) && v >= 0.0)) {
      std::ostringstream msg;
      msg << "solver: boundary data must be finite and nonnegative (node " << i << ", value " << v << ")";
      throw std::invalid_argument(msg.str());
    }
    f[i] = std::max(0.0, std::isfinite(v) ? v : 0.0);
  }
  return minimize(std::move(f), config);
}

SolveResult minimize(GridField initial, const SolverConfig& config) {
  validate(config);
  const Exponent& exp = config.exponent;
  std::vector<double> schedule{0.0};
  if (exp.gamma < 1.0) schedule = config.delta_schedule.empty() ? default_schedule() : config.delta_schedule;

  SolveResult result{.field = std::move(initial)};
  GridField& f = result.field;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f.active(i)) f[i] = 0.0;
    else if (!(f[i] >= 0.0)) throw std::invalid_argument("solver: initial field must be nonnegative");
  }
  const auto nodes = interior_nodes(f);
  const double h = f.h();
  const double omega = config.relaxation.value_or(optimal_relaxation(h));
  const double to_residual = 2.0 * f.dim() / (h * h);
  result.relaxation = omega;
  std::vector<double> powers(f.size(), 0.0);

  for (std::size_t st = 0; st < schedule.size(); ++st) {
    const double delta = schedule[st];
    const double tol =
        st + 1 == schedule.size() ? config.residual_tol : std::max(config.residual_tol, config.stage_tol);
    const LocalProblem lp(f.dim(), h, exp.gamma, delta);
    for (std::size_t i : nodes) powers[i] = lp.power(f[i]);
    StageReport stage{.delta = delta};
    while (stage.sweeps < config.sweep_limit) {
      const SweepResult sr = sweep(f, nodes, lp, omega, powers);
      ++stage.sweeps;
      stage.residual = sr.max_update * to_residual;
      if (config.record_sweep_energy) result.sweep_energy.push_back(discrete_energy(f, exp, delta));
      if (stage.residual <= tol) {
        stage.converged = true;
        break;
      }
    }
    stage.energy = discrete_energy(f, exp, 0.0);
    stage.regularized_energy = discrete_energy(f, exp, delta);
    result.total_sweeps += stage.sweeps;
    result.energy_history.push_back(stage.energy);
    result.stages.push_back(stage);
  }
  for (std::size_t k = 1; k < result.energy_history.size(); ++k) {
    const double prev = result.energy_history[k - 1];
    if (result.energy_history[k] > prev + kMonotoneSlack * std::max(1.0, std::abs(prev))) {
      result.energy_monotone = false;
    }
  }
  result.residual = result.stages.back().residual;
  result.converged = result.stages.back().converged;
  return result;
}

double discrete_energy(const GridField& f, const Exponent& exp, double delta) {
  const int d = f.dim();
  const double h = f.h();
  double grad = 0.0;
  double reaction = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.kind(i) != NodeKind::interior) continue;
    reaction += reaction_potential(f[i], exp.gamma, delta);
    for (int a = 0; a < d; ++a) {
      const std::size_t s = f.stride(a);
      const double fwd = f[i + s] - f[i];
      grad += fwd * fwd;
      if (f.kind(i - s) != NodeKind::interior) {
        const double bwd = f[i] - f[i - s];
        grad += bwd * bwd;
      }
    }
  }
  return std::pow(h, d) * (0.5 * grad / (h * h) + reaction);
}

double el_residual(const GridField& f, const Exponent& exp, std::optional<double> threshold) {
  const double thr = default_threshold(f, threshold);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.kind(i) != NodeKind::interior || !(f[i] > thr)) continue;
    const double rhs = exp.gamma == 1.0 ? 1.0 : exp.gamma * std::pow(f[i], exp.gamma - 1.0);
    worst = std::max(worst, std::abs(f.laplacian(i) - rhs));
  }
  return worst;
}

GridField transform_field(const GridField& v, const Exponent& exp) {
  GridField u = v;
  const double power = 2.0 / exp.beta;
  const double scale = exp.gamma * (2.0 - exp.gamma);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (exp.gamma == 1.0) continue;
    u[i] = v[i] > 0.0 ? std::pow(v[i], power) / scale : 0.0;
  }
  return u;
}

double untransform_value(double u, const Exponent& exp) {
  if (u <= 0.0) return 0.0;
  if (exp.gamma == 1.0) return u;
  return std::pow(exp.gamma * (2.0 - exp.gamma) * u, exp.beta / 2.0);
}

double transformed_residual(const GridField& u, const Exponent& exp, std::optional<double> threshold) {
  const double thr = default_threshold(u, threshold);
  const double k = 0.5 * (exp.beta - 2.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.kind(i) != NodeKind::interior || !(u[i] > thr)) continue;
    double r = u.laplacian(i) - 1.0;
    if (k != 0.0) r += k * u.gradient(i).squaredNorm() / u[i];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double homogeneity_defect(const GridField& f, double beta) {
  const long c = (f.n() - 1) / 2;
  double worst = 0.0;
  for (int m : {4, 2}) {
    const double scale = std::pow(static_cast<double>(m), beta);  // r^-beta with r = 1/m
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!f.active(i)) continue;
      const auto k = f.offsets(i);
      long r2 = 0;
      bool divisible = true;
      for (int a = 0; a < f.dim(); ++a) {
        r2 += static_cast<long>(k[a]) * k[a];
        divisible = divisible && (k[a] % m == 0);
      }
      if (!divisible || 4 * r2 > c * c) continue;
      std::size_t j = f.origin();
      for (int a = 0; a < f.dim(); ++a) {
        j = static_cast<std::size_t>(static_cast<long>(j) + (k[a] / m) * static_cast<long>(f.stride(a)));
      }
      worst = std::max(worst, std::abs(scale * f[j] - f[i]));
    }
  }
  return worst;
}

double contact_fraction(const GridField& f, std::optional<double> threshold) {
  const double thr = default_threshold(f, threshold);
  std::size_t total = 0;
  std::size_t contact = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.kind(i) != NodeKind::interior) continue;
    ++total;
    contact += (f[i] <= thr);
  }
  return total ? static_cast<double>(contact) / static_cast<double>(total) : 0.0;
}

namespace {

struct GreenSums {
  Quadrature lhs;
  Quadrature rhs;
  Quadrature diff;
};

GreenSums green_sums(const GridField& u, const std::vector<GridField>& grad, const ParabolaCone& p,
                     const Exponent& exp, const SphereRule& rule, double radius) {
  const int d = u.dim();
  const double thr = 10.0 * u.h() * u.h();
  const double factor = 0.5 * (2.0 - exp.beta);
  const double radial = 1.0 / (2.0 * d);
  std::vector<double> lhs(rule.size());
  std::vector<double> rhs(rule.size());
  Vector w(d);
  Vector y(d);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto node = rule.node(q);
    for (int a = 0; a < d; ++a) w(a) = node[a];
    y = radius * w;
    const double shape = p.value(w) - radial;
    const double uy = u.interpolate(y);
    if (uy <= thr) {
      lhs[q] = 0.0;
      rhs[q] = shape;
    } else {
      double g2 = 0.0;
      for (int a = 0; a < d; ++a) {
        const double ga = grad[a].interpolate(y);
        g2 += ga * ga;
      }
      lhs[q] = factor * (g2 / uy) * shape;
      rhs[q] = 0.0;
    }
  }
  auto weigh = [&](const std::vector<double>& vals) {
    std::vector<double> terms(vals.size());
    std::vector<double> mags(vals.size());
    for (std::size_t q = 0; q < vals.size(); ++q) {
      terms[q] = rule.weights[q] * vals[q];
      mags[q] = std::abs(terms[q]);
    }
    return Quadrature{pairwise_sum(terms), pairwise_sum(mags)};
  };
  std::vector<double> diff(rule.size());
  for (std::size_t q = 0; q < diff.size(); ++q) diff[q] = lhs[q] - rhs[q];
  return {weigh(lhs), weigh(rhs), weigh(diff)};
}

std::vector<GridField> gradient_fields(const GridField& u) {
  std::vector<GridField> grad(static_cast<std::size_t>(u.dim()), GridField(u.dim(), u.n()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!u.active(i)) continue;
    const Vector g = u.gradient(i);
    for (int a = 0; a < u.dim(); ++a) grad[a][i] = g(a);
  }
  return grad;
}

void check_green_inputs(const GridField& u, const ParabolaCone& p, const Exponent& exp,
                        const SphereRule& rule) {
  if (exp.gamma == 1.0) {
    throw std::invalid_argument("green identity: vacuous at gamma = 1 (2 - beta = 0)");
  }
  if (p.dim() != u.dim() || rule.dim != u.dim()) {
    throw std::invalid_argument("green identity: field, cone and rule dimensions differ");
  }
}

}  // namespace

GreenIdentity green_identity_check(const GridField& u, const ParabolaCone& p, const Exponent& exp,
                                   const SphereRule& rule) {
  check_green_inputs(u, p, exp, rule);
  const double radius = 1.0 - 2.0 * u.h();
  const auto s = green_sums(u, gradient_fields(u), p, exp, rule, radius);
  return {s.lhs.value, s.rhs.value, 0.0, radius};
}

GreenIdentity green_identity_check(const GridField& u, const ParabolaCone& p, const Exponent& exp,
                                   const SphereRule& coarse, const SphereRule& fine) {
  check_green_inputs(u, p, exp, coarse);
  check_green_inputs(u, p, exp, fine);
  const double radius = 1.0 - 2.0 * u.h();
  const auto grad = gradient_fields(u);
  const auto lo = green_sums(u, grad, p, exp, coarse, radius);
  const auto hi = green_sums(u, grad, p, exp, fine, radius);
  const double err = std::max(std::abs(hi.diff.value - lo.diff.value), hi.diff.rounding_bound());
  return {hi.lhs.value, hi.rhs.value, err, radius};
}

double linf_distance_to_cone(const GridField& f, const AnyCone& cone) {
  const int cdim = std::visit([](const auto& c) { return c.dim(); }, cone);
  if (cdim != f.dim()) throw std::invalid_argument("linf_distance_to_cone: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f.active(i)) continue;
    const Vector x = f.point(i);
    const double c = std::visit([&](const auto& k) { return k.value(x); }, cone);
    worst = std::max(worst, std::abs(f[i] - c));
  }
  return worst;
}

Matrix fit_quadratic(const GridField& f, double radius) {
  const int d = f.dim();
  const int m = d * (d + 1) / 2;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f.active(i)) continue;
    const double r = f.point(i).norm();
    if (r > 0.0 && r <= radius) rows.push_back(i);
  }
  if (rows.size() < static_cast<std::size_t>(m)) throw std::invalid_argument("fit_quadratic: too few nodes");
  Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()), m);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Vector x = f.point(rows[r]);
    int col = 0;
    for (int a = 0; a < d; ++a) {
      for (int b = a; b < d; ++b) design(static_cast<Eigen::Index>(r), col++) = (a == b) ? 0.5 * x(a) * x(a) : x(a) * x(b);
    }
    rhs(static_cast<Eigen::Index>(r)) = f[rows[r]];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
  Matrix a(d, d);
  int col = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      a(i, j) = coef(col);
      a(j, i) = coef(col);
      ++col;
    }
  }
  return a;
}

ConeFit nearest_symmetric_fit(const GridField& f, double half_space_scale) {
  const int d = f.dim();
  ConeFit fit;
  fit.hessian = fit_quadratic(f);
  Eigen::SelfAdjointEigenSolver<Matrix> es(fit.hessian);
  fit.rotation = es.eigenvectors().rowwise().reverse();
  fit.distances.assign(static_cast<std::size_t>(d) + 1, 0.0);

  Vector e = fit.rotation.col(0).normalized();
  fit.distances[0] = std::min(linf_distance_to_cone(f, HalfSpaceCone(e, half_space_scale)),
                              linf_distance_to_cone(f, HalfSpaceCone(-e, half_space_scale)));
  for (int k = 1; k <= d; ++k) {
    fit.distances[static_cast<std::size_t>(k)] = linf_distance_to_cone(f, SymmetricCone(d, k, fit.rotation));
  }
  fit.k = 0;
  fit.distance = fit.distances[0];
  for (int k = 1; k <= d; ++k) {
    if (fit.distances[static_cast<std::size_t>(k)] < fit.distance) {
      fit.k = k;
      fit.distance = fit.distances[static_cast<std::size_t>(k)];
    }
  }
  return fit;
}

}  // namespace apcones
