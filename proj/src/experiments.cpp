#include "apcones/experiments.hpp"

#include "apcones/grid_field.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <sstream>

namespace apcones {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_number_list(std::string text, const std::string& what) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '(' && text.back() == ')') {
    text = text.substr(1, text.size() - 2);
  }
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError(what + ": cannot parse '" + item + "' as a number");
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw UsageError(what + ": cannot parse '" + item + "' as a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string join_values(const Vector& v) {
  std::vector<std::string> parts;
  for (int i = 0; i < v.size(); ++i) parts.push_back(format_double(v(i)));
  return join(parts, ';');
}

std::string flag(bool b) { return b ? "1" : "0"; }

Exponent exponent_or_usage(double gamma) {
  try {
    return make_exponent(gamma);
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
}

void require_level(int level) {
  if (level < 8 || level % 2 != 0) {
    throw UsageError("level must be even and at least 8 (the coarse rule uses level/2)");
  }
}

// Rotation whose first column is e.
Matrix frame_with_first_column(const Vector& e) {
  const int d = static_cast<int>(e.size());
  Eigen::HouseholderQR<Matrix> qr(Matrix(e.normalized()));
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  if (q.col(0).dot(e) < 0.0) q.col(0) = -q.col(0);
  return q;
}

// Runs body(i) for i in [0, count), in parallel when OpenMP is on, and
// rethrows the first exception by index once every worker has finished.
template <class Body>
void parallel_for(int count, Body&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(count, 0)));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) throw std::runtime_error("report: non-finite value");
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_extended(const ExtendedReal& v) {
  return v.infinite ? std::string("inf") : format_double(v.value);
}

std::string format_cone_matrix(const ParabolaCone& cone) {
  std::vector<std::string> parts;
  const Matrix& a = cone.matrix();
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = i; j < a.cols(); ++j) parts.push_back(format_double(a(i, j)));
  }
  return join(parts, ';');
}

int default_level(int dim) { return dim >= 5 ? 16 : 64; }

void RunReport::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size()) throw std::logic_error("report: row width differs from header");
  rows.push_back(std::move(cells));
}

void RunReport::check(bool ok, const std::string& name) {
  if (ok) {
    ++pass_count;
  } else {
    ++fail_count;
    failures.push_back(name);
  }
}

std::string RunReport::csv() const {
  std::string out = join(columns, ',') + '\n';
  for (const auto& r : rows) out += join(r, ',') + '\n';
  return out;
}

std::string RunReport::summary_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = seed;
  j["dim"] = dim;
  j["params"] = params;
  j["summary"] = {{"pass_count", pass_count}, {"fail_count", fail_count}, {"anomaly_count", anomaly_count}};
  j["unconverged"] = unconverged;
  j["failures"] = failures;
  j["exit_status"] = exit_status();
  return j.dump(2) + '\n';
}

int RunReport::exit_status() const {
  if (fail_count > 0 || anomaly_count > 0) return kExitFail;
  if (unconverged) return kExitUnconverged;
  return kExitPass;
}

// ---------------------------------------------------------------- boundary data

std::vector<double> parse_eigenvalues(const std::string& text) {
  auto values = parse_number_list(text, "eigenvalues");
  for (double v : values) {
    if (v < 0.0) throw UsageError("eigenvalues: negative entry " + format_double(v));
  }
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  if (std::abs(sum - 1.0) > kTraceTolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "eigenvalues sum to %.17g, deviation %.3e from 1 exceeds %.0e", sum,
                  sum - 1.0, kTraceTolerance);
    throw UsageError(buf);
  }
  return values;
}

BoundarySpec parse_boundary(const std::string& text, int dim) {
  BoundarySpec spec;
  spec.text = text;
  const auto colon = text.find(':');
  const std::string kind = trim(text.substr(0, colon));
  const std::string arg = colon == std::string::npos ? std::string() : text.substr(colon + 1);

  if (kind == "parabola") {
    if (arg.empty()) throw UsageError("parabola boundary needs an eigenvalue list");
    spec.kind = BoundarySpec::Kind::parabola;
    spec.eigenvalues = parse_eigenvalues(arg);
    if (dim == 0) dim = static_cast<int>(spec.eigenvalues.size());
    if (static_cast<int>(spec.eigenvalues.size()) != dim) {
      throw UsageError("parabola boundary: " + std::to_string(spec.eigenvalues.size()) +
                       " eigenvalues for dimension " + std::to_string(dim));
    }
    std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(), std::greater<>());
  } else if (dim < 1) {
    throw UsageError("boundary '" + text + "' needs an explicit dimension");
  } else if (kind == "flat") {
    spec.kind = BoundarySpec::Kind::flat;
    if (arg.empty()) {
      spec.direction = Vector::Unit(dim, 0);
    } else {
      auto e = parse_number_list(arg, "flat direction");
      if (static_cast<int>(e.size()) != dim) throw UsageError("flat direction has the wrong length");
      spec.direction = Eigen::Map<Vector>(e.data(), dim);
      const double norm = spec.direction.norm();
      if (norm == 0.0) throw UsageError("flat direction is zero");
      spec.direction /= norm;
    }
  } else if (kind == "symmetric") {
    spec.kind = BoundarySpec::Kind::symmetric;
    std::size_t used = 0;
    try {
      spec.k = std::stoi(trim(arg), &used);
    } catch (const std::exception&) {
      throw UsageError("symmetric boundary needs an integer k");
    }
    if (used != trim(arg).size() || spec.k < 0 || spec.k > dim) {
      throw UsageError("symmetric boundary: k must lie in 0.." + std::to_string(dim));
    }
    if (spec.k == 0) spec.direction = Vector::Unit(dim, 0);
  } else {
    throw UsageError("unknown boundary kind '" + kind + "' (flat, parabola, symmetric)");
  }
  spec.dim = dim;
  return spec;
}

double boundary_target(const BoundarySpec& spec, const Exponent& exp, const Vector& x) {
  const bool flat = spec.kind == BoundarySpec::Kind::flat ||
                    (spec.kind == BoundarySpec::Kind::symmetric && spec.k == 0);
  if (flat) {
    const double s = std::max(0.0, x.dot(spec.direction));
    return (2.0 - exp.gamma) / (2.0 * exp.gamma) * s * s;
  }
  if (spec.kind == BoundarySpec::Kind::symmetric) {
    return 0.5 * x.head(spec.k).squaredNorm() / spec.k;
  }
  double acc = 0.0;
  for (int i = 0; i < spec.dim; ++i) acc += spec.eigenvalues[static_cast<std::size_t>(i)] * x(i) * x(i);
  return 0.5 * acc;
}

BoundaryData boundary_data(const BoundarySpec& spec, const Exponent& exp) {
  return [spec, exp](const Vector& x) { return untransform_value(boundary_target(spec, exp, x), exp); };
}

ParabolaCone reference_parabola(const BoundarySpec& spec) {
  switch (spec.kind) {
    case BoundarySpec::Kind::parabola:
      return ParabolaCone::from_spectrum(spec.eigenvalues);
    case BoundarySpec::Kind::symmetric:
      if (spec.k > 0) return SymmetricCone(spec.dim, spec.k).parabola();
      [[fallthrough]];
    case BoundarySpec::Kind::flat:
      break;
  }
  const Vector lambda = symmetric_spectrum(spec.dim, 1);
  return ParabolaCone::from_spectrum(std::span<const double>(lambda.data(), lambda.size()),
                                     frame_with_first_column(spec.direction));
}

// ---------------------------------------------------------------- selftest

RunReport cmd_selftest(const SelftestOptions& options) {
  RunReport r;
  r.command = "selftest";
  r.columns = {"check", "value", "tolerance", "pass"};
  auto record = [&](const std::string& name, double value, double tol) {
    const bool ok = std::isfinite(value) && value <= tol;
    r.add_row({name, format_double(std::isfinite(value) ? value : 1e300), format_double(tol), flag(ok)});
    r.check(ok, name);
  };

  // Quadrature: total mass and even moments x_1^2, x_1^4, x_1^2 x_2^2; one odd moment.
  double mass_err = 0.0;
  double moment_err = 0.0;
  double odd_err = 0.0;
  for (int d = kMinSphereDim; d <= kMaxSphereDim; ++d) {
    SphereRule rule = build_rule(d, d == 5 ? 8 : 16);
    if (options.corrupt_weight && d == 2) rule.weights[0] *= 1.5;
    const double area = sphere_area(d);
    const double sum = pairwise_sum(rule.weights);
    mass_err = std::max(mass_err, std::abs(sum - area) / area);
    const double m2 = integrate(rule, [](auto x) { return x[0] * x[0]; });
    const double m4 = integrate(rule, [](auto x) { return std::pow(x[0], 4); });
    moment_err = std::max({moment_err, std::abs(m2 - area / d) / area,
                           std::abs(m4 - 3.0 * area / (d * (d + 2.0))) / area});
    if (d >= 2) {
      const double m22 = integrate(rule, [](auto x) { return x[0] * x[0] * x[1] * x[1]; });
      moment_err = std::max(moment_err, std::abs(m22 - area / (d * (d + 2.0))) / area);
      odd_err = std::max(odd_err, std::abs(integrate(rule, [](auto x) { return x[0] * x[0] * x[0] * x[1]; })) / area);
    }
  }
  record("sum-of-weights", mass_err, 1e-12);
  record("moment-exactness", moment_err, 1e-12);
  record("odd-moment", odd_err, 1e-14);

  double rec = 0.0;
  for (int m = 2; m <= 12; ++m) {
    rec = std::max(rec, std::abs(wallis(m) - (m - 1.0) / m * wallis(m - 2)) / wallis(m));
  }
  record("wallis-recursion", rec, 1e-14);
  record("wallis-w0", std::abs(wallis(0) - M_PI), 1e-15);
  record("wallis-w2", std::abs(wallis(2) - M_PI / 2.0), 1e-15);

  double c_err = 0.0;
  for (double g : {0.5, 0.75, 1.0, 1.25, 1.5}) {
    const auto e = make_exponent(g);
    c_err = std::max(c_err, std::abs(std::pow(e.c_gamma, 2.0 - g) - (2.0 - g) * (2.0 - g) / 2.0));
    c_err = std::max(c_err, std::abs(e.beta - 2.0 / (2.0 - g)));
  }
  record("flat-coefficient", c_err, 1e-14);

  double trace_err = 0.0;
  double psd_err = 0.0;
  for (int d = 2; d <= 5; ++d) {
    for (auto fam : {ConeFamily::interior, ConeFamily::boundary, ConeFamily::near_symmetric}) {
      for (std::uint64_t s = 0; s < 4; ++s) {
        const auto cone = random_parabola(d, derive_seed(17, s), fam);
        trace_err = std::max(trace_err, std::abs(cone.matrix().trace() - 1.0));
        psd_err = std::max(psd_err, -cone.lambda_min());
      }
    }
  }
  record("cone-trace", trace_err, kTraceTolerance);
  record("cone-psd", psd_err, kPsdTolerance);

  const std::vector<double> boundary2{1.0, 0.0};
  const auto tb = t_bar(ParabolaCone::from_spectrum(boundary2));
  record("t-bar-boundary", tb.infinite ? 1.0 : std::abs(tb.value - 1.0), 1e-14);
  record("t-bar-radial", t_bar(ParabolaCone::radial(3)).infinite ? 0.0 : 1.0, 0.0);

  double sym_err = 0.0;
  for (int d = 2; d <= 5; ++d) {
    for (int k = 1; k <= d; ++k) {
      const auto cone = SymmetricCone(d, k, random_rotation(d, derive_seed(5, 10 * d + k))).parabola();
      const auto m = nearest_symmetric(cone);
      sym_err = std::max(sym_err, m.distance + (m.k == k ? 0.0 : 1.0));
    }
  }
  record("nearest-symmetric", sym_err, 1e-12);

  double radial_q = 0.0;
  for (int d = 2; d <= 5; ++d) {
    radial_q = std::max(radial_q, std::abs(q_direct(ParabolaCone::radial(d), 1.0, build_rule(d, 8))));
  }
  record("radial-q1", radial_q, 1e-12);

  // gamma = 1 exact cones on a small grid: the 5-point Laplacian is exact on quadratics.
  const auto one = make_exponent(1.0);
  GridField f(2, 41);
  double res = 0.0;
  for (int k = 1; k <= 2; ++k) {
    const SymmetricCone pk(2, k);
    f.fill([&](const Vector& x) { return pk.value(x); });
    res = std::max(res, el_residual(f, one));
  }
  const HalfSpaceCone half(Vector::Unit(2, 0), 0.5);
  f.fill([&](const Vector& x) { return half.value(x); });
  res = std::max(res, el_residual(f, one));
  record("exact-cone-residual", res, 1e-10);
  return r;
}

// ---------------------------------------------------------------- inequality suite

RunReport cmd_verify_inequality(const VerifyOptions& o) {
  if (o.dim < 2 || o.dim > 5) throw UsageError("verify-inequality: dim must lie in 2..5");
  if (o.samples < 0) throw UsageError("verify-inequality: samples must be nonnegative");
  require_level(o.level);
  RunReport r;
  r.command = "verify-inequality";
  r.seed = o.seed;
  r.dim = o.dim;
  r.params = {{"samples", std::to_string(o.samples)},
              {"level", std::to_string(o.level)},
              {"family", to_string(o.family)}};
  r.columns = {"sample_id", "eigenvalues", "Q1", "quad_error", "margin", "nearest_k", "dist_to_SP", "anomaly"};

  const auto rules = RulePair::build(o.dim, o.level);
  std::vector<std::optional<InequalityVerdict>> verdicts(static_cast<std::size_t>(o.samples));
  parallel_for(o.samples, [&](int i) {
    const auto cone = random_parabola(o.dim, derive_seed(o.seed, static_cast<std::uint64_t>(i)), o.family);
    verdicts[static_cast<std::size_t>(i)] = verify_inequality(cone, rules);
  });
  for (int i = 0; i < o.samples; ++i) {
    const auto& v = *verdicts[static_cast<std::size_t>(i)];
    r.add_row({std::to_string(i), join_values(v.cone.eigenvalues()), format_double(v.q1),
               format_double(v.quad_error), format_double(v.margin), std::to_string(v.nearest_k),
               format_double(v.dist_to_sp), flag(v.anomaly)});
    r.check(!v.violates(), "sample " + std::to_string(i) + ": Q(1) below -10 quad_error");
    if (v.anomaly) {
      ++r.anomaly_count;
      r.failures.push_back("sample " + std::to_string(i) + ": equality classification anomaly");
    }
  }
  return r;
}

// ---------------------------------------------------------------- q curve

RunReport cmd_q_curve(const QCurveOptions& o) {
  require_level(o.level);
  if (o.t_points < 3) throw UsageError("q-curve: t-points must be at least 3");
  RunReport r;
  r.command = "q-curve";
  r.seed = o.seed;

  std::optional<ParabolaCone> cone;
  if (o.cone_spec) {
    const auto spec = parse_boundary(*o.cone_spec, o.cone_spec->rfind("parabola", 0) == 0 ? 0 : o.dim);
    if (spec.kind == BoundarySpec::Kind::flat || (spec.k == 0 && spec.kind == BoundarySpec::Kind::symmetric)) {
      throw UsageError("q-curve needs a parabola cone: parabola:l1,... or symmetric:k with k >= 1");
    }
    cone = reference_parabola(spec);
    r.params["cone"] = spec.text;
  } else {
    if (o.dim < 2 || o.dim > 5) throw UsageError("q-curve: dim must lie in 2..5");
    cone = random_parabola(o.dim, o.seed, o.family);
    r.params["family"] = to_string(o.family);
  }
  if (cone->dim() < 2 || cone->dim() > 5) throw UsageError("q-curve: dim must lie in 2..5");
  r.dim = cone->dim();
  r.params["level"] = std::to_string(o.level);
  r.params["t_points"] = std::to_string(o.t_points);
  r.params["eigenvalues"] = join_values(cone->eigenvalues());
  r.params["matrix"] = format_cone_matrix(*cone);
  r.columns = {"t", "Q_direct", "Q_expanded", "q", "q_dd_formula", "q_dd_finite_diff"};

  const auto rules = RulePair::build(r.dim, o.level);
  const auto curve = q_curve(*cone, rules, o.t_points);
  r.params["t_bar"] = format_extended(curve.t_bar);
  r.params["t_end"] = format_double(curve.t_end);
  r.params["q0"] = format_double(curve.q0);
  r.params["q_end"] = format_double(curve.q_end);
  for (const auto& p : curve.points) {
    r.add_row({format_double(p.t), format_double(p.q_direct), format_double(p.q_expanded), format_double(p.q),
               format_double(p.q_dd_formula), format_double(p.q_dd_finite_diff)});
  }
  const auto c = check_q_curve(curve);
  r.check(c.equivalence, "formula-equivalence");
  r.check(c.concavity, "concavity");
  r.check(c.finite_difference, "finite-difference");
  r.check(c.endpoints, "endpoint-signs");
  r.check(c.chord, "chord");
  if (!c.ok()) r.params["first_failure"] = c.first_failure;
  return r;
}

// ---------------------------------------------------------------- solver commands

namespace {

struct SolvedCase {
  Exponent exp;
  SolveResult result;
};

SolvedCase run_solver(int dim, double gamma, int n, const BoundarySpec& spec) {
  SolverConfig cfg;
  cfg.exponent = exponent_or_usage(gamma);
  return {cfg.exponent, minimize(dim, n, boundary_data(spec, cfg.exponent), cfg)};
}

void require_grid(int n) {
  if (n < 5 || n % 2 == 0) throw UsageError("n must be odd and at least 5");
}

}  // namespace

RunReport cmd_solve(const SolveOptions& o) {
  if (o.dim < 1 || o.dim > 3) throw UsageError("solve: dim must lie in 1..3");
  require_grid(o.n);
  const auto spec = parse_boundary(o.boundary, o.dim);
  exponent_or_usage(o.gamma);
  RunReport r;
  r.command = "solve";
  r.dim = o.dim;
  r.params = {{"gamma", format_double(o.gamma)}, {"n", std::to_string(o.n)}, {"boundary", spec.text}};
  r.columns = {"gamma", "n", "energy", "el_residual", "homogeneity_defect", "contact_fraction", "converged"};

  const auto s = run_solver(o.dim, o.gamma, o.n, spec);
  const auto& v = s.result.field;
  const auto g = boundary_data(spec, s.exp);
  double target = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v.active(i)) target = std::max(target, std::abs(v[i] - g(v.point(i))));
  }
  r.params["distance_to_data_extension"] = format_double(target);
  r.params["sweeps"] = std::to_string(s.result.total_sweeps);
  r.params["residual"] = format_double(s.result.residual);
  r.params["relaxation"] = format_double(s.result.relaxation);
  r.params["stages"] = std::to_string(s.result.stages.size());
  r.add_row({format_double(o.gamma), std::to_string(o.n), format_double(discrete_energy(v, s.exp)),
             format_double(el_residual(v, s.exp)), format_double(homogeneity_defect(v, s.exp.beta)),
             format_double(contact_fraction(v)), flag(s.result.converged)});
  r.unconverged = !s.result.converged;
  if (o.field_path) write_field(*o.field_path, v, o.gamma);
  return r;
}

RunReport cmd_concentrate(const ConcentrateOptions& o) {
  if (o.dim < 2 || o.dim > 3) throw UsageError("concentrate: dim must lie in 2..3");
  if (o.gammas.empty()) throw UsageError("concentrate: empty gamma list");
  require_grid(o.n);
  require_level(o.level);
  for (double g : o.gammas) {
    if (g == 1.0) throw UsageError("concentrate: gamma = 1 is not allowed (the transform degenerates)");
    exponent_or_usage(g);
  }
  const auto spec = parse_boundary(o.boundary, o.dim);
  RunReport r;
  r.command = "concentrate";
  r.dim = o.dim;
  std::vector<std::string> glist;
  for (double g : o.gammas) glist.push_back(format_double(g));
  r.params = {{"gammas", join(glist, ';')}, {"n", std::to_string(o.n)}, {"boundary", spec.text},
              {"level", std::to_string(o.level)}};
  r.columns = {"gamma", "beta", "dist_best", "k_best", "green_lhs", "green_rhs", "el_residual", "contact_fraction"};

  struct Row {
    double beta, dist, lhs, rhs, el, contact, qe;
    int k;
    bool converged;
  };
  const auto rules = RulePair::build(o.dim, o.level);
  const auto reference = reference_parabola(spec);
  const int count = static_cast<int>(o.gammas.size());
  std::vector<Row> rows(static_cast<std::size_t>(count));
  parallel_for(count, [&](int i) {
    const double gamma = o.gammas[static_cast<std::size_t>(i)];
    const auto s = run_solver(o.dim, gamma, o.n, spec);
    const auto u = transform_field(s.result.field, s.exp);
    const auto fit = nearest_symmetric_fit(u, (2.0 - gamma) / (2.0 * gamma));
    const auto green = green_identity_check(u, reference, s.exp, rules.coarse, rules.fine);
    rows[static_cast<std::size_t>(i)] = {s.exp.beta, fit.distance, green.lhs, green.rhs,
                                         el_residual(s.result.field, s.exp), contact_fraction(s.result.field),
                                         green.quad_error, fit.k, s.result.converged};
  });

  double worst_qe = 0.0;
  for (int i = 0; i < count; ++i) {
    const auto& w = rows[static_cast<std::size_t>(i)];
    r.add_row({glist[static_cast<std::size_t>(i)], format_double(w.beta), format_double(w.dist),
               std::to_string(w.k), format_double(w.lhs), format_double(w.rhs), format_double(w.el),
               format_double(w.contact)});
    r.unconverged = r.unconverged || !w.converged;
    worst_qe = std::max(worst_qe, w.qe);
  }
  r.params["green_quad_error"] = format_double(worst_qe);

  std::vector<int> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(o.gammas[static_cast<std::size_t>(a)] - 1.0) > std::abs(o.gammas[static_cast<std::size_t>(b)] - 1.0);
  });
  const double h = 2.0 / (o.n - 1);
  for (std::size_t j = 1; j < order.size(); ++j) {
    const auto& prev = rows[static_cast<std::size_t>(order[j - 1])];
    const auto& next = rows[static_cast<std::size_t>(order[j])];
    const double slack = 2.0 * (h + std::max(prev.qe, next.qe));
    r.check(next.dist <= prev.dist + slack, "dist_best non-increasing from gamma " +
                                                glist[static_cast<std::size_t>(order[j - 1])] + " to " +
                                                glist[static_cast<std::size_t>(order[j])]);
  }
  return r;
}

}  // namespace apcones
