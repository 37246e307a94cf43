#include "apcones/cone_algebra.hpp"
#include "apcones/experiments.hpp"
#include "apcones/inequality_lab.hpp"
#include "apcones/sphere_quadrature.hpp"
#include "apcones/variational_solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

namespace py = pybind11;
using namespace apcones;

namespace {

double to_float(const ExtendedReal& v) {
  return v.infinite ? std::numeric_limits<double>::infinity() : v.value;
}

RulePair rules_for(int dim, std::optional<int> level) {
  return RulePair::build(dim, level.value_or(default_level(dim)));
}

py::dict report_dict(const RunReport& r) {
  py::dict d;
  d["command"] = r.command;
  d["seed"] = r.seed;
  d["dim"] = r.dim;
  d["params"] = r.params;
  d["columns"] = r.columns;
  d["rows"] = r.rows;
  d["pass_count"] = r.pass_count;
  d["fail_count"] = r.fail_count;
  d["anomaly_count"] = r.anomaly_count;
  d["unconverged"] = r.unconverged;
  d["failures"] = r.failures;
  d["exit_status"] = r.exit_status();
  d["csv"] = r.csv();
  d["summary_json"] = r.summary_json();
  return d;
}

}  // namespace

PYBIND11_MODULE(_apcones, m) {
  m.doc() = "Cone algebra, sphere quadrature, the Q(1) inequality and the discrete variational solver";
  m.attr("__version__") = "0.1.0";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  py::class_<Exponent>(m, "Exponent")
      .def_readonly("gamma", &Exponent::gamma)
      .def_readonly("beta", &Exponent::beta)
      .def_readonly("c_gamma", &Exponent::c_gamma)
      .def("__repr__", [](const Exponent& e) {
        return "Exponent(gamma=" + format_double(e.gamma) + ", beta=" + format_double(e.beta) + ")";
      });
  m.def("make_exponent", &make_exponent, py::arg("gamma"));

  py::class_<ParabolaCone>(m, "ParabolaCone")
      .def(py::init<Matrix>(), py::arg("matrix"))
      .def_static(
          "from_spectrum",
          [](const std::vector<double>& eig, std::optional<Matrix> rotation) {
            return ParabolaCone::from_spectrum(eig, rotation);
          },
          py::arg("eigenvalues"), py::arg("rotation") = py::none())
      .def_static("radial", &ParabolaCone::radial, py::arg("dim"))
      .def_property_readonly("dim", &ParabolaCone::dim)
      .def_property_readonly("matrix", &ParabolaCone::matrix)
      .def_property_readonly("eigenvalues", &ParabolaCone::eigenvalues)
      .def_property_readonly("eigenvectors", &ParabolaCone::eigenvectors)
      .def("value", &ParabolaCone::value, py::arg("x"))
      .def("gradient", &ParabolaCone::gradient, py::arg("x"));

  m.def("symmetric_cone", [](int dim, int k) { return SymmetricCone(dim, k).parabola(); }, py::arg("dim"),
        py::arg("k"), "P_k as a parabola cone (k >= 1)");
  m.def("t_bar", [](const ParabolaCone& c) { return to_float(t_bar(c)); }, py::arg("cone"));
  m.def(
      "nearest_symmetric",
      [](const ParabolaCone& c) {
        const auto s = nearest_symmetric(c);
        return py::make_tuple(s.k, s.distance);
      },
      py::arg("cone"));
  m.def("linf_distance", &linf_distance_quadratics, py::arg("a"), py::arg("b"));

  m.def("sphere_area", &sphere_area, py::arg("dim"));
  m.def("wallis", &wallis, py::arg("m"));
  m.def(
      "sphere_rule",
      [](int dim, int level) {
        const auto rule = build_rule(dim, level);
        py::array_t<double> nodes({static_cast<py::ssize_t>(rule.size()), static_cast<py::ssize_t>(dim)});
        std::copy(rule.nodes.begin(), rule.nodes.end(), nodes.mutable_data());
        py::array_t<double> weights(static_cast<py::ssize_t>(rule.size()));
        std::copy(rule.weights.begin(), rule.weights.end(), weights.mutable_data());
        return py::make_tuple(nodes, weights);
      },
      py::arg("dim"), py::arg("level"), "Nodes (N x d) and weights of the product rule on S^{d-1}");

  m.def(
      "q_value_at",
      [](const ParabolaCone& c, double t, std::optional<int> level) {
        const auto r = q_report(c, t, rules_for(c.dim(), level));
        py::dict d;
        d["t"] = r.t;
        d["Q_direct"] = r.q_direct;
        d["Q_expanded"] = r.q_expanded;
        d["quad_error"] = r.quad_error;
        return d;
      },
      py::arg("cone"), py::arg("t") = 1.0, py::arg("level") = py::none());

  m.def(
      "verify_inequality",
      [](const ParabolaCone& c, std::optional<int> level) {
        const auto v = verify_inequality(c, rules_for(c.dim(), level));
        py::dict d;
        d["Q1"] = v.q1;
        d["quad_error"] = v.quad_error;
        d["margin"] = v.margin;
        d["is_equality_case"] = v.is_equality_case;
        d["nearest_k"] = v.nearest_k;
        d["dist_to_SP"] = v.dist_to_sp;
        d["anomaly"] = v.anomaly;
        d["violates"] = v.violates();
        return d;
      },
      py::arg("cone"), py::arg("level") = py::none());

  m.def(
      "q_curve",
      [](const ParabolaCone& c, std::optional<int> level, int t_points) {
        const auto curve = q_curve(c, rules_for(c.dim(), level), t_points);
        py::dict d;
        d["t_bar"] = to_float(curve.t_bar);
        d["t_end"] = curve.t_end;
        d["q0"] = curve.q0;
        d["q_end"] = curve.q_end;
        std::vector<double> t, qd, qe, q, dd, fd;
        for (const auto& p : curve.points) {
          t.push_back(p.t);
          qd.push_back(p.q_direct);
          qe.push_back(p.q_expanded);
          q.push_back(p.q);
          dd.push_back(p.q_dd_formula);
          fd.push_back(p.q_dd_finite_diff);
        }
        d["t"] = py::array(py::cast(t));
        d["Q_direct"] = py::array(py::cast(qd));
        d["Q_expanded"] = py::array(py::cast(qe));
        d["q"] = py::array(py::cast(q));
        d["q_dd_formula"] = py::array(py::cast(dd));
        d["q_dd_finite_diff"] = py::array(py::cast(fd));
        d["checks_ok"] = check_q_curve(curve).ok();
        return d;
      },
      py::arg("cone"), py::arg("level") = py::none(), py::arg("t_points") = kDefaultScanPoints);

  m.def("dimension_reduction_constant", &dimension_reduction_constant, py::arg("d"));
  m.def(
      "dimension_reduction",
      [](const ParabolaCone& q, std::optional<int> level) {
        const int d = q.dim() + 1;
        const auto r = dimension_reduction_check(q, rules_for(d, level), rules_for(d - 1, level));
        py::dict out;
        out["alpha_measured"] = r.alpha_measured ? py::cast(*r.alpha_measured) : py::none();
        out["alpha_predicted"] = r.alpha_predicted;
        out["numerator"] = r.numerator;
        out["denominator"] = r.denominator;
        return out;
      },
      py::arg("q"), py::arg("level") = py::none(), "Q(1) of q lifted by a kernel direction over Q(1) of q");

  m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("index"));
  m.def(
      "random_parabola",
      [](int dim, std::uint64_t seed, const std::string& family, std::optional<int> rank) {
        return random_parabola(dim, seed, parse_family(family), rank);
      },
      py::arg("dim"), py::arg("seed"), py::arg("family") = "interior", py::arg("rank") = py::none());

  m.def(
      "solve",
      [](int dim, double gamma, int n, const std::string& boundary) {
        const auto exp = make_exponent(gamma);
        const auto spec = parse_boundary(boundary, dim);
        SolverConfig config;
        config.exponent = exp;
        const auto r = minimize(dim, n, boundary_data(spec, exp), config);
        std::vector<py::ssize_t> shape(static_cast<std::size_t>(dim), n);
        py::array_t<double> field(shape);
        const auto& f = r.field;
        for (std::size_t i = 0; i < f.size(); ++i) field.mutable_data()[i] = f[i];
        py::dict d;
        d["field"] = field;
        d["energy"] = discrete_energy(f, exp);
        d["el_residual"] = el_residual(f, exp);
        d["homogeneity_defect"] = homogeneity_defect(f, exp.beta);
        d["contact_fraction"] = contact_fraction(f);
        d["converged"] = r.converged;
        return d;
      },
      py::arg("dim"), py::arg("gamma"), py::arg("n"), py::arg("boundary") = "symmetric:2",
      "Minimize the discrete energy on {-1..1}^dim; field axis 0 is x_1");

  m.def(
      "run_selftest", [](bool corrupt) { return report_dict(cmd_selftest({corrupt})); },
      py::arg("corrupt_weight") = false);
  m.def(
      "run_verify_inequality",
      [](int dim, int samples, std::uint64_t seed, const std::string& family, std::optional<int> level) {
        VerifyOptions o;
        o.dim = dim;
        o.samples = samples;
        o.seed = seed;
        o.family = parse_family(family);
        o.level = level.value_or(default_level(dim));
        return report_dict(cmd_verify_inequality(o));
      },
      py::arg("dim") = 3, py::arg("samples") = 100, py::arg("seed") = 0, py::arg("family") = "interior",
      py::arg("level") = py::none());
  m.def(
      "run_q_curve",
      [](std::optional<std::string> cone, int dim, std::uint64_t seed, std::optional<int> level) {
        QCurveOptions o;
        o.cone_spec = cone;
        o.dim = dim;
        o.seed = seed;
        o.level = level.value_or(default_level(dim));
        return report_dict(cmd_q_curve(o));
      },
      py::arg("cone") = py::none(), py::arg("dim") = 2, py::arg("seed") = 0, py::arg("level") = py::none());
  m.def(
      "run_solve",
      [](int dim, double gamma, int n, const std::string& boundary) {
        SolveOptions o;
        o.dim = dim;
        o.gamma = gamma;
        o.n = n;
        o.boundary = boundary;
        return report_dict(cmd_solve(o));
      },
      py::arg("dim") = 2, py::arg("gamma") = 1.0, py::arg("n") = 101, py::arg("boundary") = "symmetric:2");
  m.def(
      "run_concentrate",
      [](const std::vector<double>& gammas, int n, const std::string& boundary, int level) {
        ConcentrateOptions o;
        o.gammas = gammas;
        o.n = n;
        o.boundary = boundary;
        o.level = level;
        return report_dict(cmd_concentrate(o));
      },
      py::arg("gammas"), py::arg("n") = 101, py::arg("boundary") = "parabola:0.75,0.25", py::arg("level") = 64);
}
