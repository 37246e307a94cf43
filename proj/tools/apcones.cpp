// apcones: command-line front end for the cone lab.
//
// CSV goes to --out (stdout if absent); the JSON summary goes next to it as
// <out>.summary.json, or to stderr. For `solve`, --out names the field dump
// and the one-row diagnostics CSV is printed on stdout.
//
// Exit status: 0 pass, 1 assertion failure, 2 usage error, 3 unconverged solve.

#include "apcones/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace apcones;

struct Flags {
  int dim = 0;  // 0: per-command default
  int samples = 100;
  int level = 0;  // 0: default_level(dim)
  std::uint64_t seed = 0;
  std::optional<double> gamma;
  std::vector<double> gammas;
  int n = 101;
  std::string boundary;
  std::string family = "interior";
  int t_points = kDefaultScanPoints;
  std::string out;
  bool corrupt_weight = false;
};

void writable_or_throw(const std::string& path) {
  if (path.empty()) return;
  std::ofstream probe(path, std::ios::app);
  if (!probe) throw UsageError("cannot write to '" + path + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

int emit(const RunReport& report, const Flags& f, bool csv_to_stdout) {
  if (csv_to_stdout || f.out.empty()) {
    std::cout << report.csv();
  } else {
    write_text(f.out, report.csv());
  }
  if (f.out.empty()) {
    std::cerr << report.summary_json();
  } else {
    write_text(f.out + ".summary.json", report.summary_json());
  }
  for (const auto& name : report.failures) std::cerr << "FAIL " << name << '\n';
  if (report.unconverged) std::cerr << "UNCONVERGED\n";
  return report.exit_status();
}

int run(const std::string& command, const Flags& f) {
  const int level_dim = f.dim == 0 ? 2 : f.dim;
  const int level = f.level == 0 ? default_level(level_dim) : f.level;
  if (command == "selftest") {
    return emit(cmd_selftest({f.corrupt_weight}), f, false);
  }
  if (command == "verify-inequality") {
    writable_or_throw(f.out);
    VerifyOptions o;
    o.dim = f.dim == 0 ? 3 : f.dim;
    o.samples = f.samples;
    o.level = f.level == 0 ? default_level(o.dim) : f.level;
    o.seed = f.seed;
    o.family = parse_family(f.family);
    return emit(cmd_verify_inequality(o), f, false);
  }
  if (command == "q-curve") {
    writable_or_throw(f.out);
    QCurveOptions o;
    o.dim = level_dim;
    if (!f.boundary.empty()) o.cone_spec = f.boundary;
    o.seed = f.seed;
    o.family = parse_family(f.family);
    o.level = level;
    o.t_points = f.t_points;
    return emit(cmd_q_curve(o), f, false);
  }
  if (command == "solve") {
    writable_or_throw(f.out);
    SolveOptions o;
    o.dim = f.dim == 0 ? 2 : f.dim;
    o.gamma = f.gamma.value_or(1.0);
    o.n = f.n;
    if (!f.boundary.empty()) o.boundary = f.boundary;
    if (!f.out.empty()) o.field_path = f.out;
    return emit(cmd_solve(o), f, true);
  }
  if (command == "concentrate") {
    writable_or_throw(f.out);
    ConcentrateOptions o;
    o.dim = f.dim == 0 ? 2 : f.dim;
    o.gammas = f.gammas;
    if (f.gamma) o.gammas.push_back(*f.gamma);
    o.n = f.n;
    if (!f.boundary.empty()) o.boundary = f.boundary;
    o.level = level;
    return emit(cmd_concentrate(o), f, false);
  }
  throw UsageError("unknown command " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for homogeneous solutions of the Alt-Phillips problem"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", f.out, "output path (default: CSV on stdout, summary on stderr)");
  };
  auto add_dim = [&](CLI::App* sub, const std::string& help) {
    sub->add_option("--dim", f.dim, help)->check(CLI::Range(1, 5));
  };
  auto add_level = [&](CLI::App* sub) {
    sub->add_option("--level", f.level, "fine sphere level, even; coarse is half (default 64, 16 for d=5)");
  };

  auto* selftest = app.add_subcommand("selftest", "quadrature, Wallis, cone and exact-cone residual checks");
  selftest->add_flag("--corrupt-weight", f.corrupt_weight, "scale one d=2 weight by 1.5 (fault injection)");
  add_common(selftest);

  auto* verify = app.add_subcommand("verify-inequality", "Q(1) >= 0 and equality classification on random cones");
  add_dim(verify, "dimension 2..5 (default 3)");
  verify->add_option("--samples", f.samples, "number of cones (default 100)")->check(CLI::NonNegativeNumber);
  add_level(verify);
  verify->add_option("--seed", f.seed, "base seed (default 0)");
  verify->add_option("--family", f.family, "interior | boundary | near_symmetric (default interior)");
  add_common(verify);

  auto* qcurve = app.add_subcommand("q-curve", "scan of q(t) = Q(t)/t^2 and q''(t) along the interpolation");
  add_dim(qcurve, "dimension 2..5 for random cones (default 2)");
  qcurve->add_option("--boundary", f.boundary, "cone: parabola:l1,l2,... or symmetric:k (default: random)");
  add_level(qcurve);
  qcurve->add_option("--seed", f.seed, "seed for a random cone (default 0)");
  qcurve->add_option("--family", f.family, "family for a random cone (default interior)");
  qcurve->add_option("--t-points", f.t_points, "scan points (default 33)");
  add_common(qcurve);

  auto* solve = app.add_subcommand("solve", "minimize the energy in the unit ball with cone boundary data");
  add_dim(solve, "dimension 1..3 (default 2)");
  solve->add_option("--gamma", f.gamma, "exponent in [0.5, 1.5] (default 1)");
  solve->add_option("--n", f.n, "grid points per axis, odd (default 101)");
  solve->add_option("--boundary", f.boundary,
                    "flat[:e1,...] | parabola:l1,... | symmetric:k (default symmetric:2)");
  solve->add_option("--out", f.out, "field dump path (diagnostics CSV goes to stdout)");

  auto* conc = app.add_subcommand("concentrate", "distance to the symmetric cones as gamma approaches 1");
  add_dim(conc, "dimension 2..3 (default 2)");
  auto* glist = conc->add_option("--gammas", f.gammas, "comma-separated exponents, none equal to 1")->delimiter(',');
  conc->add_option("--gamma", f.gamma, "a single exponent")->excludes(glist);
  conc->add_option("--n", f.n, "grid points per axis, odd (default 101)");
  conc->add_option("--boundary", f.boundary, "boundary data (default parabola:0.75,0.25)");
  add_level(conc);
  add_common(conc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto* sub = app.get_subcommands().front();
  try {
    return run(sub->get_name(), f);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    // parse_family and friends report bad names this way
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
