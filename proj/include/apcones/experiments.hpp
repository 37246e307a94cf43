#pragma once

// Batch experiments behind the command-line tool. Each command returns a
// RunReport; the tool decides where the CSV body and the JSON summary go.
//
// CSV conventions: comma separator, header row first, floats printed with 17
// significant digits, booleans as 0/1, eigenvalue lists joined with ';', an
// infinite t_bar written as the literal `inf`.

#include "apcones/cone_algebra.hpp"
#include "apcones/inequality_lab.hpp"
#include "apcones/variational_solver.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace apcones {

/// Thrown for malformed user input; the tool maps it to exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum ExitStatus : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2, kExitUnconverged = 3 };

std::string format_double(double v);
std::string format_extended(const ExtendedReal& v);

struct RunReport {
  std::string command;
  std::uint64_t seed = 0;
  int dim = 0;
  std::map<std::string, std::string> params;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  int pass_count = 0;
  int fail_count = 0;
  int anomaly_count = 0;
  bool unconverged = false;
  std::vector<std::string> failures;  // names of failed checks, in order

  void add_row(std::vector<std::string> cells);
  void check(bool ok, const std::string& name);

  std::string csv() const;
  std::string summary_json() const;
  int exit_status() const;
};

/// Boundary data for the solver: `flat[:e1,e2,...]`, `parabola:l1,l2,...`
/// (parentheses optional) or `symmetric:k`.
struct BoundarySpec {
  enum class Kind { flat, parabola, symmetric };
  Kind kind = Kind::symmetric;
  int dim = 0;
  Vector direction;                 // flat: unit normal
  std::vector<double> eigenvalues;  // parabola: diagonal spectrum
  int k = 0;                        // symmetric
  std::string text;
};

/// Throws UsageError; for parabola data the message reports the trace deviation.
/// dim = 0 takes the dimension from a parabola eigenvalue list.
BoundarySpec parse_boundary(const std::string& text, int dim);

/// Comma-separated nonnegative eigenvalues summing to one within 1e-12,
/// optionally in parentheses.
std::vector<double> parse_eigenvalues(const std::string& text);

/// Row-major upper triangle of A, entries joined with ';'.
std::string format_cone_matrix(const ParabolaCone& cone);

/// The 2-homogeneous target U: p for parabola data, P_k for symmetric data
/// (k = 0 is the flat form) and ((2 - gamma)/(2 gamma)) [(x.e)_+]^2 for flat data.
double boundary_target(const BoundarySpec& spec, const Exponent& exp, const Vector& x);

/// Solver data g = (gamma (2 - gamma) U)^(beta/2); flat data gives c_gamma [(x.e)_+]^beta.
BoundaryData boundary_data(const BoundarySpec& spec, const Exponent& exp);

/// The parabola cone paired with the data in the Green identity; for flat
/// data and P_0 this is P_1 along the normal.
ParabolaCone reference_parabola(const BoundarySpec& spec);

struct SelftestOptions {
  /// Corrupts one weight of the d = 2 rule before the checks run.
  bool corrupt_weight = false;
};

struct VerifyOptions {
  int dim = 3;
  int samples = 100;
  int level = 64;
  std::uint64_t seed = 0;
  ConeFamily family = ConeFamily::interior;
};

struct QCurveOptions {
  int dim = 2;  // ignored when cone_spec lists eigenvalues
  /// `parabola:l1,...` or `symmetric:k` (k >= 1); otherwise drawn from seed/family.
  std::optional<std::string> cone_spec;
  std::uint64_t seed = 0;
  ConeFamily family = ConeFamily::interior;
  int level = 64;
  int t_points = kDefaultScanPoints;
};

struct SolveOptions {
  int dim = 2;
  double gamma = 1.0;
  int n = 101;
  std::string boundary = "symmetric:2";
  std::optional<std::string> field_path;
};

struct ConcentrateOptions {
  int dim = 2;
  std::vector<double> gammas;
  int n = 101;
  std::string boundary = "parabola:0.75,0.25";
  int level = 64;
};

RunReport cmd_selftest(const SelftestOptions& options = {});
RunReport cmd_verify_inequality(const VerifyOptions& options);
RunReport cmd_q_curve(const QCurveOptions& options);
RunReport cmd_solve(const SolveOptions& options);
RunReport cmd_concentrate(const ConcentrateOptions& options);

/// Default sphere level for quadrature commands: 64 for d <= 4, 16 for d = 5.
int default_level(int dim);

}  // namespace apcones
