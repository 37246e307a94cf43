#include "apcones/sphere_quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numbers>

namespace apcones {

double sphere_area(int dim) {
  if (dim < 1) throw std::invalid_argument("sphere_area: dimension must be positive");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 64;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  // Split on a block boundary so the tree shape depends only on the length.
  const std::size_t blocks = (values.size() + kBlock - 1) / kBlock;
  const std::size_t half = (blocks / 2) * kBlock;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void gauss_gegenbauer(int count, double alpha, std::vector<double>& nodes,
                      std::vector<double>& weights) {
  if (count < 1) throw std::invalid_argument("gauss_gegenbauer: need at least one node");
  if (!(alpha > -1.0)) throw std::invalid_argument("gauss_gegenbauer: alpha must exceed -1");
  // Golub-Welsch on the symmetric Jacobi matrix of the monic Gegenbauer family.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(count);
  Eigen::VectorXd sub(std::max(count - 1, 0));
  for (int k = 1; k < count; ++k) {
    const double kk = k;
    const double s = kk + alpha;
    sub(k - 1) = std::sqrt(kk * (kk + 2.0 * alpha) / (4.0 * s * s - 1.0));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("gauss_gegenbauer: eigensolver failed");
  const double mass = std::sqrt(std::numbers::pi) * std::tgamma(alpha + 1.0) / std::tgamma(alpha + 1.5);

  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  for (int i = 0; i < count; ++i) {
    nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    weights[i] = mass * v0 * v0;
  }
  // Symmetrise: mirror the negative half, average paired weights.
  for (int i = 0; i < count / 2; ++i) {
    const int j = count - 1 - i;
    const double x = 0.5 * (nodes[j] - nodes[i]);
    const double w = 0.5 * (weights[i] + weights[j]);
    nodes[i] = -x;
    nodes[j] = x;
    weights[i] = w;
    weights[j] = w;
  }
  if (count % 2 == 1) nodes[count / 2] = 0.0;
}

namespace {

SphereRule circle_rule(int level) {
  SphereRule rule;
  rule.dim = 2;
  rule.level = level;
  const int count = 4 * level;
  rule.exactness_degree = count - 1;
  rule.nodes.resize(2 * static_cast<std::size_t>(count));
  rule.weights.assign(count, 2.0 * std::numbers::pi / count);
  const int half = count / 2;
  for (int j = 0; j < half; ++j) {
    const double phi = 2.0 * std::numbers::pi * (j + 0.5) / count;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    rule.nodes[2 * j] = c;
    rule.nodes[2 * j + 1] = s;
    rule.nodes[2 * (j + half)] = -c;
    rule.nodes[2 * (j + half) + 1] = -s;
  }
  return rule;
}

SphereRule lift_rule(const SphereRule& sub, int level) {
  const int d = sub.dim + 1;
  std::vector<double> polar_nodes;
  std::vector<double> polar_weights;
  gauss_gegenbauer(level, 0.5 * (d - 3), polar_nodes, polar_weights);

  SphereRule rule;
  rule.dim = d;
  rule.level = level;
  rule.exactness_degree = std::min(2 * level - 1, sub.exactness_degree);
  const std::size_t m = sub.size();
  rule.nodes.reserve(polar_nodes.size() * m * d);
  rule.weights.reserve(polar_nodes.size() * m);
  for (std::size_t a = 0; a < polar_nodes.size(); ++a) {
    const double u = polar_nodes[a];
    const double r = std::sqrt((1.0 - u) * (1.0 + u));
    for (std::size_t b = 0; b < m; ++b) {
      const auto y = sub.node(b);
      for (double yi : y) rule.nodes.push_back(r * yi);
      rule.nodes.push_back(u);
      rule.weights.push_back(polar_weights[a] * sub.weights[b]);
    }
  }
  return rule;
}

}  // namespace

SphereRule build_rule(int dim, int level) {
  if (dim < kMinSphereDim || dim > kMaxSphereDim) {
    std::ostringstream msg;
    msg << "build_rule: unsupported dimension " << dim << " (supported: " << kMinSphereDim
        << ".." << kMaxSphereDim << ")";
    throw std::invalid_argument(msg.str());
  }
  if (level < 4) throw std::invalid_argument("build_rule: level must be at least 4");
  if (dim == 1) {
    SphereRule rule;
    rule.dim = 1;
    rule.level = level;
    rule.exactness_degree = 4 * level - 1;
    rule.nodes = {-1.0, 1.0};
    rule.weights = {1.0, 1.0};
    return rule;
  }
  SphereRule rule = circle_rule(level);
  for (int d = 3; d <= dim; ++d) rule = lift_rule(rule, level);
  return rule;
}

double wallis(int m) {
  if (m < 0) throw std::invalid_argument("wallis: order must be nonnegative");
  double w = (m % 2 == 0) ? std::numbers::pi : 2.0;
  for (int j = (m % 2 == 0) ? 2 : 3; j <= m; j += 2) w *= static_cast<double>(j - 1) / j;
  return w;
}

}  // namespace apcones
