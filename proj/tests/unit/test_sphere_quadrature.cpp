#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "apcones/sphere_quadrature.hpp"

#include <array>
#include <functional>
#include <numeric>
#include <cmath>
#include <numbers>
#include <random>

using namespace apcones;

namespace {

// int_{S^{d-1}} prod x_i^{a_i} for even a_i: 2 prod Gamma((a_i+1)/2) / Gamma((|a| + d)/2).
double monomial_moment(const std::vector<int>& a) {
  double log_num = 0.0;
  int total = 0;
  for (int ai : a) {
    if (ai % 2) return 0.0;
    log_num += std::lgamma((ai + 1) / 2.0);
    total += ai;
  }
  return 2.0 * std::exp(log_num - std::lgamma((total + static_cast<double>(a.size())) / 2.0));
}

// All exponent vectors of length d with total degree <= deg.
void for_each_monomial(int d, int deg, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> a(d, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == d) {
      f(a);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      a[i] = e;
      rec(i + 1, left - e);
    }
    a[i] = 0;
  };
  rec(0, deg);
}

}  // namespace

TEST_CASE("sphere area") {
  CHECK(sphere_area(1) == doctest::Approx(2.0));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi));
  CHECK(sphere_area(4) == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("rule: weights sum to the area and nodes lie on the sphere") {
  for (int d = 1; d <= 5; ++d) {
    for (int level : {4, 8, 16}) {
      const auto r = build_rule(d, level);
      CHECK(r.dim == d);
      CHECK(pairwise_sum(r.weights) == doctest::Approx(sphere_area(d)).epsilon(1e-13));
      for (std::size_t i = 0; i < r.size(); ++i) {
        double n2 = 0.0;
        for (double v : r.node(i)) n2 += v * v;
        CHECK(std::abs(n2 - 1.0) < 1e-14);
        CHECK(r.weights[i] > 0.0);
      }
    }
  }
}

TEST_CASE("rule: exactly antipodal") {
  for (int d = 2; d <= 5; ++d) {
    const auto r = build_rule(d, 4);
    // every node has its negation in the rule with the same weight
    for (std::size_t i = 0; i < r.size(); ++i) {
      bool found = false;
      for (std::size_t j = 0; j < r.size() && !found; ++j) {
        bool neg = r.weights[j] == r.weights[i];
        for (int a = 0; a < d && neg; ++a) neg = r.node(j)[a] == -r.node(i)[a];
        found = neg;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("rule: monomials up to the exactness degree") {
  for (int d = 2; d <= 5; ++d) {
    const auto r = build_rule(d, 8);
    REQUIRE(r.exactness_degree >= 7);
    for_each_monomial(d, std::min(r.exactness_degree, 10), [&](const std::vector<int>& a) {
      const double q = integrate(r, [&](auto x) {
        double v = 1.0;
        for (int i = 0; i < d; ++i) v *= std::pow(x[i], a[i]);
        return v;
      });
      const double exact = monomial_moment(a);
      if (std::accumulate(a.begin(), a.end(), 0) <= r.exactness_degree) {
        CHECK(std::abs(q - exact) <= 1e-13 * sphere_area(d));
      }
    });
  }
}

TEST_CASE("rule: smooth integrand against Monte Carlo") {
  // int exp(v.x) over S^2; Monte Carlo with 10^6 uniform points, 5 sigma band.
  const int d = 3;
  const auto r = build_rule(d, 32);
  const std::array<double, 3> v{0.7, -0.4, 1.1};
  auto f = [&](auto x) { return std::exp(v[0] * x[0] + v[1] * x[1] + v[2] * x[2]); };
  const double q = integrate(r, f);
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal;
  const int m = 1000000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < m; ++i) {
    std::array<double, 3> x{normal(rng), normal(rng), normal(rng)};
    const double n = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    for (auto& c : x) c /= n;
    const double fx = f(x);
    s += fx;
    s2 += fx * fx;
  }
  const double mean = s / m;
  const double sd = std::sqrt((s2 / m - mean * mean) / m);
  const double mc = 4.0 * std::numbers::pi * mean;
  CHECK(std::abs(q - mc) <= 5.0 * 4.0 * std::numbers::pi * sd);
  // closed form 4 pi sinh|v|/|v|
  const double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  CHECK(q == doctest::Approx(4.0 * std::numbers::pi * std::sinh(nv) / nv).epsilon(1e-13));
}

TEST_CASE("rule: errors") {
  CHECK_THROWS_AS(build_rule(0, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_rule(6, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_rule(3, 3), std::invalid_argument);
  const auto r = build_rule(2, 8);
  CHECK_THROWS_AS(integrate(r, [](auto) -> double { throw std::domain_error("x"); }), std::runtime_error);
}

TEST_CASE("Gauss-Gegenbauer: Legendre case and symmetry") {
  std::vector<double> x, w;
  gauss_gegenbauer(3, 0.0, x, w);
  REQUIRE(x.size() == 3);
  CHECK(x[0] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-15));
  CHECK(x[1] == 0.0);
  CHECK(w[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  gauss_gegenbauer(10, 0.5, x, w);
  for (int i = 0; i < 10; ++i) CHECK(x[i] == -x[9 - i]);
  // int (1-u^2)^(1/2) = pi/2, int u^2 (1-u^2)^(1/2) = pi/8
  double m0 = 0.0, m2 = 0.0;
  for (int i = 0; i < 10; ++i) {
    m0 += w[i];
    m2 += w[i] * x[i] * x[i];
  }
  CHECK(m0 == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
  CHECK(m2 == doctest::Approx(std::numbers::pi / 8).epsilon(1e-14));
}

TEST_CASE("Richardson estimate") {
  const auto lo = build_rule(2, 8);
  const auto hi = build_rule(2, 16);
  auto f = [](auto x) { return std::exp(3.0 * x[0]); };
  CHECK(richardson_error(lo, hi, f) >= 0.0);
  CHECK_THROWS_AS(richardson_error(hi, lo, f), std::invalid_argument);
  CHECK_THROWS_AS(richardson_error(lo, build_rule(3, 16), f), std::invalid_argument);
}

TEST_CASE("pairwise summation matches a long double reference") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(100003);
  long double ref = 0.0L;
  for (auto& x : v) {
    x = u(rng);
    ref += x;
  }
  CHECK(std::abs(pairwise_sum(v) - static_cast<double>(ref)) < 1e-12);
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("Wallis integrals") {
  CHECK(std::abs(wallis(0) - std::numbers::pi) <= 1e-15);
  CHECK(std::abs(wallis(1) - 2.0) <= 1e-15);
  CHECK(std::abs(wallis(2) - std::numbers::pi / 2) <= 1e-15);
  for (int m = 2; m <= 12; ++m) {
    CHECK(std::abs(wallis(m) - (m - 1.0) / m * wallis(m - 2)) <= 1e-14 * wallis(m));
  }
  // midpoint rule on cos^m over [-pi/2, pi/2]
  for (int m = 0; m <= 12; ++m) {
    const int k = 200000;
    double acc = 0.0;
    for (int i = 0; i < k; ++i) {
      const double t = -std::numbers::pi / 2 + (i + 0.5) * std::numbers::pi / k;
      acc += std::pow(std::cos(t), m);
    }
    CHECK(wallis(m) == doctest::Approx(acc * std::numbers::pi / k).epsilon(1e-9));
  }
}
