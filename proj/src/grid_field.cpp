#include "apcones/grid_field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace apcones {

GridField::GridField(int dim, int n) : dim_(dim), n_(n) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid field: dim must be 1, 2 or 3");
  if (n < 5 || n % 2 == 0) throw std::invalid_argument("grid field: n must be odd and at least 5");
  h_ = 2.0 / (n - 1);
  std::size_t total = 1;
  for (int a = dim - 1; a >= 0; --a) {
    strides_[static_cast<std::size_t>(a)] = total;
    total *= static_cast<std::size_t>(n);
  }
  values_.assign(total, 0.0);
  mask_.assign(total, NodeKind::exterior);

  const long c = (n - 1) / 2;
  const long c2 = c * c;
  auto radius2 = [&](const std::array<int, 3>& k) {
    long r = 0;
    for (int a = 0; a < dim; ++a) r += static_cast<long>(k[a]) * k[a];
    return r;
  };
  for (std::size_t i = 0; i < total; ++i) {
    auto k = offsets(i);
    const long r2 = radius2(k);
    if (r2 >= c2) continue;
    bool full = true;
    for (int a = 0; a < dim && full; ++a) {
      for (int s : {-1, 1}) {
        auto kn = k;
        kn[a] += s;
        if (radius2(kn) >= c2) full = false;
      }
    }
    mask_[i] = full ? NodeKind::interior : NodeKind::dirichlet;
  }
}

std::size_t GridField::origin() const {
  std::size_t idx = 0;
  const std::size_t c = static_cast<std::size_t>((n_ - 1) / 2);
  for (int a = 0; a < dim_; ++a) idx += c * stride(a);
  return idx;
}

std::array<int, 3> GridField::offsets(std::size_t i) const {
  std::array<int, 3> k{0, 0, 0};
  const int c = (n_ - 1) / 2;
  for (int a = 0; a < dim_; ++a) {
    const std::size_t s = stride(a);
    k[a] = static_cast<int>(i / s) - c;
    i %= s;
  }
  return k;
}

Vector GridField::point(std::size_t i) const {
  const auto k = offsets(i);
  Vector x(dim_);
  for (int a = 0; a < dim_; ++a) x(a) = k[a] * h_;
  return x;
}

double GridField::laplacian(std::size_t i) const {
  double sum = -2.0 * dim_ * values_[i];
  for (int a = 0; a < dim_; ++a) sum += values_[i - stride(a)] + values_[i + stride(a)];
  return sum / (h_ * h_);
}

Vector GridField::gradient(std::size_t i) const {
  Vector g = Vector::Zero(dim_);
  const auto k = offsets(i);
  const int c = (n_ - 1) / 2;
  for (int a = 0; a < dim_; ++a) {
    const std::size_t s = stride(a);
    const bool has_minus = k[a] > -c && active(i - s);
    const bool has_plus = k[a] < c && active(i + s);
    if (has_minus && has_plus) {
      g(a) = (values_[i + s] - values_[i - s]) / (2.0 * h_);
    } else if (has_plus) {
      g(a) = (values_[i + s] - values_[i]) / h_;
    } else if (has_minus) {
      g(a) = (values_[i] - values_[i - s]) / h_;
    }
  }
  return g;
}

double GridField::interpolate(const Vector& x) const {
  if (x.size() != dim_) throw std::invalid_argument("interpolate: dimension mismatch");
  std::array<std::size_t, 3> base{};
  std::array<double, 3> frac{};
  for (int a = 0; a < dim_; ++a) {
    const double s = (x(a) + 1.0) / h_;
    if (s < 0.0 || s > n_ - 1) throw std::out_of_range("interpolate: point outside the lattice");
    auto b = static_cast<std::size_t>(std::floor(s));
    if (b >= static_cast<std::size_t>(n_ - 1)) b = static_cast<std::size_t>(n_ - 2);
    base[a] = b;
    frac[a] = s - static_cast<double>(b);
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << dim_); ++corner) {
    std::size_t idx = 0;
    double w = 1.0;
    for (int a = 0; a < dim_; ++a) {
      const int bit = (corner >> a) & 1;
      idx += (base[a] + static_cast<std::size_t>(bit)) * stride(a);
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (w == 0.0) continue;
    if (!active(idx)) throw std::out_of_range("interpolate: cell touches exterior nodes");
    acc += w * values_[idx];
  }
  return acc;
}

std::size_t GridField::count(NodeKind kind) const {
  std::size_t c = 0;
  for (auto m : mask_) c += (m == kind);
  return c;
}

void write_field(std::ostream& out, const GridField& field, double gamma) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", field.h());
  out << field.dim() << ' ' << field.n() << ' ' << buf << ' ';
  std::snprintf(buf, sizeof buf, "%.17g", gamma);
  out << buf << '\n';
  for (double v : field.values()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
  }
}

void write_field(const std::string& path, const GridField& field, double gamma) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_field(out, field, gamma);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

FieldDump read_field(std::istream& in) {
  int dim = 0;
  int n = 0;
  double h = 0.0;
  double gamma = 0.0;
  if (!(in >> dim >> n >> h >> gamma)) throw std::runtime_error("field dump: malformed header");
  GridField field(dim, n);
  if (std::abs(h - field.h()) > 1e-15) throw std::runtime_error("field dump: spacing inconsistent with n");
  for (std::size_t i = 0; i < field.size(); ++i) {
    std::string token;
    if (!(in >> token)) throw std::runtime_error("field dump: truncated");
    field[i] = std::strtod(token.c_str(), nullptr);
  }
  return {std::move(field), gamma};
}

FieldDump read_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_field(in);
}

}  // namespace apcones
