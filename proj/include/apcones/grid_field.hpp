#pragma once

// Nonnegative fields on the lattice {-1, -1+h, ..., 1}^d, d <= 3, n odd.
//
// Nodes in the open unit ball whose full (2d+1)-point stencil stays in the
// ball are interior; other nodes in the ball are dirichlet; everything else is
// exterior and holds 0. Storage is row-major with axis 0 slowest.

#include "apcones/cone_algebra.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace apcones {

enum class NodeKind : std::uint8_t { interior, dirichlet, exterior };

class GridField {
 public:
  /// Zero field. Throws std::invalid_argument unless 1 <= dim <= 3 and n is odd and >= 5.
  GridField(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  NodeKind kind(std::size_t i) const { return mask_[i]; }
  bool active(std::size_t i) const { return mask_[i] != NodeKind::exterior; }
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
  std::size_t origin() const;

  /// Integer offsets from the centre node along each axis.
  std::array<int, 3> offsets(std::size_t i) const;
  Vector point(std::size_t i) const;

  /// Interior nodes only: the (2d+1)-point Laplacian.
  double laplacian(std::size_t i) const;
  /// Central differences where both neighbours are active, one-sided otherwise.
  Vector gradient(std::size_t i) const;

  /// Multilinear interpolation; throws if a cell corner is exterior or the
  /// point leaves the lattice.
  double interpolate(const Vector& x) const;

  /// Sets every active node to g(x); exterior nodes stay 0.
  template <class F>
  void fill(F&& g) {
    for (std::size_t i = 0; i < size(); ++i) {
      if (active(i)) values_[i] = g(point(i));
    }
  }

  template <class F>
  static GridField sample(int dim, int n, F&& g) {
    GridField f(dim, n);
    f.fill(std::forward<F>(g));
    return f;
  }

  std::size_t count(NodeKind kind) const;

 private:
  int dim_;
  int n_;
  double h_;
  std::array<std::size_t, 3> strides_{};
  std::vector<double> values_;
  std::vector<NodeKind> mask_;
};

/// Header `dim n h gamma`, then one value per line in row-major order, all
/// numbers printed with 17 significant digits.
void write_field(std::ostream& out, const GridField& field, double gamma);
void write_field(const std::string& path, const GridField& field, double gamma);

struct FieldDump {
  GridField field;
  double gamma;
};

FieldDump read_field(std::istream& in);
FieldDump read_field(const std::string& path);

}  // namespace apcones
