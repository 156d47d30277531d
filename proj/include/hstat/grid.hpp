/// @file grid.hpp
/// @brief Potentials u sampled on the uniform node grid of [-1, 1]^n and the
/// centered finite-difference machinery that realizes Du and D^2u.
#pragma once

#include "hstat/linalg.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hstat {

using ScalarFn = std::function<double(const Vec&)>;

/// Scalar potential on (N+1)^n nodes, row-major with axis 0 slowest.
/// Node i along an axis sits at -1 + i * (2/N).
class PotentialGrid {
 public:
  /// Nodes closer than this many layers to the cube boundary are clamped:
  /// the optimizer never moves them and test functions must vanish there.
  static constexpr int kClampedBand = 3;

  PotentialGrid() = default;
  PotentialGrid(int n, int N, std::vector<double> values, std::string description = {});

  static PotentialGrid sample(int n, int N, const ScalarFn& f, std::string description = {});
  static PotentialGrid zeros(int n, int N);

  int dim() const { return n_; }
  int cells() const { return N_; }
  double spacing() const { return 2.0 / N_; }
  std::size_t node_count() const { return values_.size(); }
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
  const std::string& description() const { return description_; }
  void set_description(std::string d) { description_ = std::move(d); }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::vector<int> multi_index(std::size_t node) const;
  std::size_t flat_index(const std::vector<int>& idx) const;
  Vec node_point(std::size_t node) const;
  /// Node nearest to x (clamped to the grid).
  std::size_t nearest_node(const Vec& x) const;

  /// min over axes of min(i, N - i)
  int band_distance(std::size_t node) const;
  bool clamped(std::size_t node) const { return band_distance(node) < kClampedBand; }

  PotentialGrid operator+(const PotentialGrid& o) const;
  PotentialGrid operator-(const PotentialGrid& o) const;
  PotentialGrid operator*(double s) const;
  double max_abs() const;

 private:
  int n_ = 0;
  int N_ = 0;
  std::vector<std::size_t> strides_;
  std::vector<double> values_;
  std::string description_;
};

/// One-dimensional difference operator as (offset, coefficient) pairs,
/// coefficients already divided by the appropriate power of the spacing.
using Stencil1D = std::vector<std::pair<int, double>>;

/// Centered first/second difference at index i of 0..N. With one_sided set,
/// the outermost indices 0 and N get second-order one-sided formulas;
/// otherwise they throw Stencil.
Stencil1D first_difference(int i, int N, double dx, bool one_sided = false);
Stencil1D second_difference(int i, int N, double dx, bool one_sided = false);

/// Centered gradient / Hessian at a node at least one layer inside the cube.
Vec gradient(const PotentialGrid& u, std::size_t node);
Mat hessian(const PotentialGrid& u, std::size_t node);

/// Du and D^2u at points of the cube by multilinear interpolation of the
/// nodal centered differences. Exact on quadratics.
struct Jet {
  Vec du;
  Mat d2u;
};

class DerivativeField {
 public:
  enum class Boundary {
    Centered,  // nodes 1..N-1 only
    OneSided,  // also the outermost layer, for volume over the full cube
  };

  DerivativeField(const PotentialGrid& u, Boundary mode = Boundary::Centered);

  int dim() const { return n_; }
  const PotentialGrid& grid() const { return *grid_; }
  bool available(std::size_t node) const;

  Vec grad(std::size_t node) const;
  Mat hess(std::size_t node) const;
  const double* grad_ptr(std::size_t node) const { return &grad_[node * static_cast<std::size_t>(n_)]; }
  const double* hess_ptr(std::size_t node) const {
    return &hess_[node * static_cast<std::size_t>(n_ * n_)];
  }

  /// Jet at x; throws Stencil if a corner of the containing cell lacks data.
  Jet at(const Vec& x) const;

 private:
  const PotentialGrid* grid_;
  int n_;
  Boundary mode_;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

/// Tensor-product cubic Lagrange interpolation (4 nodes per axis, shifted
/// inward at the cube boundary). Exact on polynomials of degree <= 3 per axis.
double interpolate_cubic(const PotentialGrid& u, const Vec& x);

/// v(y) = u(x0 + r y) / r^2 on the same grid; D^2v(y) = D^2u(x0 + r y).
/// Throws Domain if x0 + r [-1, 1]^n leaves the cube.
PotentialGrid rescale_potential(const PotentialGrid& u, const Vec& x0, double r);

/// Named analytic potentials used by tests and the CLI.
namespace potentials {
ScalarFn zero();
/// c |x|^2 / 2
ScalarFn paraboloid(double c);
/// x^T M x / 2
ScalarFn quadratic(const Mat& M);
/// a sin(x1) cos(x2) (a sin(x1) when n = 1)
ScalarFn sincos(double a);
/// Re (x1 + i x2)^3
ScalarFn cubic_harmonic();
/// |x|^4
ScalarFn quartic();
/// Sum of all monomials of total degree <= 3 with seeded coefficients in [-a, a].
ScalarFn random_cubic(int n, double a, unsigned long long seed);
}  // namespace potentials

}  // namespace hstat
