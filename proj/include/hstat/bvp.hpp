/// @file bvp.hpp
/// @brief Constant-coefficient clamped problem
///
///   int c0^{ij,kl} w_ik phi_jl dx = 0 for all phi in H^2_0,
///   w = g and Dw = Dg on the boundary,
///
/// solved with C^1 tensor-product cubic Hermite elements on the grid cells.
/// Each node carries 2^n degrees of freedom d^s w for the subsets s of the
/// axes (value, first derivatives, mixed derivatives).
#pragma once

#include "hstat/grid.hpp"
#include "hstat/linalg.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hstat {

struct ConstantTensor {
  Tensor4 c0;
  double lambda = 0.0;  // declared Legendre constant

  /// c0 with Legendre constant measured from the form.
  static ConstantTensor from(const Tensor4& c0);
  /// delta^{ik} delta^{jl}; energy density (Laplacian)^2, Legendre constant 1.
  static ConstantTensor biharmonic(int n);
};

/// Hermite degrees of freedom on the (N+1)^n nodes of [-1, 1]^n.
/// dofs[node * 2^n + s] = d^s w(node), bit d of s selecting d/dx_d.
class HermiteField {
 public:
  /// Degree-of-freedom provider: the mixed derivative d^s g at x.
  using DofFn = std::function<double(const Vec& x, unsigned subset)>;

  HermiteField() = default;
  HermiteField(int n, int N);

  static HermiteField from_function(int n, int N, const DofFn& g);
  /// Derivatives from 5-point difference formulas along each axis in s,
  /// shifted inward near the cube boundary; exact on polynomials of degree
  /// <= 4 in each variable.
  static HermiteField from_grid(const PotentialGrid& g);

  int dim() const { return n_; }
  int cells() const { return N_; }
  double spacing() const { return 2.0 / N_; }
  std::size_t node_count() const { return layout_.node_count(); }
  unsigned subsets() const { return 1u << n_; }
  const PotentialGrid& layout() const { return layout_; }

  double& dof(std::size_t node, unsigned s) { return dofs_[node * subsets() + s]; }
  double dof(std::size_t node, unsigned s) const { return dofs_[node * subsets() + s]; }
  std::vector<double>& dofs() { return dofs_; }
  const std::vector<double>& dofs() const { return dofs_; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  /// Nodal values as a potential grid.
  PotentialGrid values() const;

  HermiteField operator-(const HermiteField& o) const;

 private:
  void locate(const Vec& x, std::vector<int>& cell, Vec& xi) const;

  int n_ = 0;
  int N_ = 0;
  PotentialGrid layout_;
  std::vector<double> dofs_;
};

enum class BvpSolver { Direct, Iterative };

struct BvpOptions {
  BvpSolver solver = BvpSolver::Direct;
  double tolerance = 1e-12;          // iterative relative residual
  int max_iterations = 20000;
  std::optional<HermiteField> initial_guess;
  /// Extra nodes whose dofs are clamped to the boundary data, e.g. the
  /// complement of an inscribed ball.
  std::function<bool(const Vec& x)> clamp_node;
};

struct BvpSolution {
  HermiteField w;
  PotentialGrid values;
  double energy = 0.0;         // <w - g, w - g>
  std::size_t free_dofs = 0;
  int iterations = 0;          // 0 for the direct solve
  double relative_residual = 0.0;
  std::string solver;
};

/// Solves on the cube [-r, r]^n, r a multiple of the grid spacing. Outside
/// the cube w equals the data.
BvpSolution solve_bvp(const ConstantTensor& c0, const HermiteField& g, double r, const BvpOptions& opts = {});
BvpSolution solve_bvp(const ConstantTensor& c0, const PotentialGrid& g, double r, const BvpOptions& opts = {});

struct BallBvpOptions {
  /// Multiplier arcs are about this many grid spacings long.
  double arc_spacings = 2.0;
};

/// Clamped problem on the ball B_radius(center) inside the cube. Cells cut
/// by the sphere are integrated over their part inside the ball, and the
/// conditions w = g, d_nu w = d_nu g are imposed through multipliers that
/// are piecewise constant on arcs of the circle (n = 2 only). Nodes whose
/// cells miss the ball keep the data values.
BvpSolution solve_bvp_ball(const ConstantTensor& c0, const HermiteField& g, const Vec& center, double radius,
                           const BallBvpOptions& opts = {});

/// int c0^{ij,kl} v_ik v_jl over the whole cube, exact for the Hermite field.
double energy_norm(const ConstantTensor& c0, const HermiteField& v);
double energy_norm(const ConstantTensor& c0, const PotentialGrid& v);
/// int |D^2 v|^2 over the cube.
double hessian_norm2(const HermiteField& v);

}  // namespace hstat
