/// @file linearize.hpp
/// @brief Difference-quotient linearization of the Euler-Lagrange equation.
///
/// For the step h e_p set xi_0 = (x, Du(x), D^2u(x)), xi_h the same at
/// x + h e_p and V = xi_h - xi_0. Writing F(xi_h) - F(xi_0) as the integral
/// of dF/dt along xi_0 + t V gives, with f = (u(x + h e_p) - u(x)) / h,
///
///   [F^{jl}]^h = beta^{ij,kl} f_ik + gamma^{jl},
///   beta  = int_0^1 dF/du_ik dt,
///   gamma = int_0^1 (dF/du_k f_k + dF/dx_p) dt,
///
/// and the tested equation becomes
///
///   int beta f_ik eta_jl + gamma eta_jl + psi^k eta_k^{-h} + zeta eta^{-h} = 0
///
/// with eta^{-h}(x) = (eta(x - h e_p) - eta(x)) / h, psi = c and zeta = 0.
#pragma once

#include "hstat/grid.hpp"
#include "hstat/linalg.hpp"
#include "hstat/metric.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace hstat {

struct DiffQuotient {
  int p = 0;
  int h_steps = 1;
  double h = 0.0;
  /// (u(x + h e_p) - u(x)) / h where node + h_steps stays on the grid, zero
  /// on the last h_steps layers along p.
  PotentialGrid f;
};

DiffQuotient diff_quotient(const PotentialGrid& u, int p, int h_steps);

/// Lower-order coefficients of the general equation, replacing psi and zeta.
struct LowerOrderTerms {
  std::function<Vec(const Vec& x, const Vec& du, const Mat& d2u)> a;
  std::function<double(const Vec& x, const Vec& du, const Mat& d2u)> b;
};

struct LinearizeOptions {
  int t_points = 5;
  double slot_step = 1e-5;
  std::optional<LowerOrderTerms> lower;
};

struct PointCoefficients {
  Vec x;
  Tensor4 beta;
  std::vector<Mat> gamma1;  // gamma1[k](j, l) = int dF^{jl}/du_k dt
  Mat gamma2;               // int dF^{jl}/dx_p dt
  Mat gamma;                // gamma1[k] f_k + gamma2
  Vec psi;
  double zeta = 0.0;
};

/// Node-indexed coefficients on the nodes where both x and x + h e_p have
/// centered differences; other entries are left empty (x has size 0).
struct LinearCoefficients {
  int p = 0;
  int h_steps = 1;
  double h = 0.0;
  int quad_points = 5;
  std::vector<PointCoefficients> nodes;
};

/// Evaluates the coefficients anywhere in the interior cube, with Du and
/// D^2u interpolated from the nodal centered differences.
class Linearization {
 public:
  Linearization(MetricField m, PotentialGrid u, int p, int h_steps, LinearizeOptions opts = {});
  Linearization(const Linearization&) = delete;
  Linearization& operator=(const Linearization&) = delete;

  const PotentialGrid& potential() const { return u_; }
  const MetricField& metric() const { return m_; }
  int axis() const { return p_; }
  int h_steps() const { return h_steps_; }
  double h() const { return h_; }

  /// Coefficients at a point x with x + h e_p in the interior cube.
  PointCoefficients at(const Vec& x) const;
  /// Same, with nodal centered differences at node and node + h e_p.
  PointCoefficients at_node(std::size_t node) const;
  /// psi and zeta only; x needs no shifted partner.
  PointCoefficients lower_at(const Vec& x) const;

 private:
  PointCoefficients evaluate(const Vec& x, const Vec& du0, const Mat& d2u0, const Vec& du1,
                             const Mat& d2u1) const;
  void fill_lower(PointCoefficients& pc, const Vec& du0, const Mat& d2u0) const;

  MetricField m_;
  PotentialGrid u_;
  int p_;
  int h_steps_;
  double h_;
  LinearizeOptions opts_;
  DerivativeField jets_;
};

/// beta^{ij,kl} at a node.
Tensor4 beta(const MetricField& m, const PotentialGrid& u, int p, int h_steps, std::size_t node);

LinearCoefficients linear_coefficients(const MetricField& m, const PotentialGrid& u, int p, int h_steps,
                                       const LinearizeOptions& opts = {});

/// Tests eta (nodal samples) against the linearized equation. Coefficients
/// are evaluated at the quadrature points of the cells where eta or its
/// shift is active; the nodal difference operators are those of the
/// nonlinear residual, which makes the result agree with diff1_recombination
/// up to the t-quadrature and slot-differencing errors.
double linear_weak_residual(const Linearization& lin, const DiffQuotient& f, const PotentialGrid& eta);

/// (R(u, eta(. - h e_p)) - R(u, eta)) / h with R the nonlinear weak residual.
double diff1_recombination(const MetricField& m, const PotentialGrid& u, int p, int h_steps,
                           const PotentialGrid& eta);

/// eta(x - h e_p) on nodes; throws Support if the shift carries nonzero
/// values off the grid.
PotentialGrid shift_forward(const PotentialGrid& eta, int p, int h_steps);

struct ClosenessReport {
  Tensor4 a0;
  double sup_dev = 0.0;
  double epsilon0 = 0.0;
  bool pass = false;
  Vec worst_point;
};

/// max over sampled nodes and entries of |beta - a0|, with beta averaged
/// over the n difference directions. Both tensors are compared through
/// their minor-symmetrized representatives, the part that acts on symmetric
/// Hessians.
ClosenessReport closeness_report(const MetricField& m, const PotentialGrid& u, const Tensor4& a0,
                                 double epsilon0, const std::vector<std::size_t>& sample,
                                 int h_steps = 1);

}  // namespace hstat
