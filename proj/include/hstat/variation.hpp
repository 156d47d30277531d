/// @file variation.hpp
/// @brief Euler-Lagrange coefficients of the volume functional, its weak
/// residual and the Legendre ellipticity diagnostic.
///
/// With S = sqrt(det g) g^{-1} and U = D^2u the coefficients are
///
///   a^{ij,kl} = S_ij (d_kl + B_lk),    b^{jk} = S_ij C_ki,
///   c^k       = 1/2 tr S (d_k A + 2 U d_k C + U d_k B U),
///   F^{jl}    = a^{ij,kl} u_ik + b^{jl},
///
/// where d_k is the partial derivative in y_k, and the weak equation reads
/// int F^{jl} eta_jl + c^k eta_k dx = 0.
#pragma once

#include "hstat/graph.hpp"
#include "hstat/grid.hpp"
#include "hstat/linalg.hpp"
#include "hstat/metric.hpp"

#include <vector>

namespace hstat {

struct Flux {
  Mat F;  // F^{jl}
  Vec c;  // c^k
};

/// F and c at a single point (x, Du, D^2u).
Flux flux(const MetricField& m, const Vec& x, const Vec& du, const Mat& d2u);

struct ElTensors {
  Tensor4 a;
  Mat b;
  Vec c;
  Mat F;
  Vec at;
  InducedMetricPoint metric;
};

ElTensors el_coefficients_at(const MetricField& m, const Vec& x, const Vec& du, const Mat& d2u);
/// Coefficients at a grid node, Du and D^2u by centered differences.
ElTensors el_coefficients(const MetricField& m, const PotentialGrid& u, std::size_t node);

/// Polynomial bump prod_i (1 - ((x_i - c_i)/rho)^2)^4 supported on the open
/// cube of half-width rho about c. C^3 across the support boundary.
class TestFunction {
 public:
  TestFunction(Vec center, double radius, double scale = 1.0);

  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  double scale() const { return scale_; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  TestFunction scaled(double s) const { return TestFunction(center_, radius_, scale_ * s); }

  /// Nodal samples on an n-dimensional grid with N cells per axis.
  PotentialGrid sample(int N) const;

 private:
  Vec center_;
  double radius_;
  double scale_;
};

/// Throws Support unless eta vanishes on every clamped node.
void check_support(const PotentialGrid& eta);

/// int F^{jl} eta_jl + c^k eta_k over the interior cells. The test function
/// enters through its nodal samples and the same difference operators as u,
/// so the result is exactly the derivative of interior_volume(u + t eta) at
/// t = 0.
double weak_residual(const MetricField& m, const PotentialGrid& u, const PotentialGrid& eta);
double weak_residual(const MetricField& m, const PotentialGrid& u, const TestFunction& eta);

struct FirstVariation {
  double analytic = 0.0;
  double numeric = 0.0;
};

/// analytic = weak_residual; numeric = central difference of interior_volume.
FirstVariation first_variation_check(const MetricField& m, const PotentialGrid& u,
                                     const TestFunction& eta, double t = 1e-5);

/// T^{ij,kl} = dF^{jl}/du_ik, by central differences of F along the
/// symmetric directions (e_i e_k^T + e_k e_i^T)/2 with Du and x held fixed.
Tensor4 flux_jacobian(const MetricField& m, const Vec& x, const Vec& du, const Mat& d2u,
                      double step = 1e-5);

struct EllipticityReport {
  double lambda_min = 0.0;
  Vec worst_point;
  Mat worst_sigma;
};

/// Smallest eigenvalue of the Legendre form of T over the sampled nodes.
EllipticityReport legendre_constant(const MetricField& m, const PotentialGrid& u,
                                    const std::vector<std::size_t>& sample);

/// Nodes at least `margin` layers inside the cube, every `stride`-th along
/// each axis.
std::vector<std::size_t> interior_sample(const PotentialGrid& u, int stride, int margin = 1);

}  // namespace hstat
