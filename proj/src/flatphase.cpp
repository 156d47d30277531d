#include "hstat/flatphase.hpp"

#include "hstat/errors.hpp"
#include "hstat/graph.hpp"
#include "hstat/quadrature.hpp"

#include <cmath>

namespace hstat {

double phase(const Mat& d2u) {
  if (d2u.rows() != d2u.cols() || !is_symmetric(d2u, 1e-12))
    fail(ErrorKind::Shape, "phase needs a symmetric matrix");
  const SymEigen e = jacobi_eigen(d2u);
  double theta = 0.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) theta += std::atan(e.values(i));
  return theta;
}

PhaseField phase_field(const PotentialGrid& u) {
  PhaseField pf;
  pf.theta = PotentialGrid::zeros(u.dim(), u.cells());
  pf.theta.set_description("phase");
  pf.eigenvalues.resize(u.node_count());
  for (std::size_t node = 0; node < u.node_count(); ++node) {
    if (u.band_distance(node) < 1) continue;
    const SymEigen e = jacobi_eigen(hessian(u, node));
    double theta = 0.0;
    for (Eigen::Index i = 0; i < e.values.size(); ++i) theta += std::atan(e.values(i));
    pf.theta[node] = theta;
    pf.eigenvalues[node] = e.values;
  }
  return pf;
}

double phase_pairing(const PotentialGrid& u, const TestFunction& eta) {
  const int n = u.dim();
  if (eta.center().size() != n) fail(ErrorKind::Shape, "phase pairing: test function dimension");
  check_support(eta.sample(u.cells()));
  const PhaseField pf = phase_field(u);
  const DerivativeField ju(u);
  const CellRule rule(n, 4);
  const auto corners = corner_offsets(u);
  const double dx = u.spacing();
  const double cell_volume = std::pow(dx, n);

  // Centered gradient of the phase on nodes 2..N-2.
  std::vector<double> dtheta(u.node_count() * static_cast<std::size_t>(n), 0.0);
  for (std::size_t node = 0; node < u.node_count(); ++node) {
    if (u.band_distance(node) < 2) continue;
    const Vec g = gradient(pf.theta, node);
    for (int d = 0; d < n; ++d) dtheta[node * static_cast<std::size_t>(n) + static_cast<std::size_t>(d)] = g(d);
  }

  double total = 0.0;
  Vec du(n), dth(n);
  Mat d2u(n, n);
  for (std::size_t base : cells_within(u, 2)) {
    const Vec x0 = u.node_point(base);
    bool meets = true;
    for (int d = 0; d < n; ++d)
      meets = meets && x0(d) < eta.center()(d) + eta.radius() && x0(d) + dx > eta.center()(d) - eta.radius();
    if (!meets) continue;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      du.setZero();
      d2u.setZero();
      dth.setZero();
      for (std::size_t c = 0; c < corners.size(); ++c) {
        const double w = rule.corner_weights[q][c];
        const std::size_t node = base + corners[c];
        du += w * Eigen::Map<const Vec>(ju.grad_ptr(node), n);
        d2u += w * Eigen::Map<const Mat>(ju.hess_ptr(node), n, n);
        dth += w * Eigen::Map<const Vec>(&dtheta[node * static_cast<std::size_t>(n)], n);
      }
      const Vec x = x0 + dx * rule.points[q];
      const Vec de = eta.gradient(x);
      const Mat g = Mat::Identity(n, n) + d2u * d2u;
      const Eigen::LLT<Mat> llt(g);
      const Mat L = llt.matrixL();
      const double sqrt_det = L.diagonal().prod();
      total += cell_volume * rule.weights[q] * sqrt_det * dth.dot(llt.solve(de));
    }
  }
  return total;
}

}  // namespace hstat
