#include "hstat/graph.hpp"

#include "hstat/errors.hpp"

#include <cmath>

namespace hstat {

InducedMetricPoint induced_metric(const MetricBlocks& b, const Mat& U) {
  const auto n = U.rows();
  if (U.cols() != n || b.A.rows() != n) fail(ErrorKind::Shape, "induced metric: dimension mismatch");
  const Mat UC = U * b.C;
  Mat g = Mat::Identity(n, n) + U * U + b.A + U * b.B * U + UC + UC.transpose();
  g = 0.5 * (g + g.transpose()).eval();
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) fail(ErrorKind::Degeneracy, "induced metric is not positive definite");
  const Mat L = llt.matrixL();
  double sqrt_det = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(L(i, i) > 0.0)) fail(ErrorKind::Degeneracy, "induced metric is singular");
    sqrt_det *= L(i, i);
  }
  Mat ginv = llt.solve(Mat::Identity(n, n));
  ginv = 0.5 * (ginv + ginv.transpose()).eval();
  return {std::move(g), sqrt_det, std::move(ginv)};
}

InducedMetricPoint induced_metric(const MetricField& m, const Vec& x, const Vec& du, const Mat& d2u) {
  return induced_metric(m.eval(x, du), d2u);
}

double volume(const PotentialGrid& u, const MetricField& m, const Region& region) {
  if (region.center.size() != u.dim() || m.dim() != u.dim())
    fail(ErrorKind::Shape, "volume: dimension mismatch");
  // Both region kinds reach center +- radius along every axis.
  const bool needs_outer =
      (region.center.cwiseAbs().array() + region.radius > 1.0 - u.spacing() + 1e-12).any();
  const DerivativeField jets(u, needs_outer ? DerivativeField::Boundary::OneSided
                                            : DerivativeField::Boundary::Centered);
  const WeightedPoints pts = region_points(region, u.spacing());
  double vol = 0.0;
  for (std::size_t q = 0; q < pts.points.size(); ++q) {
    const Jet jet = jets.at(pts.points[q]);
    vol += pts.weights[q] * induced_metric(m, pts.points[q], jet.du, jet.d2u).sqrt_det_g;
  }
  return vol;
}

double interior_volume(const PotentialGrid& u, const MetricField& m) {
  return interior_volume(u, m, cells_within(u, 1));
}

double interior_volume(const PotentialGrid& u, const MetricField& m,
                       const std::vector<std::size_t>& cells) {
  const int n = u.dim();
  const DerivativeField jets(u);
  const CellRule rule(n, 3);
  const auto corners = corner_offsets(u);
  const double cell_volume = std::pow(u.spacing(), n);
  double vol = 0.0;
  Vec du(n), x(n);
  Mat d2u(n, n);
  for (std::size_t base : cells) {
    const Vec x0 = u.node_point(base);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      du.setZero();
      d2u.setZero();
      for (std::size_t c = 0; c < corners.size(); ++c) {
        const double w = rule.corner_weights[q][c];
        du += w * Eigen::Map<const Vec>(jets.grad_ptr(base + corners[c]), n);
        d2u += w * Eigen::Map<const Mat>(jets.hess_ptr(base + corners[c]), n, n);
      }
      x = x0 + u.spacing() * rule.points[q];
      vol += cell_volume * rule.weights[q] * induced_metric(m, x, du, d2u).sqrt_det_g;
    }
  }
  return vol;
}

}  // namespace hstat
