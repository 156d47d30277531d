#include "hstat/variation.hpp"

#include "hstat/errors.hpp"
#include "hstat/quadrature.hpp"

#include <cmath>
#include <limits>

namespace hstat {

namespace {

struct FluxParts {
  Mat S;
  Mat F;
  Vec c;
  MetricBlocks blocks;
  InducedMetricPoint metric;
};

FluxParts flux_parts(const MetricField& m, const Vec& x, const Vec& du, const Mat& U) {
  const int n = m.dim();
  FluxParts p;
  p.blocks = m.eval(x, du);
  p.metric = induced_metric(p.blocks, U);
  p.S = p.metric.sqrt_det_g * p.metric.g_inv;
  p.F = p.S * (U + U * p.blocks.B + p.blocks.C.transpose());
  p.c = Vec::Zero(n);
  if (!m.is_flat()) {
    const MetricDyBlocks dy = m.eval_dy(x, du);
    for (int k = 0; k < n; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const Mat inner = dy.dA[kk] + 2.0 * U * dy.dC[kk] + U * dy.dB[kk] * U;
      p.c(k) = 0.5 * (p.S.cwiseProduct(inner.transpose())).sum();
    }
  }
  return p;
}

}  // namespace

Flux flux(const MetricField& m, const Vec& x, const Vec& du, const Mat& d2u) {
  FluxParts p = flux_parts(m, x, du, d2u);
  return {std::move(p.F), std::move(p.c)};
}

ElTensors el_coefficients_at(const MetricField& m, const Vec& x, const Vec& du, const Mat& d2u) {
  const int n = m.dim();
  FluxParts p = flux_parts(m, x, du, d2u);
  ElTensors e;
  e.a = Tensor4(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          e.a(i, j, k, l) = p.S(i, j) * ((k == l ? 1.0 : 0.0) + p.blocks.B(l, k));
  e.b = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) e.b(j, k) += p.S(i, j) * p.blocks.C(k, i);
  Mat assembled = e.b;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) assembled(j, l) += e.a(i, j, k, l) * d2u(i, k);
  const double scale = 1.0 + p.F.cwiseAbs().maxCoeff();
  if ((assembled - p.F).cwiseAbs().maxCoeff() > 1e-11 * scale)
    fail(ErrorKind::Assembly, "flux does not match a u_ik + b");
  e.F = std::move(p.F);
  e.c = std::move(p.c);
  e.at = x;
  e.metric = std::move(p.metric);
  return e;
}

ElTensors el_coefficients(const MetricField& m, const PotentialGrid& u, std::size_t node) {
  if (u.band_distance(node) < 1) fail(ErrorKind::Stencil, "coefficients need an interior node");
  return el_coefficients_at(m, u.node_point(node), gradient(u, node), hessian(u, node));
}

TestFunction::TestFunction(Vec center, double radius, double scale)
    : center_(std::move(center)), radius_(radius), scale_(scale) {
  if (!(radius_ > 0.0)) fail(ErrorKind::Parameter, "test function radius must be positive");
  if (center_.size() < 1) fail(ErrorKind::Shape, "test function needs a center");
}

namespace {

struct Profile {
  double v, d1, d2;
};

Profile bump_profile(double x, double c, double rho) {
  const double t = (x - c) / rho;
  if (std::abs(t) >= 1.0) return {0.0, 0.0, 0.0};
  const double q = 1.0 - t * t;
  const double q2 = q * q;
  return {q2 * q2, -8.0 * t * q2 * q / rho, (-8.0 * q2 * q + 48.0 * t * t * q2) / (rho * rho)};
}

}  // namespace

double TestFunction::value(const Vec& x) const {
  double v = scale_;
  for (Eigen::Index i = 0; i < center_.size(); ++i) v *= bump_profile(x(i), center_(i), radius_).v;
  return v;
}

Vec TestFunction::gradient(const Vec& x) const {
  const auto n = center_.size();
  std::vector<Profile> p(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = bump_profile(x(i), center_(i), radius_);
  Vec g(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    double v = scale_;
    for (Eigen::Index i = 0; i < n; ++i)
      v *= i == a ? p[static_cast<std::size_t>(i)].d1 : p[static_cast<std::size_t>(i)].v;
    g(a) = v;
  }
  return g;
}

Mat TestFunction::hessian(const Vec& x) const {
  const auto n = center_.size();
  std::vector<Profile> p(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = bump_profile(x(i), center_(i), radius_);
  Mat h(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      double v = scale_;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Profile& q = p[static_cast<std::size_t>(i)];
        if (a == b)
          v *= i == a ? q.d2 : q.v;
        else
          v *= (i == a || i == b) ? q.d1 : q.v;
      }
      h(a, b) = v;
    }
  return h;
}

PotentialGrid TestFunction::sample(int N) const {
  return PotentialGrid::sample(static_cast<int>(center_.size()), N, [this](const Vec& x) { return value(x); },
                               "test function");
}

void check_support(const PotentialGrid& eta) {
  for (std::size_t i = 0; i < eta.node_count(); ++i)
    if (eta[i] != 0.0 && eta.clamped(i))
      fail(ErrorKind::Support, "test function support reaches the clamped boundary band");
}

namespace {

// Interior cells on which the discrete derivatives of eta do not all vanish.
std::vector<std::size_t> active_cells(const PotentialGrid& eta, const DerivativeField& jets) {
  const int n = eta.dim();
  const auto corners = corner_offsets(eta);
  std::vector<std::size_t> out;
  for (std::size_t base : cells_within(eta, 1)) {
    bool active = false;
    for (std::size_t c = 0; c < corners.size() && !active; ++c) {
      const std::size_t node = base + corners[c];
      const double* g = jets.grad_ptr(node);
      const double* h = jets.hess_ptr(node);
      for (int k = 0; k < n && !active; ++k) active = g[k] != 0.0;
      for (int k = 0; k < n * n && !active; ++k) active = h[k] != 0.0;
    }
    if (active) out.push_back(base);
  }
  return out;
}

}  // namespace

double weak_residual(const MetricField& m, const PotentialGrid& u, const PotentialGrid& eta) {
  if (eta.dim() != u.dim() || eta.cells() != u.cells() || m.dim() != u.dim())
    fail(ErrorKind::Shape, "weak residual: grid mismatch");
  check_support(eta);
  const int n = u.dim();
  const DerivativeField ju(u);
  const DerivativeField je(eta);
  const CellRule rule(n, 3);
  const auto corners = corner_offsets(u);
  const double cell_volume = std::pow(u.spacing(), n);
  double total = 0.0;
  Vec du(n), de(n), x(n);
  Mat d2u(n, n), d2e(n, n);
  for (std::size_t base : active_cells(eta, je)) {
    const Vec x0 = u.node_point(base);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      du.setZero();
      d2u.setZero();
      de.setZero();
      d2e.setZero();
      for (std::size_t c = 0; c < corners.size(); ++c) {
        const double w = rule.corner_weights[q][c];
        const std::size_t node = base + corners[c];
        du += w * Eigen::Map<const Vec>(ju.grad_ptr(node), n);
        d2u += w * Eigen::Map<const Mat>(ju.hess_ptr(node), n, n);
        de += w * Eigen::Map<const Vec>(je.grad_ptr(node), n);
        d2e += w * Eigen::Map<const Mat>(je.hess_ptr(node), n, n);
      }
      x = x0 + u.spacing() * rule.points[q];
      const Flux f = flux(m, x, du, d2u);
      total += cell_volume * rule.weights[q] * (f.F.cwiseProduct(d2e).sum() + f.c.dot(de));
    }
  }
  return total;
}

double weak_residual(const MetricField& m, const PotentialGrid& u, const TestFunction& eta) {
  if (eta.center().size() != u.dim()) fail(ErrorKind::Shape, "weak residual: test function dimension");
  return weak_residual(m, u, eta.sample(u.cells()));
}

FirstVariation first_variation_check(const MetricField& m, const PotentialGrid& u,
                                     const TestFunction& eta, double t) {
  if (!(t > 0.0)) fail(ErrorKind::Parameter, "first variation step must be positive");
  const PotentialGrid e = eta.sample(u.cells());
  FirstVariation out;
  out.analytic = weak_residual(m, u, e);
  // Cells away from the active set contribute identical terms to both sums.
  const DerivativeField je(e);
  const auto cells = active_cells(e, je);
  const double plus = interior_volume(u + e * t, m, cells);
  const double minus = interior_volume(u - e * t, m, cells);
  out.numeric = (plus - minus) / (2.0 * t);
  return out;
}

Tensor4 flux_jacobian(const MetricField& m, const Vec& x, const Vec& du, const Mat& d2u, double step) {
  const int n = m.dim();
  Tensor4 T(n);
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      Mat dir = Mat::Zero(n, n);
      dir(i, k) += 0.5;
      dir(k, i) += 0.5;
      const Mat dF = (flux(m, x, du, d2u + step * dir).F - flux(m, x, du, d2u - step * dir).F) / (2.0 * step);
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          T(i, j, k, l) = dF(j, l);
          T(k, j, i, l) = dF(j, l);
        }
    }
  return T;
}

EllipticityReport legendre_constant(const MetricField& m, const PotentialGrid& u,
                                    const std::vector<std::size_t>& sample) {
  if (sample.empty()) fail(ErrorKind::Parameter, "legendre constant needs a nonempty sample");
  EllipticityReport rep;
  rep.lambda_min = std::numeric_limits<double>::infinity();
  for (std::size_t node : sample) {
    if (u.band_distance(node) < 1) fail(ErrorKind::Stencil, "sample node on the cube boundary");
    const Vec x = u.node_point(node);
    const LegendreBounds lb = legendre_bounds(flux_jacobian(m, x, gradient(u, node), hessian(u, node)));
    if (lb.lambda_min < rep.lambda_min) {
      rep.lambda_min = lb.lambda_min;
      rep.worst_point = x;
      rep.worst_sigma = lb.argmin;
    }
  }
  return rep;
}

std::vector<std::size_t> interior_sample(const PotentialGrid& u, int stride, int margin) {
  if (stride < 1 || margin < 1) fail(ErrorKind::Parameter, "sample stride and margin must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t node = 0; node < u.node_count(); ++node) {
    if (u.band_distance(node) < margin) continue;
    bool keep = true;
    for (int i : u.multi_index(node)) keep = keep && (i - margin) % stride == 0;
    if (keep) out.push_back(node);
  }
  return out;
}

}  // namespace hstat
