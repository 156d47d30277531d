#include "hstat/linearize.hpp"

#include "hstat/errors.hpp"
#include "hstat/quadrature.hpp"
#include "hstat/variation.hpp"

#include <cmath>
#include <memory>

namespace hstat {

namespace {

void check_axis_step(const PotentialGrid& u, int p, int h_steps) {
  if (p < 0 || p >= u.dim()) fail(ErrorKind::Parameter, "difference direction out of range");
  if (h_steps < 1 || h_steps > u.cells() / 2)
    fail(ErrorKind::Parameter, "difference step must be a positive multiple of the spacing below 1");
}

}  // namespace

DiffQuotient diff_quotient(const PotentialGrid& u, int p, int h_steps) {
  check_axis_step(u, p, h_steps);
  DiffQuotient q;
  q.p = p;
  q.h_steps = h_steps;
  q.h = h_steps * u.spacing();
  q.f = PotentialGrid::zeros(u.dim(), u.cells());
  q.f.set_description("difference quotient");
  const std::size_t shift = static_cast<std::size_t>(h_steps) * u.stride(p);
  for (std::size_t node = 0; node < u.node_count(); ++node) {
    if (u.multi_index(node)[static_cast<std::size_t>(p)] + h_steps > u.cells()) continue;
    q.f[node] = (u[node + shift] - u[node]) / q.h;
  }
  return q;
}

Linearization::Linearization(MetricField m, PotentialGrid u, int p, int h_steps, LinearizeOptions opts)
    : m_(std::move(m)), u_(std::move(u)), p_(p), h_steps_(h_steps), h_(0.0), opts_(std::move(opts)),
      jets_(u_) {
  check_axis_step(u_, p, h_steps);
  if (m_.dim() != u_.dim()) fail(ErrorKind::Shape, "linearization: metric and grid dimensions differ");
  if (opts_.t_points < 1 || opts_.t_points > 5) fail(ErrorKind::Parameter, "t quadrature needs 1..5 points");
  if (!(opts_.slot_step > 0.0)) fail(ErrorKind::Parameter, "slot step must be positive");
  h_ = h_steps * u_.spacing();
}

PointCoefficients Linearization::evaluate(const Vec& x, const Vec& du0, const Mat& d2u0, const Vec& du1,
                                          const Mat& d2u1) const {
  const int n = u_.dim();
  const double s = opts_.slot_step;
  const Rule1D& rule = gauss_legendre(opts_.t_points);
  const Vec fk = (du1 - du0) / h_;
  Vec ep = Vec::Zero(n);
  ep(p_) = 1.0;

  PointCoefficients pc;
  pc.x = x;
  pc.beta = Tensor4(n);
  pc.gamma1.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  pc.gamma2 = Mat::Zero(n, n);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = rule.nodes[q];
    const double w = rule.weights[q];
    const Vec xt = x + t * h_ * ep;
    const Vec dut = du0 + t * (du1 - du0);
    const Mat d2ut = d2u0 + t * (d2u1 - d2u0);
    Tensor4 T = flux_jacobian(m_, xt, dut, d2ut, s);
    T *= w;
    pc.beta += T;
    for (int k = 0; k < n; ++k) {
      Vec dv = Vec::Zero(n);
      dv(k) = s;
      pc.gamma1[static_cast<std::size_t>(k)] +=
          w * (flux(m_, xt, dut + dv, d2ut).F - flux(m_, xt, dut - dv, d2ut).F) / (2.0 * s);
    }
    if (!m_.is_flat())
      pc.gamma2 += w * (flux(m_, xt + s * ep, dut, d2ut).F - flux(m_, xt - s * ep, dut, d2ut).F) / (2.0 * s);
  }
  pc.gamma = pc.gamma2;
  for (int k = 0; k < n; ++k) pc.gamma += fk(k) * pc.gamma1[static_cast<std::size_t>(k)];
  fill_lower(pc, du0, d2u0);
  return pc;
}

void Linearization::fill_lower(PointCoefficients& pc, const Vec& du0, const Mat& d2u0) const {
  if (opts_.lower) {
    pc.psi = opts_.lower->a ? opts_.lower->a(pc.x, du0, d2u0) : Vec::Zero(u_.dim());
    pc.zeta = opts_.lower->b ? opts_.lower->b(pc.x, du0, d2u0) : 0.0;
    if (pc.psi.size() != u_.dim()) fail(ErrorKind::Shape, "lower-order vector term has the wrong size");
  } else {
    pc.psi = flux(m_, pc.x, du0, d2u0).c;
    pc.zeta = 0.0;
  }
}

PointCoefficients Linearization::lower_at(const Vec& x) const {
  const Jet j0 = jets_.at(x);
  PointCoefficients pc;
  pc.x = x;
  fill_lower(pc, j0.du, j0.d2u);
  return pc;
}

PointCoefficients Linearization::at(const Vec& x) const {
  Vec xh = x;
  xh(p_) += h_;
  const Jet j0 = jets_.at(x);
  const Jet j1 = jets_.at(xh);
  return evaluate(x, j0.du, j0.d2u, j1.du, j1.d2u);
}

PointCoefficients Linearization::at_node(std::size_t node) const {
  const auto idx = u_.multi_index(node);
  if (u_.band_distance(node) < 1 || idx[static_cast<std::size_t>(p_)] + h_steps_ > u_.cells() - 1)
    fail(ErrorKind::Stencil, "node and its shift need centered differences");
  const std::size_t shifted = node + static_cast<std::size_t>(h_steps_) * u_.stride(p_);
  return evaluate(u_.node_point(node), jets_.grad(node), jets_.hess(node), jets_.grad(shifted),
                  jets_.hess(shifted));
}

Tensor4 beta(const MetricField& m, const PotentialGrid& u, int p, int h_steps, std::size_t node) {
  const Linearization lin(m, u, p, h_steps);
  return lin.at_node(node).beta;
}

LinearCoefficients linear_coefficients(const MetricField& m, const PotentialGrid& u, int p, int h_steps,
                                       const LinearizeOptions& opts) {
  const Linearization lin(m, u, p, h_steps, opts);
  LinearCoefficients lc;
  lc.p = p;
  lc.h_steps = h_steps;
  lc.h = lin.h();
  lc.quad_points = opts.t_points;
  lc.nodes.resize(u.node_count());
  for (std::size_t node = 0; node < u.node_count(); ++node) {
    if (u.band_distance(node) < 1 || u.multi_index(node)[static_cast<std::size_t>(p)] + h_steps > u.cells() - 1)
      continue;
    lc.nodes[node] = lin.at_node(node);
  }
  return lc;
}

PotentialGrid shift_forward(const PotentialGrid& eta, int p, int h_steps) {
  check_axis_step(eta, p, h_steps);
  PotentialGrid out = PotentialGrid::zeros(eta.dim(), eta.cells());
  const std::size_t shift = static_cast<std::size_t>(h_steps) * eta.stride(p);
  for (std::size_t node = 0; node < eta.node_count(); ++node) {
    if (eta[node] == 0.0) continue;
    if (eta.multi_index(node)[static_cast<std::size_t>(p)] + h_steps > eta.cells())
      fail(ErrorKind::Support, "shifted test function leaves the grid");
    out[node + shift] = eta[node];
  }
  return out;
}

double linear_weak_residual(const Linearization& lin, const DiffQuotient& f, const PotentialGrid& eta) {
  const PotentialGrid& u = lin.potential();
  if (f.p != lin.axis() || f.h_steps != lin.h_steps())
    fail(ErrorKind::Parameter, "difference quotient does not match the linearization");
  if (eta.dim() != u.dim() || eta.cells() != u.cells() || f.f.cells() != u.cells())
    fail(ErrorKind::Shape, "linear residual: grid mismatch");
  check_support(eta);
  const PotentialGrid shifted = shift_forward(eta, lin.axis(), lin.h_steps());
  check_support(shifted);
  // eta^{-h} on nodes
  const PotentialGrid eta_minus = (shifted - eta) * (1.0 / lin.h());

  const int n = u.dim();
  const DerivativeField je(eta);
  const DerivativeField jm(eta_minus);
  const DerivativeField jf(f.f);
  const CellRule rule(n, 3);
  const auto corners = corner_offsets(u);
  const double cell_volume = std::pow(u.spacing(), n);
  auto nonzero_at = [n](const DerivativeField& d, std::size_t node) {
    for (int k = 0; k < n; ++k)
      if (d.grad_ptr(node)[k] != 0.0) return true;
    for (int k = 0; k < n * n; ++k)
      if (d.hess_ptr(node)[k] != 0.0) return true;
    return false;
  };

  double total = 0.0;
  Vec de(n), dm(n);
  Mat d2e(n, n), d2f(n, n);
  for (std::size_t base : cells_within(u, 1)) {
    bool eta_active = false, minus_active = false;
    for (std::size_t c = 0; c < corners.size(); ++c) {
      eta_active = eta_active || nonzero_at(je, base + corners[c]);
      minus_active = minus_active || nonzero_at(jm, base + corners[c]);
    }
    if (!eta_active && !minus_active) continue;
    const Vec x0 = u.node_point(base);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      de.setZero();
      dm.setZero();
      d2e.setZero();
      d2f.setZero();
      double vm = 0.0;
      for (std::size_t c = 0; c < corners.size(); ++c) {
        const double w = rule.corner_weights[q][c];
        const std::size_t node = base + corners[c];
        de += w * Eigen::Map<const Vec>(je.grad_ptr(node), n);
        d2e += w * Eigen::Map<const Mat>(je.hess_ptr(node), n, n);
        dm += w * Eigen::Map<const Vec>(jm.grad_ptr(node), n);
        vm += w * eta_minus[node];
        if (eta_active) d2f += w * Eigen::Map<const Mat>(jf.hess_ptr(node), n, n);
      }
      const Vec x = x0 + u.spacing() * rule.points[q];
      double integrand = 0.0;
      if (eta_active) {
        const PointCoefficients pc = lin.at(x);
        integrand += pc.beta.pair(d2f, d2e) + pc.gamma.cwiseProduct(d2e).sum() + pc.psi.dot(dm) + pc.zeta * vm;
      } else {
        const PointCoefficients pc = lin.lower_at(x);
        integrand += pc.psi.dot(dm) + pc.zeta * vm;
      }
      total += cell_volume * rule.weights[q] * integrand;
    }
  }
  return total;
}

double diff1_recombination(const MetricField& m, const PotentialGrid& u, int p, int h_steps,
                           const PotentialGrid& eta) {
  check_axis_step(u, p, h_steps);
  const PotentialGrid shifted = shift_forward(eta, p, h_steps);
  const double h = h_steps * u.spacing();
  return (weak_residual(m, u, shifted) - weak_residual(m, u, eta)) / h;
}

ClosenessReport closeness_report(const MetricField& m, const PotentialGrid& u, const Tensor4& a0,
                                 double epsilon0, const std::vector<std::size_t>& sample, int h_steps) {
  const int n = u.dim();
  if (a0.dim() != n) fail(ErrorKind::Shape, "closeness: reference tensor dimension");
  if (sample.empty()) fail(ErrorKind::Parameter, "closeness needs a nonempty sample");
  std::vector<std::unique_ptr<Linearization>> lins;
  for (int p = 0; p < n; ++p) lins.push_back(std::make_unique<Linearization>(m, u, p, h_steps));
  const Tensor4 ref = a0.minor_symmetrized();
  ClosenessReport rep;
  rep.a0 = a0;
  rep.epsilon0 = epsilon0;
  for (std::size_t node : sample) {
    Tensor4 avg(n);
    for (int p = 0; p < n; ++p) avg += lins[static_cast<std::size_t>(p)]->at_node(node).beta;
    avg *= 1.0 / n;
    const double dev = avg.minor_symmetrized().max_abs_diff(ref);
    if (dev > rep.sup_dev || rep.worst_point.size() == 0) {
      rep.sup_dev = dev;
      rep.worst_point = u.node_point(node);
    }
  }
  rep.pass = rep.sup_dev < epsilon0;
  return rep;
}

}  // namespace hstat
