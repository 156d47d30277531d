#include "hstat/optimize.hpp"

#include "hstat/errors.hpp"
#include "hstat/graph.hpp"
#include "hstat/quadrature.hpp"
#include "hstat/variation.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>

namespace hstat {

namespace {

// Interior volume and, optionally, its gradient with respect to every node.
double volume_and_gradient(const MetricField& m, const PotentialGrid& u, std::vector<double>* grad) {
  const int n = u.dim();
  const auto nn = static_cast<std::size_t>(n);
  const DerivativeField jets(u);
  const CellRule rule(n, 3);
  const auto corners = corner_offsets(u);
  const double dx = u.spacing();
  const double cell_volume = std::pow(dx, n);
  std::vector<double> adj_g, adj_h;
  if (grad) {
    adj_g.assign(u.node_count() * nn, 0.0);
    adj_h.assign(u.node_count() * nn * nn, 0.0);
  }
  long double vol = 0.0L;
  Vec du(n), x(n);
  Mat d2u(n, n);
  for (std::size_t base : cells_within(u, 1)) {
    const Vec x0 = u.node_point(base);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      du.setZero();
      d2u.setZero();
      for (std::size_t c = 0; c < corners.size(); ++c) {
        const double w = rule.corner_weights[q][c];
        du += w * Eigen::Map<const Vec>(jets.grad_ptr(base + corners[c]), n);
        d2u += w * Eigen::Map<const Mat>(jets.hess_ptr(base + corners[c]), n, n);
      }
      x = x0 + dx * rule.points[q];
      const double wq = cell_volume * rule.weights[q];
      if (!grad) {
        vol += wq * induced_metric(m, x, du, d2u).sqrt_det_g;
        continue;
      }
      const ElTensors e = el_coefficients_at(m, x, du, d2u);
      vol += wq * e.metric.sqrt_det_g;
      for (std::size_t c = 0; c < corners.size(); ++c) {
        const double w = wq * rule.corner_weights[q][c];
        const std::size_t node = base + corners[c];
        for (int a = 0; a < n; ++a) {
          adj_g[node * nn + static_cast<std::size_t>(a)] += w * e.c(a);
          for (int b = 0; b < n; ++b)
            adj_h[(node * nn + static_cast<std::size_t>(a)) * nn + static_cast<std::size_t>(b)] += w * e.F(a, b);
        }
      }
    }
  }
  if (grad) {
    // Transpose of the centered stencils.
    grad->assign(u.node_count(), 0.0);
    auto& G = *grad;
    const double i2h = 0.5 / dx, ih2 = 1.0 / (dx * dx), i4h2 = 0.25 / (dx * dx);
    for (std::size_t node = 0; node < u.node_count(); ++node) {
      if (u.band_distance(node) < 1) continue;
      for (int a = 0; a < n; ++a) {
        const std::size_t sa = u.stride(a);
        const double qa = adj_g[node * nn + static_cast<std::size_t>(a)];
        G[node + sa] += qa * i2h;
        G[node - sa] -= qa * i2h;
        const double paa = adj_h[(node * nn + static_cast<std::size_t>(a)) * nn + static_cast<std::size_t>(a)];
        G[node + sa] += paa * ih2;
        G[node - sa] += paa * ih2;
        G[node] -= 2.0 * paa * ih2;
        for (int b = a + 1; b < n; ++b) {
          const std::size_t sb = u.stride(b);
          const double p = adj_h[(node * nn + static_cast<std::size_t>(a)) * nn + static_cast<std::size_t>(b)] +
                           adj_h[(node * nn + static_cast<std::size_t>(b)) * nn + static_cast<std::size_t>(a)];
          G[node + sa + sb] += p * i4h2;
          G[node - sa - sb] += p * i4h2;
          G[node + sa - sb] -= p * i4h2;
          G[node - sa + sb] -= p * i4h2;
        }
      }
    }
    for (std::size_t node = 0; node < u.node_count(); ++node)
      if (u.clamped(node)) G[node] = 0.0;
  }
  return static_cast<double>(vol);
}

constexpr double kRoundoff = 1e-12;

// Hessian of sum_q w_q |D^2_h u(x_q)|^2 / 2 over the free nodes: the
// small-slope limit of the flat volume, with the same stencils,
// interpolation and quadrature. Assembled as sum_ab S_ab^T M S_ab with S_ab
// the nodal stencil of entry (a, b) and M the multilinear mass matrix.
Eigen::SparseMatrix<double> energy_hessian(const PotentialGrid& u, const std::vector<long>& unknown, long free_count) {
  using SpMat = Eigen::SparseMatrix<double>;
  const int n = u.dim();
  const double dx = u.spacing();
  const auto nodes = static_cast<Eigen::Index>(u.node_count());
  const CellRule rule(n, 3);
  const auto corners = corner_offsets(u);
  const double cell_volume = std::pow(dx, n);
  std::vector<Eigen::Triplet<double>> mt;
  for (std::size_t base : cells_within(u, 1))
    for (std::size_t a = 0; a < corners.size(); ++a)
      for (std::size_t b = 0; b < corners.size(); ++b) {
        double v = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q)
          v += rule.weights[q] * rule.corner_weights[q][a] * rule.corner_weights[q][b];
        mt.emplace_back(static_cast<Eigen::Index>(base + corners[a]), static_cast<Eigen::Index>(base + corners[b]),
                        cell_volume * v);
      }
  SpMat M(nodes, nodes);
  M.setFromTriplets(mt.begin(), mt.end());

  SpMat P(free_count, free_count);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::vector<Eigen::Triplet<double>> st;
      for (std::size_t node = 0; node < u.node_count(); ++node) {
        if (u.band_distance(node) < 1) continue;
        const auto row = static_cast<Eigen::Index>(node);
        auto add = [&](std::size_t k, double v) {
          if (unknown[k] >= 0) st.emplace_back(row, unknown[k], v);
        };
        const std::size_t sa = u.stride(a), sb = u.stride(b);
        if (a == b) {
          add(node + sa, 1.0 / (dx * dx));
          add(node - sa, 1.0 / (dx * dx));
          add(node, -2.0 / (dx * dx));
        } else {
          const double c = 0.25 / (dx * dx);
          add(node + sa + sb, c);
          add(node - sa - sb, c);
          add(node + sa - sb, -c);
          add(node - sa + sb, -c);
        }
      }
      SpMat S(nodes, free_count);
      S.setFromTriplets(st.begin(), st.end());
      P += SpMat(S.transpose() * M * S);
    }
  return P;
}

double sup_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

PotentialGrid discrete_gradient(const MetricField& m, const PotentialGrid& u) {
  if (m.dim() != u.dim()) fail(ErrorKind::Shape, "discrete gradient: dimension mismatch");
  std::vector<double> g;
  volume_and_gradient(m, u, &g);
  PotentialGrid out(u.dim(), u.cells(), std::move(g), "volume gradient");
  return out;
}

double max_hessian_norm(const PotentialGrid& u) {
  double worst = 0.0;
  for (std::size_t node = 0; node < u.node_count(); ++node) {
    if (u.band_distance(node) < 1) continue;
    const SymEigen e = jacobi_eigen(hessian(u, node));
    worst = std::max({worst, std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1))});
  }
  return worst;
}

MinimizeResult minimize(const MetricField& m, const PotentialGrid& boundary_data, const MinimizeConfig& cfg) {
  if (m.dim() != boundary_data.dim()) fail(ErrorKind::Shape, "minimize: dimension mismatch");
  if (!(cfg.tol_grad > 0.0) || !(cfg.hessian_cap > 0.0) || cfg.max_iters < 0 || !(cfg.shrink > 0.0 && cfg.shrink < 1.0) ||
      !(cfg.sufficient_decrease > 0.0 && cfg.sufficient_decrease < 1.0))
    fail(ErrorKind::Parameter, "invalid minimizer configuration");
  if (max_hessian_norm(boundary_data) > cfg.hessian_cap)
    fail(ErrorKind::Steepness, "initial potential exceeds the Hessian cap");

  const PotentialGrid& layout = boundary_data;
  std::vector<long> unknown(layout.node_count(), -1);
  long free_count = 0;
  for (std::size_t node = 0; node < layout.node_count(); ++node)
    if (!layout.clamped(node)) unknown[node] = free_count++;

  MinimizeResult res;
  res.u = boundary_data;
  std::vector<double> G;
  double vol = volume_and_gradient(m, res.u, &G);
  res.initial_volume = vol;
  res.volume_history.push_back(vol);
  res.grad_norm = sup_norm(G);
  if (free_count == 0 || res.grad_norm <= cfg.tol_grad) {
    res.final_volume = vol;
    res.converged = true;
    return res;
  }

  using SpMat = Eigen::SparseMatrix<double>;
  Eigen::SimplicialLDLT<SpMat> solver(energy_hessian(layout, unknown, free_count));
  if (solver.info() != Eigen::Success) fail(ErrorKind::Assembly, "preconditioner factorization failed");

  Vec g(free_count);
  for (int it = 0; it < cfg.max_iters; ++it) {
    for (std::size_t node = 0; node < layout.node_count(); ++node)
      if (unknown[node] >= 0) g(unknown[node]) = G[node];
    const Vec d = -solver.solve(g);
    const double slope = g.dot(d);
    double alpha = 1.0;
    bool accepted = false;
    PotentialGrid trial = res.u;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt, alpha *= cfg.shrink) {
      for (std::size_t node = 0; node < layout.node_count(); ++node)
        if (unknown[node] >= 0) trial[node] = res.u[node] + alpha * d(unknown[node]);
      if (max_hessian_norm(trial) > cfg.hessian_cap) continue;
      double trial_vol;
      try {
        trial_vol = volume_and_gradient(m, trial, nullptr);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Degeneracy || e.kind() == ErrorKind::Domain || e.kind() == ErrorKind::Validity)
          continue;
        throw;
      }
      if (trial_vol <= vol + cfg.sufficient_decrease * alpha * slope) {
        accepted = true;
      } else if (std::abs(trial_vol - vol) <= kRoundoff * std::abs(vol)) {
        // Volume differences are at round-off: use the quadratic-model form
        // of the decrease condition on the directional derivative instead.
        std::vector<double> Gt;
        volume_and_gradient(m, trial, &Gt);
        double dslope = 0.0;
        for (std::size_t node = 0; node < layout.node_count(); ++node)
          if (unknown[node] >= 0) dslope += Gt[node] * d(unknown[node]);
        accepted = dslope <= (2.0 * cfg.sufficient_decrease - 1.0) * slope;
      }
      if (accepted) {
        vol = trial_vol;
        break;
      }
    }
    if (!accepted) break;
    res.u = trial;
    res.iterations = it + 1;
    vol = volume_and_gradient(m, res.u, &G);
    res.volume_history.push_back(vol);
    res.grad_norm = sup_norm(G);
    if (res.grad_norm <= cfg.tol_grad) {
      res.converged = true;
      break;
    }
  }
  res.final_volume = vol;
  return res;
}

}  // namespace hstat
