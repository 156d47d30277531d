#include "hstat/bvp.hpp"

#include "hstat/errors.hpp"
#include "hstat/quadrature.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>

namespace hstat {

namespace {

// 1D cubic Hermite shape functions on a cell of length L at xi in [0, 1]:
// corner 0/1, dof value/slope; returns d^order/dx^order.
double hermite_1d(unsigned corner, unsigned slope, double xi, int order, double L) {
  const double x2 = xi * xi, x3 = x2 * xi;
  double v = 0.0;
  if (corner == 0 && slope == 0) {
    v = order == 0 ? 1.0 - 3.0 * x2 + 2.0 * x3 : order == 1 ? -6.0 * xi + 6.0 * x2 : -6.0 + 12.0 * xi;
  } else if (corner == 0) {
    v = L * (order == 0 ? xi - 2.0 * x2 + x3 : order == 1 ? 1.0 - 4.0 * xi + 3.0 * x2 : -4.0 + 6.0 * xi);
  } else if (slope == 0) {
    v = order == 0 ? 3.0 * x2 - 2.0 * x3 : order == 1 ? 6.0 * xi - 6.0 * x2 : 6.0 - 12.0 * xi;
  } else {
    v = L * (order == 0 ? -x2 + x3 : order == 1 ? -2.0 * xi + 3.0 * x2 : -2.0 + 6.0 * xi);
  }
  return v / std::pow(L, order);
}

// Local basis a = corner * 2^n + subset. Fills value, gradient and Hessian
// of every local basis function at xi.
struct LocalBasis {
  std::vector<double> value;
  std::vector<Vec> grad;
  std::vector<Mat> hess;
};

LocalBasis local_basis(int n, const Vec& xi, double L) {
  const unsigned S = 1u << n;
  const std::size_t count = static_cast<std::size_t>(S) * S;
  LocalBasis b;
  b.value.resize(count);
  b.grad.assign(count, Vec::Zero(n));
  b.hess.assign(count, Mat::Zero(n, n));
  std::vector<std::array<double, 3>> f(static_cast<std::size_t>(n));
  for (unsigned c = 0; c < S; ++c)
    for (unsigned s = 0; s < S; ++s) {
      const std::size_t a = c * S + s;
      for (int d = 0; d < n; ++d)
        for (int o = 0; o < 3; ++o)
          f[static_cast<std::size_t>(d)][static_cast<std::size_t>(o)] =
              hermite_1d((c >> d) & 1u, (s >> d) & 1u, xi(d), o, L);
      auto product = [&](int i, int oi, int k, int ok) {
        double p = 1.0;
        for (int d = 0; d < n; ++d) {
          int o = 0;
          if (d == i) o += oi;
          if (d == k) o += ok;
          p *= f[static_cast<std::size_t>(d)][static_cast<std::size_t>(o)];
        }
        return p;
      };
      b.value[a] = product(-1, 0, -1, 0);
      for (int i = 0; i < n; ++i) {
        b.grad[a](i) = product(i, 1, -1, 0);
        for (int k = 0; k < n; ++k) b.hess[a](i, k) = product(i, 1, k, 1);
      }
    }
  return b;
}

// K[a][b] = int c0^{ij,kl} D_ik phi_b D_jl phi_a over one cell, exact by
// 4-point Gauss-Legendre per axis.
Mat element_matrix(const Tensor4& c0, int n, double L) {
  const unsigned S = 1u << n;
  const auto count = static_cast<Eigen::Index>(S * S);
  Mat K = Mat::Zero(count, count);
  const CellRule rule(n, 4);
  const double vol = std::pow(L, n);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const LocalBasis b = local_basis(n, rule.points[q], L);
    std::vector<Mat> contracted(static_cast<std::size_t>(count));
    // contracted[b](j, l) = c0^{ij,kl} H_b(i, k)
    for (Eigen::Index bi = 0; bi < count; ++bi) {
      Mat t = Mat::Zero(n, n);
      const Mat& H = b.hess[static_cast<std::size_t>(bi)];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) t(j, l) += c0(i, j, k, l) * H(i, k);
      contracted[static_cast<std::size_t>(bi)] = t;
    }
    for (Eigen::Index ai = 0; ai < count; ++ai)
      for (Eigen::Index bi = 0; bi < count; ++bi)
        K(ai, bi) += vol * rule.weights[q] *
                     contracted[static_cast<std::size_t>(bi)].cwiseProduct(b.hess[static_cast<std::size_t>(ai)]).sum();
  }
  return K;
}

// Derivative weights at offset 0 of the 5-point Lagrange interpolant
// through integer offsets o[0..4], scaled by 1/dx.
std::array<double, 5> derivative_weights(const std::array<int, 5>& o, double dx) {
  std::array<double, 5> w{};
  for (int m = 0; m < 5; ++m) {
    double denom = 1.0;
    for (int r = 0; r < 5; ++r)
      if (r != m) denom *= o[static_cast<std::size_t>(m)] - o[static_cast<std::size_t>(r)];
    double num = 0.0;
    for (int q = 0; q < 5; ++q) {
      if (q == m) continue;
      double p = 1.0;
      for (int r = 0; r < 5; ++r)
        if (r != m && r != q) p *= -o[static_cast<std::size_t>(r)];
      num += p;
    }
    w[static_cast<std::size_t>(m)] = num / denom / dx;
  }
  return w;
}

}  // namespace

ConstantTensor ConstantTensor::from(const Tensor4& c0) {
  return {c0, legendre_bounds(c0).lambda_min};
}

ConstantTensor ConstantTensor::biharmonic(int n) { return {Tensor4::biharmonic(n), 1.0}; }

HermiteField::HermiteField(int n, int N)
    : n_(n), N_(N), layout_(PotentialGrid::zeros(n, N)),
      dofs_(layout_.node_count() * (std::size_t{1} << n), 0.0) {}

HermiteField HermiteField::from_function(int n, int N, const DofFn& g) {
  HermiteField h(n, N);
  for (std::size_t node = 0; node < h.node_count(); ++node) {
    const Vec x = h.layout_.node_point(node);
    for (unsigned s = 0; s < h.subsets(); ++s) h.dof(node, s) = g(x, s);
  }
  return h;
}

HermiteField HermiteField::from_grid(const PotentialGrid& g) {
  const int n = g.dim();
  const int N = g.cells();
  HermiteField h(n, N);
  // Per-axis windows and weights, indexed by node position along the axis.
  std::vector<int> start(static_cast<std::size_t>(N + 1));
  std::vector<std::array<double, 5>> weights(static_cast<std::size_t>(N + 1));
  for (int i = 0; i <= N; ++i) {
    const int s0 = std::clamp(i - 2, 0, N - 4);
    std::array<int, 5> o{};
    for (int m = 0; m < 5; ++m) o[static_cast<std::size_t>(m)] = s0 + m - i;
    start[static_cast<std::size_t>(i)] = s0;
    weights[static_cast<std::size_t>(i)] = derivative_weights(o, g.spacing());
  }
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const auto idx = g.multi_index(node);
    for (unsigned s = 0; s < h.subsets(); ++s) {
      std::vector<int> axes;
      for (int d = 0; d < n; ++d)
        if ((s >> d) & 1u) axes.push_back(d);
      const int terms = static_cast<int>(std::pow(5, axes.size()));
      double acc = 0.0;
      for (int t = 0; t < terms; ++t) {
        int rem = t;
        double w = 1.0;
        std::size_t target = node;
        for (int d : axes) {
          const int m = rem % 5;
          rem /= 5;
          const int i = idx[static_cast<std::size_t>(d)];
          w *= weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
          const int j = start[static_cast<std::size_t>(i)] + m;
          target = target - static_cast<std::size_t>(i) * g.stride(d) + static_cast<std::size_t>(j) * g.stride(d);
        }
        acc += w * g[target];
      }
      h.dof(node, s) = acc;
    }
  }
  return h;
}

void HermiteField::locate(const Vec& x, std::vector<int>& cell, Vec& xi) const {
  if (x.size() != n_) fail(ErrorKind::Shape, "hermite evaluation: point dimension");
  cell.resize(static_cast<std::size_t>(n_));
  xi.resize(n_);
  const double L = spacing();
  for (int d = 0; d < n_; ++d) {
    if (std::abs(x(d)) > 1.0 + 1e-12) fail(ErrorKind::Domain, "hermite evaluation outside the cube");
    const double t = (x(d) + 1.0) / L;
    const int c = std::clamp(static_cast<int>(std::floor(t)), 0, N_ - 1);
    cell[static_cast<std::size_t>(d)] = c;
    xi(d) = t - c;
  }
}

namespace {

template <typename Accumulate>
void for_each_local(const HermiteField& h, const std::vector<int>& cell, const LocalBasis& b, Accumulate acc) {
  const int n = h.dim();
  const unsigned S = h.subsets();
  const std::size_t base = h.layout().flat_index(cell);
  for (unsigned c = 0; c < S; ++c) {
    std::size_t node = base;
    for (int d = 0; d < n; ++d)
      if ((c >> d) & 1u) node += h.layout().stride(d);
    for (unsigned s = 0; s < S; ++s) acc(h.dof(node, s), b, c * S + s);
  }
}

}  // namespace

double HermiteField::value(const Vec& x) const {
  std::vector<int> cell;
  Vec xi;
  locate(x, cell, xi);
  const LocalBasis b = local_basis(n_, xi, spacing());
  double v = 0.0;
  for_each_local(*this, cell, b, [&](double dof, const LocalBasis& lb, std::size_t a) { v += dof * lb.value[a]; });
  return v;
}

Vec HermiteField::gradient(const Vec& x) const {
  std::vector<int> cell;
  Vec xi;
  locate(x, cell, xi);
  const LocalBasis b = local_basis(n_, xi, spacing());
  Vec g = Vec::Zero(n_);
  for_each_local(*this, cell, b, [&](double dof, const LocalBasis& lb, std::size_t a) { g += dof * lb.grad[a]; });
  return g;
}

Mat HermiteField::hessian(const Vec& x) const {
  std::vector<int> cell;
  Vec xi;
  locate(x, cell, xi);
  const LocalBasis b = local_basis(n_, xi, spacing());
  Mat H = Mat::Zero(n_, n_);
  for_each_local(*this, cell, b, [&](double dof, const LocalBasis& lb, std::size_t a) { H += dof * lb.hess[a]; });
  return H;
}

PotentialGrid HermiteField::values() const {
  PotentialGrid g = PotentialGrid::zeros(n_, N_);
  for (std::size_t node = 0; node < node_count(); ++node) g[node] = dof(node, 0);
  return g;
}

HermiteField HermiteField::operator-(const HermiteField& o) const {
  if (o.n_ != n_ || o.N_ != N_) fail(ErrorKind::Shape, "hermite fields on different grids");
  HermiteField r = *this;
  for (std::size_t i = 0; i < dofs_.size(); ++i) r.dofs_[i] -= o.dofs_[i];
  return r;
}

namespace {

std::vector<std::size_t> local_to_global(const HermiteField& h, std::size_t base) {
  const int n = h.dim();
  const unsigned S = h.subsets();
  std::vector<std::size_t> map(static_cast<std::size_t>(S) * S);
  for (unsigned c = 0; c < S; ++c) {
    std::size_t node = base;
    for (int d = 0; d < n; ++d)
      if ((c >> d) & 1u) node += h.layout().stride(d);
    for (unsigned s = 0; s < S; ++s) map[c * S + s] = node * S + s;
  }
  return map;
}

double quadratic_form(const Mat& Ke, const HermiteField& v) {
  double total = 0.0;
  Vec local(Ke.rows());
  for (std::size_t base : cells_within(v.layout(), 0)) {
    const auto map = local_to_global(v, base);
    for (std::size_t a = 0; a < map.size(); ++a) local(static_cast<Eigen::Index>(a)) = v.dofs()[map[a]];
    total += local.dot(Ke * local);
  }
  return total;
}

}  // namespace

double energy_norm(const ConstantTensor& c0, const HermiteField& v) {
  if (c0.c0.dim() != v.dim()) fail(ErrorKind::Shape, "energy norm: tensor dimension");
  return quadratic_form(element_matrix(c0.c0, v.dim(), v.spacing()), v);
}

double energy_norm(const ConstantTensor& c0, const PotentialGrid& v) {
  return energy_norm(c0, HermiteField::from_grid(v));
}

double hessian_norm2(const HermiteField& v) {
  return quadratic_form(element_matrix(Tensor4::delta_ij_kl(v.dim()), v.dim(), v.spacing()), v);
}

BvpSolution solve_bvp(const ConstantTensor& c0, const HermiteField& g, double r, const BvpOptions& opts) {
  const int n = g.dim();
  const int N = g.cells();
  if (c0.c0.dim() != n) fail(ErrorKind::Shape, "bvp: tensor dimension");
  const LegendreBounds lb = legendre_bounds(c0.c0);
  if (!(lb.lambda_min > 0.0)) fail(ErrorKind::Ellipticity, "constant tensor is not Legendre elliptic");
  if (lb.lambda_min < c0.lambda - 1e-12 * std::max(1.0, std::abs(lb.lambda_max)))
    fail(ErrorKind::Ellipticity, "constant tensor is below its declared Legendre constant");
  const double dx = g.spacing();
  const int lo = static_cast<int>(std::lround((1.0 - r) / dx));
  if (!(r > 0.0) || r > 1.0 + 1e-12 || std::abs(lo * dx - (1.0 - r)) > 1e-9 || 2 * lo >= N - 1)
    fail(ErrorKind::Parameter, "bvp half-width must be a multiple of the spacing in (0, 1]");
  const int hi = N - lo;

  const Mat Ke = element_matrix(c0.c0.minor_symmetrized(), n, dx);
  if ((Ke - Ke.transpose()).cwiseAbs().maxCoeff() > 1e-12 * Ke.cwiseAbs().maxCoeff())
    fail(ErrorKind::Assembly, "element matrix is not symmetric");

  const PotentialGrid& layout = g.layout();
  const unsigned S = g.subsets();
  std::vector<long> unknown(g.dofs().size(), -1);
  std::size_t free_count = 0;
  for (std::size_t node = 0; node < layout.node_count(); ++node) {
    const auto idx = layout.multi_index(node);
    bool inner = true;
    for (int i : idx) inner = inner && i > lo && i < hi;
    if (!inner) continue;
    if (opts.clamp_node && opts.clamp_node(layout.node_point(node))) continue;
    for (unsigned s = 0; s < S; ++s) unknown[node * S + s] = static_cast<long>(free_count++);
  }
  if (free_count == 0) fail(ErrorKind::Assembly, "bvp has no free degrees of freedom");

  // Cells of the region: lower corners in [lo, hi - 1].
  std::vector<std::size_t> region_cells;
  for (std::size_t base : cells_within(layout, 0)) {
    bool in = true;
    for (int i : layout.multi_index(base)) in = in && i >= lo && i < hi;
    if (in) region_cells.push_back(base);
  }

  using SpMat = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> triplets;
  Vec rhs = Vec::Zero(static_cast<Eigen::Index>(free_count));
  for (std::size_t base : region_cells) {
    const auto map = local_to_global(g, base);
    for (std::size_t a = 0; a < map.size(); ++a) {
      const long ra = unknown[map[a]];
      if (ra < 0) continue;
      for (std::size_t b = 0; b < map.size(); ++b) {
        const double k = Ke(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        const long rb = unknown[map[b]];
        if (rb >= 0)
          triplets.emplace_back(ra, rb, k);
        else
          rhs(ra) -= k * g.dofs()[map[b]];
      }
    }
  }
  SpMat K(static_cast<Eigen::Index>(free_count), static_cast<Eigen::Index>(free_count));
  K.setFromTriplets(triplets.begin(), triplets.end());

  BvpSolution sol;
  sol.free_dofs = free_count;
  Vec x;
  if (opts.solver == BvpSolver::Direct) {
    Eigen::SimplicialLLT<SpMat> llt(K);
    if (llt.info() != Eigen::Success) fail(ErrorKind::Assembly, "bvp system is not positive definite");
    x = llt.solve(rhs);
    sol.solver = "direct";
  } else {
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
    cg.setTolerance(opts.tolerance);
    cg.setMaxIterations(opts.max_iterations);
    cg.compute(K);
    if (cg.info() != Eigen::Success) fail(ErrorKind::Assembly, "bvp preconditioner failed");
    Vec x0 = Vec::Zero(static_cast<Eigen::Index>(free_count));
    if (opts.initial_guess) {
      if (opts.initial_guess->dofs().size() != g.dofs().size())
        fail(ErrorKind::Shape, "bvp initial guess on a different grid");
      for (std::size_t k = 0; k < unknown.size(); ++k)
        if (unknown[k] >= 0) x0(unknown[k]) = opts.initial_guess->dofs()[k];
    }
    x = cg.solveWithGuess(rhs, x0);
    sol.iterations = static_cast<int>(cg.iterations());
    sol.solver = "iterative";
  }
  const double scale = rhs.norm() > 0.0 ? rhs.norm() : 1.0;
  sol.relative_residual = (K * x - rhs).norm() / scale;

  sol.w = g;
  for (std::size_t k = 0; k < unknown.size(); ++k)
    if (unknown[k] >= 0) sol.w.dofs()[k] = x(unknown[k]);
  sol.values = sol.w.values();
  sol.values.set_description("bvp solution");
  sol.energy = energy_norm(c0, sol.w - g);
  return sol;
}

BvpSolution solve_bvp(const ConstantTensor& c0, const PotentialGrid& g, double r, const BvpOptions& opts) {
  return solve_bvp(c0, HermiteField::from_grid(g), r, opts);
}

}  // namespace hstat

namespace hstat {

BvpSolution solve_bvp_ball(const ConstantTensor& c0, const HermiteField& g, const Vec& center, double radius,
                           const BallBvpOptions& opts) {
  const int n = g.dim();
  if (n != 2) fail(ErrorKind::Parameter, "ball solver supports n = 2");
  if (c0.c0.dim() != n || center.size() != n) fail(ErrorKind::Shape, "ball bvp: dimension mismatch");
  if (!(legendre_bounds(c0.c0).lambda_min > 0.0))
    fail(ErrorKind::Ellipticity, "constant tensor is not Legendre elliptic");
  if (!(radius > 0.0) || (center.cwiseAbs().array() + radius > 1.0 + 1e-12).any())
    fail(ErrorKind::Domain, "ball must lie inside the cube");
  if (!(opts.arc_spacings > 0.0)) fail(ErrorKind::Parameter, "arc length must be positive");

  const PotentialGrid& layout = g.layout();
  const double L = g.spacing();
  const int N = g.cells();
  const Tensor4 c = c0.c0.minor_symmetrized();

  auto cell_of = [&](const Vec& x) {
    std::vector<int> cell(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d)
      cell[static_cast<std::size_t>(d)] = std::clamp(static_cast<int>(std::floor((x(d) + 1.0) / L)), 0, N - 1);
    return cell;
  };
  auto local_xi = [&](const Vec& x, const std::vector<int>& cell) {
    Vec xi(n);
    for (int d = 0; d < n; ++d) xi(d) = (x(d) + 1.0) / L - cell[static_cast<std::size_t>(d)];
    return xi;
  };

  // Stiffness over the ball, accumulated point by point into global dofs.
  const WeightedPoints pts = region_points(Region::ball(center, radius), L, 5);
  std::vector<long> unknown(g.dofs().size(), -1);
  std::size_t count = 0;
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t q = 0; q < pts.points.size(); ++q) {
    const auto cell = cell_of(pts.points[q]);
    const auto map = local_to_global(g, layout.flat_index(cell));
    for (std::size_t k : map)
      if (unknown[k] < 0) unknown[k] = static_cast<long>(count++);
    const LocalBasis b = local_basis(n, local_xi(pts.points[q], cell), L);
    std::vector<Mat> contracted(map.size(), Mat::Zero(n, n));
    for (std::size_t bi = 0; bi < map.size(); ++bi)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) contracted[bi](j, l) += c(i, j, k, l) * b.hess[bi](i, k);
    for (std::size_t ai = 0; ai < map.size(); ++ai)
      for (std::size_t bi = 0; bi < map.size(); ++bi) {
        const double v = pts.weights[q] * contracted[bi].cwiseProduct(b.hess[ai]).sum();
        if (v != 0.0) triplets.emplace_back(unknown[map[ai]], unknown[map[bi]], v);
      }
  }

  // Arc multipliers: mean value and mean normal derivative on each arc.
  const double two_pi = 2.0 * std::acos(-1.0);
  const int arcs = std::max(8, static_cast<int>(std::lround(two_pi * radius / (opts.arc_spacings * L))));
  const int sub = std::max(4, static_cast<int>(std::ceil(two_pi * radius / arcs / (0.25 * L))));
  const Rule1D& rule = gauss_legendre(5);
  Vec data = Vec::Zero(2 * arcs);
  for (int a = 0; a < arcs; ++a) {
    const long row_v = static_cast<long>(count) + 2 * a;
    const long row_n = row_v + 1;
    std::vector<double> acc_v(count, 0.0), acc_n(count, 0.0);
    std::vector<std::size_t> touched;
    for (int sidx = 0; sidx < sub; ++sidx)
      for (std::size_t r = 0; r < rule.nodes.size(); ++r) {
        const double theta = two_pi * (a + (sidx + rule.nodes[r]) / sub) / arcs;
        const double ds = rule.weights[r] * two_pi * radius / (static_cast<double>(arcs) * sub);
        Vec nu(2);
        nu << std::cos(theta), std::sin(theta);
        const Vec x = center + radius * nu;
        const auto cell = cell_of(x);
        const auto map = local_to_global(g, layout.flat_index(cell));
        const LocalBasis b = local_basis(n, local_xi(x, cell), L);
        for (std::size_t ai = 0; ai < map.size(); ++ai) {
          const long u = unknown[map[ai]];
          if (u < 0) fail(ErrorKind::Assembly, "boundary point outside the active cells");
          acc_v[static_cast<std::size_t>(u)] += ds * b.value[ai];
          acc_n[static_cast<std::size_t>(u)] += ds * b.grad[ai].dot(nu);
          touched.push_back(static_cast<std::size_t>(u));
        }
        data(2 * a) += ds * g.value(x);
        data(2 * a + 1) += ds * g.gradient(x).dot(nu);
      }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (std::size_t u : touched) {
      const auto col = static_cast<long>(u);
      triplets.emplace_back(row_v, col, acc_v[u]);
      triplets.emplace_back(col, row_v, acc_v[u]);
      triplets.emplace_back(row_n, col, acc_n[u]);
      triplets.emplace_back(col, row_n, acc_n[u]);
    }
  }

  const auto size = static_cast<Eigen::Index>(count + 2 * static_cast<std::size_t>(arcs));
  Eigen::SparseMatrix<double> K(size, size);
  K.setFromTriplets(triplets.begin(), triplets.end());
  K.makeCompressed();
  Vec rhs = Vec::Zero(size);
  rhs.tail(2 * arcs) = data;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success) fail(ErrorKind::Assembly, "ball bvp system is singular");
  const Vec x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) fail(ErrorKind::Assembly, "ball bvp solve failed");

  BvpSolution sol;
  sol.free_dofs = count;
  sol.solver = "ball-multiplier";
  sol.relative_residual = (K * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
  sol.w = g;
  for (std::size_t k = 0; k < unknown.size(); ++k)
    if (unknown[k] >= 0) sol.w.dofs()[k] = x(unknown[k]);
  sol.values = sol.w.values();
  sol.values.set_description("ball bvp solution");
  // Energy of w - g over the ball.
  const HermiteField v = sol.w - g;
  double energy = 0.0;
  for (std::size_t q = 0; q < pts.points.size(); ++q) {
    const Mat H = v.hessian(pts.points[q]);
    double e = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) e += c(i, j, k, l) * H(i, k) * H(j, l);
    energy += pts.weights[q] * e;
  }
  sol.energy = energy;
  return sol;
}

}  // namespace hstat
