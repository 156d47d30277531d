#include "hstat/grid.hpp"

#include "hstat/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

namespace hstat {

PotentialGrid::PotentialGrid(int n, int N, std::vector<double> values, std::string description)
    : n_(n), N_(N), values_(std::move(values)), description_(std::move(description)) {
  if (n < 1) fail(ErrorKind::Parameter, "grid dimension must be >= 1");
  if (N < 8) fail(ErrorKind::Parameter, "grid needs N >= 8 cells per axis");
  std::size_t count = 1;
  strides_.assign(static_cast<std::size_t>(n), 1);
  for (int d = n - 1; d >= 0; --d) {
    strides_[static_cast<std::size_t>(d)] = count;
    count *= static_cast<std::size_t>(N + 1);
  }
  if (values_.size() != count) {
    std::ostringstream os;
    os << "grid expects " << count << " node values, got " << values_.size();
    fail(ErrorKind::Shape, os.str());
  }
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorKind::Parameter, "grid values must be finite");
}

PotentialGrid PotentialGrid::sample(int n, int N, const ScalarFn& f, std::string description) {
  PotentialGrid g = zeros(n, N);
  for (std::size_t i = 0; i < g.node_count(); ++i) g.values_[i] = f(g.node_point(i));
  for (double v : g.values_)
    if (!std::isfinite(v)) fail(ErrorKind::Parameter, "sampled potential is not finite");
  g.description_ = std::move(description);
  return g;
}

PotentialGrid PotentialGrid::zeros(int n, int N) {
  std::size_t count = 1;
  for (int d = 0; d < n; ++d) count *= static_cast<std::size_t>(N + 1);
  return PotentialGrid(n, N, std::vector<double>(count, 0.0));
}

std::vector<int> PotentialGrid::multi_index(std::size_t node) const {
  std::vector<int> idx(static_cast<std::size_t>(n_));
  for (int d = 0; d < n_; ++d) {
    idx[static_cast<std::size_t>(d)] = static_cast<int>(node / strides_[static_cast<std::size_t>(d)]);
    node %= strides_[static_cast<std::size_t>(d)];
  }
  return idx;
}

std::size_t PotentialGrid::flat_index(const std::vector<int>& idx) const {
  std::size_t k = 0;
  for (int d = 0; d < n_; ++d)
    k += static_cast<std::size_t>(idx[static_cast<std::size_t>(d)]) * strides_[static_cast<std::size_t>(d)];
  return k;
}

Vec PotentialGrid::node_point(std::size_t node) const {
  Vec x(n_);
  const double h = spacing();
  for (int d = 0; d < n_; ++d) {
    const auto i = node / strides_[static_cast<std::size_t>(d)];
    node %= strides_[static_cast<std::size_t>(d)];
    x(d) = -1.0 + static_cast<double>(i) * h;
  }
  return x;
}

std::size_t PotentialGrid::nearest_node(const Vec& x) const {
  std::vector<int> idx(static_cast<std::size_t>(n_));
  for (int d = 0; d < n_; ++d) {
    const long i = std::lround((x(d) + 1.0) / spacing());
    idx[static_cast<std::size_t>(d)] = static_cast<int>(std::clamp<long>(i, 0, N_));
  }
  return flat_index(idx);
}

int PotentialGrid::band_distance(std::size_t node) const {
  int dist = N_;
  for (int d = 0; d < n_; ++d) {
    const int i = static_cast<int>(node / strides_[static_cast<std::size_t>(d)]);
    node %= strides_[static_cast<std::size_t>(d)];
    dist = std::min({dist, i, N_ - i});
  }
  return dist;
}

PotentialGrid PotentialGrid::operator+(const PotentialGrid& o) const {
  if (o.n_ != n_ || o.N_ != N_) fail(ErrorKind::Shape, "grid shapes differ");
  PotentialGrid r = *this;
  for (std::size_t i = 0; i < values_.size(); ++i) r.values_[i] += o.values_[i];
  return r;
}

PotentialGrid PotentialGrid::operator-(const PotentialGrid& o) const { return *this + o * -1.0; }

PotentialGrid PotentialGrid::operator*(double s) const {
  PotentialGrid r = *this;
  for (double& v : r.values_) v *= s;
  return r;
}

double PotentialGrid::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Stencil1D first_difference(int i, int N, double dx, bool one_sided) {
  if (i >= 1 && i <= N - 1) return {{-1, -0.5 / dx}, {1, 0.5 / dx}};
  if (!one_sided) fail(ErrorKind::Stencil, "centered first difference needs an interior node");
  const double s = (i == 0) ? 1.0 : -1.0;
  return {{0, -1.5 * s / dx}, {static_cast<int>(s), 2.0 * s / dx}, {static_cast<int>(2 * s), -0.5 * s / dx}};
}

Stencil1D second_difference(int i, int N, double dx, bool one_sided) {
  const double h2 = dx * dx;
  if (i >= 1 && i <= N - 1) return {{-1, 1.0 / h2}, {0, -2.0 / h2}, {1, 1.0 / h2}};
  if (!one_sided) fail(ErrorKind::Stencil, "centered second difference needs an interior node");
  const int s = (i == 0) ? 1 : -1;
  return {{0, 2.0 / h2}, {s, -5.0 / h2}, {2 * s, 4.0 / h2}, {3 * s, -1.0 / h2}};
}

namespace {

void nodal_derivatives(const PotentialGrid& u, std::size_t node, bool one_sided, double* grad,
                       double* hess) {
  const int n = u.dim();
  const int N = u.cells();
  const double dx = u.spacing();
  const auto idx = u.multi_index(node);
  std::vector<Stencil1D> first(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) first[static_cast<std::size_t>(d)] = first_difference(idx[static_cast<std::size_t>(d)], N, dx, one_sided);

  const auto& v = u.values();
  for (int d = 0; d < n; ++d) {
    const auto st = static_cast<std::ptrdiff_t>(u.stride(d));
    double g = 0.0;
    for (auto [off, c] : first[static_cast<std::size_t>(d)]) g += c * v[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(node) + off * st)];
    grad[d] = g;

    double h = 0.0;
    for (auto [off, c] : second_difference(idx[static_cast<std::size_t>(d)], N, dx, one_sided))
      h += c * v[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(node) + off * st)];
    hess[d * n + d] = h;

    for (int e = d + 1; e < n; ++e) {
      const auto se = static_cast<std::ptrdiff_t>(u.stride(e));
      double m = 0.0;
      for (auto [oa, ca] : first[static_cast<std::size_t>(d)])
        for (auto [ob, cb] : first[static_cast<std::size_t>(e)])
          m += ca * cb * v[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(node) + oa * st + ob * se)];
      hess[d * n + e] = m;
      hess[e * n + d] = m;
    }
  }
}

}  // namespace

Vec gradient(const PotentialGrid& u, std::size_t node) {
  Vec g(u.dim());
  std::vector<double> h(static_cast<std::size_t>(u.dim() * u.dim()));
  nodal_derivatives(u, node, false, g.data(), h.data());
  return g;
}

Mat hessian(const PotentialGrid& u, std::size_t node) {
  const int n = u.dim();
  Vec g(n);
  Mat h(n, n);
  nodal_derivatives(u, node, false, g.data(), h.data());
  return h;
}

DerivativeField::DerivativeField(const PotentialGrid& u, Boundary mode)
    : grid_(&u), n_(u.dim()), mode_(mode) {
  const auto nn = u.node_count();
  grad_.assign(nn * static_cast<std::size_t>(n_), 0.0);
  hess_.assign(nn * static_cast<std::size_t>(n_ * n_), 0.0);
  for (std::size_t p = 0; p < nn; ++p) {
    if (!available(p)) continue;
    nodal_derivatives(u, p, mode_ == Boundary::OneSided, &grad_[p * static_cast<std::size_t>(n_)],
                      &hess_[p * static_cast<std::size_t>(n_ * n_)]);
  }
}

bool DerivativeField::available(std::size_t node) const {
  return mode_ == Boundary::OneSided || grid_->band_distance(node) >= 1;
}

Vec DerivativeField::grad(std::size_t node) const {
  return Eigen::Map<const Vec>(grad_ptr(node), n_);
}

Mat DerivativeField::hess(std::size_t node) const {
  return Eigen::Map<const Mat>(hess_ptr(node), n_, n_);
}

Jet DerivativeField::at(const Vec& x) const {
  const int N = grid_->cells();
  const double h = grid_->spacing();
  std::vector<int> base(static_cast<std::size_t>(n_));
  std::vector<double> t(static_cast<std::size_t>(n_));
  for (int d = 0; d < n_; ++d) {
    const double s = (x(d) + 1.0) / h;
    if (s < -1e-9 || s > N + 1e-9) fail(ErrorKind::Domain, "point outside the grid cube");
    const int i = std::clamp(static_cast<int>(std::floor(s)), 0, N - 1);
    base[static_cast<std::size_t>(d)] = i;
    t[static_cast<std::size_t>(d)] = s - i;
  }
  Jet jet{Vec::Zero(n_), Mat::Zero(n_, n_)};
  const std::size_t b0 = grid_->flat_index(base);
  for (int corner = 0; corner < (1 << n_); ++corner) {
    double w = 1.0;
    std::size_t node = b0;
    for (int d = 0; d < n_; ++d) {
      const bool up = (corner >> d) & 1;
      w *= up ? t[static_cast<std::size_t>(d)] : 1.0 - t[static_cast<std::size_t>(d)];
      if (up) node += grid_->stride(d);
    }
    if (!available(node)) fail(ErrorKind::Stencil, "derivatives unavailable in this cell");
    jet.du += w * grad(node);
    jet.d2u += w * hess(node);
  }
  return jet;
}

double interpolate_cubic(const PotentialGrid& u, const Vec& x) {
  const int n = u.dim();
  const int N = u.cells();
  const double h = u.spacing();
  std::vector<int> base(static_cast<std::size_t>(n));
  std::vector<std::array<double, 4>> w(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    const double s = (x(d) + 1.0) / h;
    if (s < -1e-9 || s > N + 1e-9) fail(ErrorKind::Domain, "interpolation point outside the grid cube");
    const int i = std::clamp(static_cast<int>(std::floor(s)), 0, N - 1);
    const int b = std::clamp(i - 1, 0, N - 3);
    base[static_cast<std::size_t>(d)] = b;
    const double r = s - b;  // position relative to node b, nodes at 0,1,2,3
    for (int a = 0; a < 4; ++a) {
      double l = 1.0;
      for (int c = 0; c < 4; ++c)
        if (c != a) l *= (r - c) / static_cast<double>(a - c);
      w[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)] = l;
    }
  }
  const std::size_t b0 = u.flat_index(base);
  double sum = 0.0;
  int total = 1;
  for (int d = 0; d < n; ++d) total *= 4;
  for (int k = 0; k < total; ++k) {
    int rem = k;
    double weight = 1.0;
    std::size_t node = b0;
    for (int d = 0; d < n; ++d) {
      const int a = rem % 4;
      rem /= 4;
      weight *= w[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)];
      node += static_cast<std::size_t>(a) * u.stride(d);
    }
    sum += weight * u[node];
  }
  return sum;
}

PotentialGrid rescale_potential(const PotentialGrid& u, const Vec& x0, double r) {
  const int n = u.dim();
  if (x0.size() != n) fail(ErrorKind::Shape, "rescale center has wrong dimension");
  if (!(r > 0.0)) fail(ErrorKind::Parameter, "rescale factor must be positive");
  for (int d = 0; d < n; ++d)
    if (x0(d) - r < -1.0 - 1e-12 || x0(d) + r > 1.0 + 1e-12)
      fail(ErrorKind::Domain, "rescaled image cube leaves the grid domain");
  if (r == 1.0 && x0.isZero(0.0)) return u;

  PotentialGrid v = PotentialGrid::zeros(n, u.cells());
  const double inv = 1.0 / (r * r);
  for (std::size_t p = 0; p < v.node_count(); ++p) {
    Vec x = x0 + r * v.node_point(p);
    x = x.cwiseMax(-1.0).cwiseMin(1.0);
    v[p] = inv * interpolate_cubic(u, x);
  }
  std::ostringstream os;
  os << "rescale(" << u.description() << ", r=" << r << ")";
  v.set_description(os.str());
  return v;
}

namespace potentials {

ScalarFn zero() {
  return [](const Vec&) { return 0.0; };
}

ScalarFn paraboloid(double c) {
  return [c](const Vec& x) { return 0.5 * c * x.squaredNorm(); };
}

ScalarFn quadratic(const Mat& M) {
  return [M](const Vec& x) { return 0.5 * x.dot(M * x); };
}

ScalarFn sincos(double a) {
  return [a](const Vec& x) {
    return x.size() >= 2 ? a * std::sin(x(0)) * std::cos(x(1)) : a * std::sin(x(0));
  };
}

ScalarFn cubic_harmonic() {
  return [](const Vec& x) { return x(0) * x(0) * x(0) - 3.0 * x(0) * x(1) * x(1); };
}

ScalarFn quartic() {
  return [](const Vec& x) { return x.squaredNorm() * x.squaredNorm(); };
}

ScalarFn random_cubic(int n, double a, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> exps;
  std::vector<double> coefs;
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  // Enumerate exponent vectors of total degree <= 3.
  std::function<void(int, int)> rec = [&](int d, int left) {
    if (d == n) {
      exps.push_back(e);
      coefs.push_back(a * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[static_cast<std::size_t>(d)] = k;
      rec(d + 1, left - k);
    }
  };
  rec(0, 3);
  return [exps, coefs](const Vec& x) {
    double s = 0.0;
    for (std::size_t m = 0; m < exps.size(); ++m) {
      double t = coefs[m];
      for (std::size_t d = 0; d < exps[m].size(); ++d) t *= std::pow(x(static_cast<Eigen::Index>(d)), exps[m][d]);
      s += t;
    }
    return s;
  };
}

}  // namespace potentials

}  // namespace hstat
