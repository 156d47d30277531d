#include "hstat/quadrature.hpp"

#include "hstat/errors.hpp"
#include "hstat/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hstat {

const Rule1D& gauss_legendre(int points) {
  static const std::array<Rule1D, 5> rules = [] {
    std::array<Rule1D, 5> r;
    const std::vector<std::vector<double>> x = {
        {0.0},
        {-0.5773502691896257645},
        {-0.7745966692414833770, 0.0},
        {-0.8611363115940525752, -0.3399810435848562648},
        {-0.9061798459386639928, -0.5384693101056830910, 0.0}};
    const std::vector<std::vector<double>> w = {
        {2.0},
        {1.0},
        {0.5555555555555555556, 0.8888888888888888889},
        {0.3478548451374538574, 0.6521451548625461426},
        {0.2369268850561890875, 0.4786286704993664680, 0.5688888888888888889}};
    for (int p = 1; p <= 5; ++p) {
      Rule1D& rule = r[static_cast<std::size_t>(p - 1)];
      const auto& xs = x[static_cast<std::size_t>(p - 1)];
      const auto& ws = w[static_cast<std::size_t>(p - 1)];
      std::vector<std::pair<double, double>> full;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        full.emplace_back(xs[k], ws[k]);
        if (xs[k] != 0.0) full.emplace_back(-xs[k], ws[k]);
      }
      std::sort(full.begin(), full.end());
      for (auto [xi, wi] : full) {
        rule.nodes.push_back(0.5 * (xi + 1.0));
        rule.weights.push_back(0.5 * wi);
      }
    }
    return r;
  }();
  if (points < 1 || points > 5) fail(ErrorKind::Parameter, "Gauss-Legendre rule supports 1..5 points");
  return rules[static_cast<std::size_t>(points - 1)];
}

CellRule::CellRule(int n, int points_per_axis) : dim(n) {
  const Rule1D& r = gauss_legendre(points_per_axis);
  const auto q = static_cast<int>(r.nodes.size());
  int total = 1;
  for (int d = 0; d < n; ++d) total *= q;
  for (int k = 0; k < total; ++k) {
    Vec p(n);
    double w = 1.0;
    int rem = k;
    for (int d = n - 1; d >= 0; --d) {
      const int a = rem % q;
      rem /= q;
      p(d) = r.nodes[static_cast<std::size_t>(a)];
      w *= r.weights[static_cast<std::size_t>(a)];
    }
    std::vector<double> cw(static_cast<std::size_t>(1 << n));
    for (int c = 0; c < (1 << n); ++c) {
      double v = 1.0;
      for (int d = 0; d < n; ++d) v *= ((c >> d) & 1) ? p(d) : 1.0 - p(d);
      cw[static_cast<std::size_t>(c)] = v;
    }
    points.push_back(std::move(p));
    weights.push_back(w);
    corner_weights.push_back(std::move(cw));
  }
}

std::vector<std::size_t> cells_within(const PotentialGrid& grid, int lo) {
  const int n = grid.dim();
  const int N = grid.cells();
  std::vector<std::size_t> out;
  if (N - 2 * lo < 1) return out;
  std::vector<int> idx(static_cast<std::size_t>(n), lo);
  while (true) {
    out.push_back(grid.flat_index(idx));
    int d = n - 1;
    while (d >= 0) {
      if (++idx[static_cast<std::size_t>(d)] <= N - lo - 1) break;
      idx[static_cast<std::size_t>(d)] = lo;
      --d;
    }
    if (d < 0) break;
  }
  return out;
}

std::vector<std::size_t> corner_offsets(const PotentialGrid& grid) {
  const int n = grid.dim();
  std::vector<std::size_t> off(static_cast<std::size_t>(1 << n), 0);
  for (int c = 0; c < (1 << n); ++c)
    for (int d = 0; d < n; ++d)
      if ((c >> d) & 1) off[static_cast<std::size_t>(c)] += grid.stride(d);
  return off;
}

Region Region::ball(const Vec& center, double radius) {
  if (!(radius > 0.0)) fail(ErrorKind::Parameter, "ball radius must be positive");
  return {Kind::Ball, center, radius};
}

Region Region::box(const Vec& center, double half_width) {
  if (!(half_width > 0.0)) fail(ErrorKind::Parameter, "box half-width must be positive");
  return {Kind::Box, center, half_width};
}

Region Region::unit_ball(int n) { return ball(Vec::Zero(n), 1.0); }

Region Region::cube(int n) { return box(Vec::Zero(n), 1.0); }

Region Region::interior(const PotentialGrid& grid) {
  return box(Vec::Zero(grid.dim()), 1.0 - grid.spacing());
}

bool Region::contains(const Vec& x, double tol) const {
  if (kind == Kind::Ball) return (x - center).norm() <= radius + tol;
  return (x - center).cwiseAbs().maxCoeff() <= radius + tol;
}

namespace {

// Split [lo, hi] at the grid lines -1 + k * spacing and at the extra
// breakpoints.
std::vector<std::pair<double, double>> cell_pieces(double lo, double hi, double spacing,
                                                   std::vector<double> extra = {}) {
  std::vector<std::pair<double, double>> out;
  if (!(hi > lo)) return out;
  long k = static_cast<long>(std::floor((lo + 1.0) / spacing)) + 1;
  while (true) {
    const double line = -1.0 + static_cast<double>(k) * spacing;
    if (line >= hi) break;
    extra.push_back(line);
    ++k;
  }
  std::sort(extra.begin(), extra.end());
  double a = lo;
  for (double b : extra) {
    if (b <= a + 1e-14 || b >= hi - 1e-14) continue;
    out.emplace_back(a, b);
    a = b;
  }
  out.emplace_back(a, hi);
  return out;
}

struct RegionWalker {
  const Region& region;
  double spacing;
  const Rule1D& rule;
  int n;
  WeightedPoints out;
  Vec x;

  void walk(int d, double rho2, double weight) {
    const double c = region.center(d);
    double lo, hi, rho = 0.0;
    if (region.kind == Region::Kind::Ball) {
      if (rho2 <= 0.0) return;
      rho = std::sqrt(rho2);
      lo = std::max(c - rho, -1.0);
      hi = std::min(c + rho, 1.0);
    } else {
      lo = std::max(c - region.radius, -1.0);
      hi = std::min(c + region.radius, 1.0);
    }
    const bool last = (d == n - 1);
    const bool substitute = (region.kind == Region::Kind::Ball) && !last;
    // Where the section boundary crosses a grid line of the next axis the
    // inner integral has a kink; break there as well.
    std::vector<double> kinks;
    if (substitute) {
      const double cn = region.center(d + 1);
      const long k0 = static_cast<long>(std::ceil((cn - rho + 1.0) / spacing));
      for (long k = k0;; ++k) {
        const double line = -1.0 + static_cast<double>(k) * spacing;
        if (line >= cn + rho) break;
        const double r2 = rho2 - (line - cn) * (line - cn);
        if (r2 <= 0.0) continue;
        kinks.push_back(c - std::sqrt(r2));
        kinks.push_back(c + std::sqrt(r2));
      }
    }
    for (auto [a, b] : cell_pieces(lo, hi, spacing, std::move(kinks))) {
      if (substitute) {
        const double ta = std::asin(std::clamp((a - c) / rho, -1.0, 1.0));
        const double tb = std::asin(std::clamp((b - c) / rho, -1.0, 1.0));
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double t = ta + (tb - ta) * rule.nodes[q];
          const double w = (tb - ta) * rule.weights[q] * rho * std::cos(t);
          x(d) = c + rho * std::sin(t);
          const double dz = x(d) - c;
          next(d, rho2 - dz * dz, weight * w);
        }
      } else {
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          x(d) = a + (b - a) * rule.nodes[q];
          const double w = (b - a) * rule.weights[q];
          const double dz = x(d) - c;
          next(d, rho2 - dz * dz, weight * w);
        }
      }
    }
  }

  void next(int d, double rho2, double weight) {
    if (d == n - 1) {
      out.points.push_back(x);
      out.weights.push_back(weight);
    } else {
      walk(d + 1, rho2, weight);
    }
  }
};

}  // namespace

WeightedPoints region_points(const Region& region, double spacing, int points_per_axis) {
  const int n = static_cast<int>(region.center.size());
  if (n < 1) fail(ErrorKind::Shape, "region center has no coordinates");
  RegionWalker walker{region, spacing, gauss_legendre(points_per_axis), n, {}, Vec::Zero(n)};
  walker.walk(0, region.radius * region.radius, 1.0);
  return std::move(walker.out);
}

}  // namespace hstat
