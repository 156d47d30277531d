#include <doctest.h>

#include "hstat/bvp.hpp"
#include "hstat/errors.hpp"
#include "hstat/quadrature.hpp"

#include <cmath>
#include <random>

using namespace hstat;

namespace {

Vec point(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

double max_nodal_error(const BvpSolution& s, const ScalarFn& exact) {
  double err = 0.0;
  for (std::size_t i = 0; i < s.values.node_count(); ++i)
    err = std::max(err, std::abs(s.values[i] - exact(s.values.node_point(i))));
  return err;
}

/// Hermite field with random dofs on nodes at least two layers inside, so the
/// field and its gradient vanish on the cube boundary.
HermiteField random_conforming(int n, int N, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  HermiteField v(n, N);
  for (std::size_t node = 0; node < v.node_count(); ++node)
    if (v.layout().band_distance(node) >= 1)
      for (unsigned s = 0; s < v.subsets(); ++s) v.dof(node, s) = U(rng);
  return v;
}

/// e^{x1} cos x2 is harmonic, hence biharmonic.
HermiteField harmonic_field(int N) {
  return HermiteField::from_function(2, N, [](const Vec& x, unsigned s) {
    const double ex = std::exp(x(0));
    switch (s) {
      case 0: return ex * std::cos(x(1));
      case 1: return ex * std::cos(x(1));
      case 2: return -ex * std::sin(x(1));
      default: return -ex * std::sin(x(1));
    }
  });
}

/// Tensor Gauss-Legendre over every cell of the cube.
double cube_integral(int n, int N, const std::function<double(const Vec&)>& f) {
  const CellRule rule(n, 4);
  const PotentialGrid layout = PotentialGrid::zeros(n, N);
  const double h = layout.spacing();
  double sum = 0.0;
  for (std::size_t cell : cells_within(layout, 0)) {
    const Vec lo = layout.node_point(cell);
    for (std::size_t q = 0; q < rule.points.size(); ++q) sum += rule.weights[q] * f(lo + h * rule.points[q]);
  }
  return sum * std::pow(h, n);
}

}  // namespace

TEST_CASE("cubic boundary data are reproduced") {
  for (int n : {1, 2}) {
    const int N = n == 1 ? 16 : 12;
    const auto cubic = potentials::random_cubic(n, 0.5, 3);
    const PotentialGrid g = PotentialGrid::sample(n, N, cubic);
    const BvpSolution s = solve_bvp(ConstantTensor::biharmonic(n), g, 1.0);
    CHECK(max_nodal_error(s, cubic) < 1e-9);
    CHECK(s.energy < 1e-18);
    BvpOptions it;
    it.solver = BvpSolver::Iterative;
    CHECK(max_nodal_error(solve_bvp(ConstantTensor::biharmonic(n), g, 1.0, it), cubic) < 1e-9);
  }
  const auto cubic3 = potentials::random_cubic(3, 0.5, 5);
  const BvpSolution s3 = solve_bvp(ConstantTensor::biharmonic(3), PotentialGrid::sample(3, 8, cubic3), 1.0);
  CHECK(max_nodal_error(s3, cubic3) < 1e-9);
}

TEST_CASE("cubics solve any elliptic constant-coefficient problem") {
  Tensor4 c0 = Tensor4::biharmonic(2);
  Tensor4 extra = Tensor4::delta_ij_kl(2);
  extra *= 0.7;
  c0 += extra;
  const auto cubic = potentials::random_cubic(2, 0.5, 8);
  const BvpSolution s = solve_bvp(ConstantTensor::from(c0), PotentialGrid::sample(2, 12, cubic), 1.0);
  CHECK(max_nodal_error(s, cubic) < 1e-9);
}

TEST_CASE("solution is invariant under scaling of the tensor and unique") {
  const HermiteField g = harmonic_field(12);
  const ConstantTensor c1 = ConstantTensor::biharmonic(2);
  Tensor4 scaled = c1.c0;
  scaled *= 3.5;
  const BvpSolution a = solve_bvp(c1, g, 1.0);
  const BvpSolution b = solve_bvp(ConstantTensor::from(scaled), g, 1.0);
  const HermiteField diff = a.w - b.w;
  for (double d : diff.dofs()) CHECK(std::abs(d) < 1e-12);

  BvpOptions it;
  it.solver = BvpSolver::Iterative;
  const BvpSolution i0 = solve_bvp(c1, g, 1.0, it);
  std::mt19937_64 rng(2);
  it.initial_guess = random_conforming(2, 12, rng);
  const BvpSolution i1 = solve_bvp(c1, g, 1.0, it);
  CHECK(i0.iterations > 0);
  CHECK(i0.relative_residual < 1e-10);
  const HermiteField d01 = i0.w - i1.w;
  for (double d : d01.dofs()) CHECK(std::abs(d) < 1e-8);
  const HermiteField dd = i0.w - a.w;
  for (double d : dd.dofs()) CHECK(std::abs(d) < 1e-8);
}

TEST_CASE("solver clamps the boundary band and respects the half-width") {
  const HermiteField g = harmonic_field(16);
  const BvpSolution s = solve_bvp(ConstantTensor::biharmonic(2), g, 0.5);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const Vec x = g.layout().node_point(node);
    if (x.cwiseAbs().maxCoeff() >= 0.5 - 1e-12)
      for (unsigned sub = 0; sub < 4; ++sub) CHECK(s.w.dof(node, sub) == g.dof(node, sub));
  }
  CHECK(s.free_dofs == 7u * 7u * 4u);
}

TEST_CASE("non-elliptic tensors are rejected") {
  // delta^{ij} delta^{kl} gives (tr s)^2, which vanishes on trace-free s
  const ConstantTensor bad = ConstantTensor::from(Tensor4::delta_ij_kl(2));
  try {
    solve_bvp(bad, PotentialGrid::zeros(2, 8), 1.0);
    FAIL("expected an ellipticity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Ellipticity);
  }
}

TEST_CASE("h-refinement converges at second order in the H2 seminorm") {
  std::vector<double> errs;
  for (int N : {8, 16, 32}) {
    const HermiteField g = harmonic_field(N);
    const BvpSolution s = solve_bvp(ConstantTensor::biharmonic(2), g, 1.0);
    const HermiteField e = s.w - g;
    errs.push_back(std::sqrt(hessian_norm2(e)) + 1e-300);
    // the biharmonic interpolant error itself; s.w - g measures the deviation
    // from the exact dofs of the solution
  }
  CHECK(errs[0] / errs[1] > 3.5);
  CHECK(errs[1] / errs[2] > 3.5);
}

TEST_CASE("energy norm") {
  const ConstantTensor bh = ConstantTensor::biharmonic(2);
  CHECK(energy_norm(bh, HermiteField(2, 8)) == 0.0);
  std::mt19937_64 rng(6);
  const HermiteField v = random_conforming(2, 8, rng);
  const double lap2 = cube_integral(2, 8, [&](const Vec& x) {
    const double l = v.hessian(x).trace();
    return l * l;
  });
  CHECK(energy_norm(bh, v) == doctest::Approx(lap2).epsilon(1e-10));
  const double h2 = cube_integral(2, 8, [&](const Vec& x) { return v.hessian(x).squaredNorm(); });
  CHECK(hessian_norm2(v) == doctest::Approx(h2).epsilon(1e-10));
}

TEST_CASE("energy norm sandwich") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> U(-0.3, 0.3);
  Tensor4 c0 = Tensor4::biharmonic(2);
  for (double& x : c0.data()) x += U(rng);
  const ConstantTensor ct = ConstantTensor::from(c0);
  REQUIRE(ct.lambda > 0.0);
  const double lam2 = legendre_bounds(c0).lambda_max;
  for (int t = 0; t < 20; ++t) {
    const HermiteField v = random_conforming(2, 8, rng);
    const double e = energy_norm(ct, v), h2 = hessian_norm2(v);
    CHECK(e >= ct.lambda * h2 * (1 - 1e-12));
    CHECK(e <= lam2 * h2 * (1 + 1e-12));
  }
}

TEST_CASE("hermite field interpolation and from_grid") {
  const auto cubic = potentials::random_cubic(2, 0.5, 1);
  const PotentialGrid g = PotentialGrid::sample(2, 8, cubic);
  const HermiteField h = HermiteField::from_grid(g);
  for (const Vec& x : {point({0.13, -0.71}), point({-0.9, 0.4}), point({0.55, 0.05})}) {
    CHECK(h.value(x) == doctest::Approx(cubic(x)).epsilon(1e-12));
    const double s = 1e-5;
    for (int d = 0; d < 2; ++d) {
      Vec e = Vec::Zero(2);
      e(d) = s;
      CHECK(h.gradient(x)(d) == doctest::Approx((cubic(x + e) - cubic(x - e)) / (2 * s)).epsilon(1e-7));
    }
  }
  const PotentialGrid back = h.values();
  for (std::size_t i = 0; i < g.node_count(); ++i) CHECK(back[i] == g[i]);
}

TEST_CASE("disk solver reproduces the radial solution") {
  const HermiteField q = HermiteField::from_function(2, 16, [](const Vec& x, unsigned s) {
    const double r2 = x.squaredNorm();
    switch (s) {
      case 0: return r2 * r2;
      case 1: return 4 * x(0) * r2;
      case 2: return 4 * x(1) * r2;
      default: return 8 * x(0) * x(1);
    }
  });
  const BvpSolution d = solve_bvp_ball(ConstantTensor::biharmonic(2), q, Vec::Zero(2), 1.0);
  double err = 0.0;
  for (std::size_t i = 0; i < d.values.node_count(); ++i) {
    const Vec x = d.values.node_point(i);
    if (x.norm() < 1.0) err = std::max(err, std::abs(d.values[i] - (2 * x.squaredNorm() - 1)));
  }
  CHECK(err < 1e-3);
}
