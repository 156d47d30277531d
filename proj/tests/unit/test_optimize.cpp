#include <doctest.h>

#include "hstat/errors.hpp"
#include "hstat/flatphase.hpp"
#include "hstat/graph.hpp"
#include "hstat/optimize.hpp"
#include "hstat/variation.hpp"

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

Mat sample_matrix() {
  Mat M(2, 2);
  M << 0.3, 0.1, 0.1, -0.2;
  return M;
}

std::vector<TestFunction> probe_bumps() {
  std::vector<TestFunction> out;
  for (double cx : {-0.25, 0.0, 0.25})
    for (double cy : {-0.2, 0.2}) out.emplace_back(point({cx, cy}), 0.3);
  for (double cx : {-0.1, 0.1})
    for (double cy : {-0.05, 0.05}) out.emplace_back(point({cx, cy}), 0.4);
  return out;
}

/// Uniform noise of size amp * h^2 on the free nodes, so the centered
/// Hessian moves by at most 4 amp.
PotentialGrid interior_noise(const PotentialGrid& u, double amp, std::uint64_t seed) {
  amp *= u.spacing() * u.spacing();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-amp, amp);
  PotentialGrid out = u;
  for (std::size_t i = 0; i < out.node_count(); ++i)
    if (!out.clamped(i)) out[i] += U(rng);
  return out;
}

}  // namespace

TEST_CASE("discrete gradient vanishes on quadratics in the flat metric") {
  const PotentialGrid q = PotentialGrid::sample(2, 24, potentials::quadratic(sample_matrix()));
  CHECK(discrete_gradient(MetricField::flat(2), q).max_abs() < 1e-10);
}

TEST_CASE("discrete gradient matches central differences of the volume") {
  const MetricField m = MetricField::random_trig(2, 0.05, 2);
  const PotentialGrid u = PotentialGrid::sample(2, 16, potentials::sincos(0.2));
  const PotentialGrid G = discrete_gradient(m, u);
  const PotentialGrid delta = interior_noise(PotentialGrid::zeros(2, 16), 1.0, 4);
  double dir = 0.0;
  for (std::size_t i = 0; i < u.node_count(); ++i) dir += G[i] * delta[i];
  const double t = 1e-5;
  const double fd = (interior_volume(u + delta * t, m) - interior_volume(u + delta * -t, m)) / (2 * t);
  CHECK(std::abs(dir - fd) / std::abs(fd) < 1e-5);
  for (std::size_t i = 0; i < u.node_count(); ++i)
    if (u.clamped(i)) CHECK(G[i] == 0.0);
}

TEST_CASE("discrete gradient pairs with nodal test functions like the weak residual") {
  const MetricField m = MetricField::conformal(2, 0.1);
  const PotentialGrid u = PotentialGrid::sample(2, 32, potentials::sincos(0.2));
  const PotentialGrid G = discrete_gradient(m, u);
  const PotentialGrid eta = TestFunction(point({0.1, -0.2}), 0.4).sample(32);
  double dot = 0.0;
  for (std::size_t i = 0; i < u.node_count(); ++i) dot += G[i] * eta[i];
  CHECK(dot == doctest::Approx(weak_residual(m, u, eta)).epsilon(1e-11));
}

TEST_CASE("discrete gradient scales with the metric") {
  const MetricField m = MetricField::random_trig(2, 0.05, 6);
  const PotentialGrid u = PotentialGrid::sample(2, 16, potentials::sincos(0.2));
  const double s = 0.2;
  const PotentialGrid G = discrete_gradient(m, u), Gs = discrete_gradient(scale_metric(m, s), u);
  for (std::size_t i = 0; i < u.node_count(); ++i) CHECK(Gs[i] == doctest::Approx((1 + s) * G[i]).epsilon(1e-12));
}

TEST_CASE("flat minimization recovers the quadratic") {
  const PotentialGrid q = PotentialGrid::sample(2, 24, potentials::quadratic(sample_matrix()));
  const PotentialGrid start = interior_noise(q, 5e-2, 5);
  const MinimizeResult r = minimize(MetricField::flat(2), start);
  CHECK(r.converged);
  CHECK(r.grad_norm <= 1e-8);
  CHECK(r.final_volume <= r.initial_volume);
  for (std::size_t k = 1; k < r.volume_history.size(); ++k)
    CHECK(r.volume_history[k] <= r.volume_history[k - 1] * (1 + 1e-12));
  CHECK((r.u - q).max_abs() < 1e-4);
  // local convexity along the segment from the output to the start
  const double v0 = interior_volume(r.u, MetricField::flat(2));
  for (double s : {0.25, 0.5, 1.0})
    CHECK(interior_volume(r.u + (start - r.u) * s, MetricField::flat(2)) >= v0);
  // Hamiltonian stationarity: the phase is weakly harmonic
  for (const TestFunction& eta : probe_bumps()) CHECK(std::abs(phase_pairing(r.u, eta)) < 1e-5);
}

TEST_CASE("flat minimization in one dimension with linear data") {
  const PotentialGrid lin = PotentialGrid::sample(1, 32, [](const Vec& x) { return 0.3 * x(0) - 0.1; });
  const MinimizeResult r = minimize(MetricField::flat(1), interior_noise(lin, 5e-2, 8));
  CHECK(r.converged);
  CHECK((r.u - lin).max_abs() < 1e-9);
}

TEST_CASE("conformal minimization passes the residual audit") {
  const MetricField m = MetricField::conformal(2, 0.05);
  const PotentialGrid q = PotentialGrid::sample(2, 24, potentials::quadratic(sample_matrix()));
  const MinimizeResult r = minimize(m, q);
  CHECK(r.converged);
  CHECK(r.grad_norm <= 1e-8);
  CHECK(r.final_volume < r.initial_volume);
  for (const TestFunction& eta : probe_bumps()) CHECK(std::abs(weak_residual(m, r.u, eta)) < 1e-6);
}

TEST_CASE("steep data are rejected") {
  const PotentialGrid steep = PotentialGrid::sample(2, 16, potentials::paraboloid(1.5));
  CHECK(max_hessian_norm(steep) == doctest::Approx(1.5).epsilon(1e-10));
  try {
    minimize(MetricField::flat(2), steep);
    FAIL("expected a steepness error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Steepness);
  }
}

TEST_CASE("iteration limit returns an unconverged result") {
  MinimizeConfig cfg;
  cfg.max_iters = 1;
  const PotentialGrid q = PotentialGrid::sample(2, 16, potentials::quadratic(sample_matrix()));
  const MinimizeResult r = minimize(MetricField::flat(2), interior_noise(q, 5e-2, 1), cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
}
