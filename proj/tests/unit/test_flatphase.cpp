#include <doctest.h>

#include "hstat/errors.hpp"
#include "hstat/flatphase.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace hstat;

namespace {

Vec point(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

}  // namespace

TEST_CASE("phase of simple Hessians") {
  const double c = 0.7;
  CHECK(phase(c * Mat::Identity(2, 2)) == doctest::Approx(2 * std::atan(c)).epsilon(1e-15));
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  CHECK(std::abs(phase(d)) < 1e-15);

  Mat a(2, 2);
  a << 0.3, 0.1, 0.1, -0.2;
  const double tr = a.trace(), det = a.determinant();
  const double disc = std::sqrt(tr * tr / 4 - det);
  CHECK(phase(a) == doctest::Approx(std::atan(tr / 2 + disc) + std::atan(tr / 2 - disc)).epsilon(1e-12));
  // arctan addition: atan l1 + atan l2 = atan(tr / (1 - det)) when det < 1
  CHECK(phase(a) == doctest::Approx(std::atan(tr / (1 - det))).epsilon(1e-12));
}

TEST_CASE("phase is orthogonally invariant and odd") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int n : {2, 3}) {
    for (int t = 0; t < 10; ++t) {
      Mat m(n, n), r(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = U(rng);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m(i, j) = m(j, i) = U(rng);
      const Mat q = Eigen::HouseholderQR<Mat>(r).householderQ();
      const Mat mq = q.transpose() * m * q;
      CHECK(phase(0.5 * (mq + mq.transpose())) == doctest::Approx(phase(m)).epsilon(1e-12));
      CHECK(phase(-m) == doctest::Approx(-phase(m)).epsilon(1e-14));
      CHECK(std::abs(phase(m)) <= n * std::numbers::pi / 2);
    }
  }
}

TEST_CASE("phase rejects non-symmetric input") {
  Mat a(2, 2);
  a << 0.0, 1.0, 0.0, 0.0;
  try {
    phase(a);
    FAIL("expected a shape error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Shape);
  }
}

TEST_CASE("phase field on a grid") {
  const PotentialGrid u = PotentialGrid::sample(2, 16, potentials::sincos(0.8));
  const PhaseField pf = phase_field(u);
  for (std::size_t node = 0; node < u.node_count(); ++node) {
    CHECK(std::abs(pf.theta[node]) <= std::numbers::pi);
    if (u.band_distance(node) >= 1) {
      const Vec& ev = pf.eigenvalues[node];
      CHECK(pf.theta[node] == doctest::Approx(std::atan(ev(0)) + std::atan(ev(1))).epsilon(1e-14));
    }
  }
}

TEST_CASE("phase pairing vanishes on quadratics") {
  Mat M(2, 2);
  M << 0.4, -0.2, -0.2, 0.1;
  const PotentialGrid u = PotentialGrid::sample(2, 32, potentials::quadratic(M));
  for (double cx : {-0.2, 0.1})
    CHECK(std::abs(phase_pairing(u, TestFunction(point({cx, 0.05}), 0.4))) < 1e-10);
}

TEST_CASE("phase pairing is proportional to the flat weak residual") {
  const PotentialGrid u = PotentialGrid::sample(2, 64, potentials::sincos(0.2));
  const MetricField flat = MetricField::flat(2);
  std::vector<double> ratios;
  for (const Vec& c : {point({0.2, 0.1}), point({-0.15, 0.2}), point({0.1, -0.25})}) {
    const TestFunction eta(c, 0.45);
    ratios.push_back(weak_residual(flat, u, eta) / phase_pairing(u, eta));
  }
  for (double r : ratios) CHECK(r == doctest::Approx(ratios.front()).epsilon(2e-3));
}
