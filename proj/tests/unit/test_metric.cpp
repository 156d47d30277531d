#include <doctest.h>

#include "hstat/errors.hpp"
#include "hstat/metric.hpp"

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

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("flat metric has zero blocks and zero y-derivatives") {
  const MetricField m = MetricField::flat(2);
  const MetricBlocks b = m.eval(point({0.3, -0.2}), point({0.1, 0.4}));
  CHECK(max_abs(b.A) == 0.0);
  CHECK(max_abs(b.B) == 0.0);
  CHECK(max_abs(b.C) == 0.0);
  const MetricDyBlocks d = m.eval_dy(point({0.3, -0.2}), point({0.1, 0.4}));
  for (int k = 0; k < 2; ++k) CHECK(max_abs(d.dA[k]) + max_abs(d.dB[k]) + max_abs(d.dC[k]) == 0.0);
}

TEST_CASE("conformal preset values") {
  const MetricField m = MetricField::conformal(2, 0.1);
  const MetricBlocks o = m.eval(point({0, 0}), point({0, 0}));
  CHECK(max_abs(o.A) + max_abs(o.B) + max_abs(o.C) == 0.0);
  const MetricBlocks b = m.eval(point({0.5, 0}), point({0.3, -0.7}));
  const double e = std::exp(0.1) - 1.0;
  CHECK((b.A - e * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((b.B - e * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(max_abs(b.C) == 0.0);
  const MetricDyBlocks d = m.eval_dy(point({0.5, 0}), point({0.3, -0.7}));
  for (int k = 0; k < 2; ++k) CHECK(max_abs(d.dA[k]) + max_abs(d.dB[k]) + max_abs(d.dC[k]) == 0.0);
}

TEST_CASE("random_trig y-derivatives match central differences") {
  const MetricField m = MetricField::random_trig(2, 0.05, 7);
  const Vec x = point({0.2, -0.4}), y = point({0.3, 0.1});
  const MetricDyBlocks d = m.eval_dy(x, y);
  const double s = 1e-5;
  for (int k = 0; k < 2; ++k) {
    Vec yp = y, ym = y;
    yp(k) += s;
    ym(k) -= s;
    const MetricBlocks p = m.eval(x, yp), q = m.eval(x, ym);
    CHECK(max_abs((p.A - q.A) / (2 * s) - d.dA[k]) < 1e-8);
    CHECK(max_abs((p.B - q.B) / (2 * s) - d.dB[k]) < 1e-8);
    CHECK(max_abs((p.C - q.C) / (2 * s) - d.dC[k]) < 1e-8);
  }
}

TEST_CASE("random_trig is symmetric, bounded by epsilon, zero at the origin and seeded") {
  const double eps = 0.2;
  const MetricField m = MetricField::random_trig(3, eps, 42);
  const MetricField same = MetricField::random_trig(3, eps, 42);
  const MetricField other = MetricField::random_trig(3, eps, 43);
  const MetricBlocks o = m.eval(Vec::Zero(3), Vec::Zero(3));
  CHECK(max_abs(o.A) + max_abs(o.B) + max_abs(o.C) < 1e-15);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-0.8, 0.8);
  bool differs = false;
  for (int t = 0; t < 200; ++t) {
    Vec x(3), y(3);
    for (int i = 0; i < 3; ++i) x(i) = U(rng), y(i) = U(rng);
    const MetricBlocks b = m.eval(x, y);
    CHECK(b.A == b.A.transpose());
    CHECK(b.B == b.B.transpose());
    CHECK(max_abs(b.A) <= eps);
    CHECK(max_abs(b.B) <= eps);
    CHECK(max_abs(b.C) <= eps);
    CHECK(max_abs(same.eval(x, y).A - b.A) == 0.0);
    differs = differs || max_abs(other.eval(x, y).A - b.A) > 1e-6;
  }
  CHECK(differs);
}

TEST_CASE("eval errors") {
  // the flat metric is valid everywhere and skips the domain test
  const MetricField m = MetricField::conformal(2, 0.1);
  CHECK_NOTHROW(MetricField::flat(2).eval(point({1.5, 0}), point({1.5, 0})));
  CHECK_THROWS_AS(m.eval(point({1.5, 0}), point({1.5, 0})), Error);
  try {
    m.eval(point({1.5, 0}), point({1.5, 0}));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  // A = -2 I makes h = I + [[A, 0], [0, 0]] indefinite
  const MetricField bad(
      1, [](const Vec&, const Vec&) { return MetricBlocks{Mat::Constant(1, 1, -2.0), Mat::Zero(1, 1), Mat::Zero(1, 1)}; },
      [](const Vec&, const Vec&) {
        return MetricDyBlocks{{Mat::Zero(1, 1)}, {Mat::Zero(1, 1)}, {Mat::Zero(1, 1)}};
      },
      2.0, "bad");
  try {
    bad.eval(point({0.1}), point({0.1}));
    FAIL("expected a validity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validity);
  }
}

TEST_CASE("dilate") {
  const MetricField flat = dilate(MetricField::flat(2), 10.0);
  CHECK(max_abs(flat.eval(point({3, 1}), point({2, -4})).A) == 0.0);

  const MetricField m = MetricField::random_trig(2, 0.1, 5);
  const MetricField id = dilate(m, 1.0);
  const Vec x = point({0.3, -0.1}), y = point({0.2, 0.5});
  CHECK(max_abs(id.eval(x, y).A - m.eval(x, y).A) == 0.0);

  // composition
  const MetricField d6 = dilate(dilate(m, 2.0), 3.0), d6b = dilate(m, 6.0);
  const Vec X = point({1.4, -2.2}), Y = point({0.9, 3.1});
  CHECK(max_abs(d6.eval(X, Y).C - d6b.eval(X, Y).C) < 1e-15);

  CHECK_THROWS_AS(dilate(m, 0.5), Error);
}

TEST_CASE("dilate scales first differences by 1/R") {
  const MetricField m = MetricField::conformal(2, 0.1);
  const double R = 4.0, delta = 1e-6;
  const MetricField d = dilate(m, R);
  // probes in the original coordinates, mapped to z R in the dilated ones
  double sup_m = 0.0, sup_d = 0.0;
  for (double a : {-0.6, -0.2, 0.1, 0.5})
    for (double b : {-0.3, 0.4}) {
      const Vec x = point({a, b}), y = point({b, a});
      for (int k = 0; k < 2; ++k) {
        Vec dx = Vec::Zero(2);
        dx(k) = delta;
        sup_m = std::max(sup_m, max_abs(m.full_matrix(x + dx, y) - m.full_matrix(x, y)) / delta);
        sup_d = std::max(sup_d, max_abs(d.full_matrix(R * x + dx, R * y) - d.full_matrix(R * x, R * y)) / delta);
      }
    }
  CHECK(sup_d / sup_m == doctest::Approx(1.0 / R).epsilon(1e-6));
  CHECK(d.domain_radius() == doctest::Approx(R * m.domain_radius()));
}

TEST_CASE("scale_metric multiplies the full matrix") {
  const MetricField m = MetricField::random_trig(2, 0.1, 9);
  const MetricField s = scale_metric(m, 0.25);
  const Vec x = point({0.1, 0.2}), y = point({-0.3, 0.4});
  CHECK(max_abs(s.full_matrix(x, y) - 1.25 * m.full_matrix(x, y)) < 1e-14);
}
