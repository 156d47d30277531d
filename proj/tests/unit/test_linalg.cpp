#include <doctest.h>

#include "hstat/linalg.hpp"

#include <cmath>
#include <random>

using namespace hstat;

namespace {

Mat random_symmetric(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) a(i, j) = a(j, i) = U(rng);
  return a;
}

}  // namespace

TEST_CASE("jacobi eigenvalues match the 2x2 closed form") {
  Mat a(2, 2);
  a << 0.3, 0.1, 0.1, -0.2;
  const double tr = a.trace(), det = a.determinant();
  const double disc = std::sqrt(tr * tr / 4 - det);
  const SymEigen e = jacobi_eigen(a);
  CHECK(e.values(0) == doctest::Approx(tr / 2 - disc).epsilon(1e-14));
  CHECK(e.values(1) == doctest::Approx(tr / 2 + disc).epsilon(1e-14));
}

TEST_CASE("jacobi reconstructs random symmetric matrices") {
  std::mt19937_64 rng(11);
  for (int n : {1, 2, 3, 4, 6}) {
    const Mat a = random_symmetric(n, rng);
    const SymEigen e = jacobi_eigen(a);
    const Mat rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    CHECK((rec - a).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((e.vectors.transpose() * e.vectors - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-13);
    for (int i = 1; i < n; ++i) CHECK(e.values(i - 1) <= e.values(i));
    const Eigen::SelfAdjointEigenSolver<Mat> ref(a);
    CHECK((ref.eigenvalues() - e.values).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("symmetric basis is Frobenius orthonormal") {
  for (int n : {1, 2, 3}) {
    const auto basis = symmetric_basis(n);
    REQUIRE(basis.size() == static_cast<std::size_t>(n * (n + 1) / 2));
    for (std::size_t a = 0; a < basis.size(); ++a)
      for (std::size_t b = 0; b < basis.size(); ++b)
        CHECK((basis[a].array() * basis[b].array()).sum() == doctest::Approx(a == b ? 1.0 : 0.0));
  }
}

TEST_CASE("legendre bounds of delta-delta and biharmonic tensors") {
  // delta^{ij} delta^{kl} s_ij s_kl = (tr s)^2: zero on trace-free s, n on I/sqrt(n)
  const LegendreBounds dd = legendre_bounds(Tensor4::delta_ij_kl(3));
  CHECK(std::abs(dd.lambda_min) < 1e-14);
  CHECK(dd.lambda_max == doctest::Approx(3.0));
  CHECK(std::abs(dd.argmin.trace()) < 1e-12);
  CHECK(dd.argmin.norm() == doctest::Approx(1.0));
  // delta^{ik} delta^{jl} s_ij s_kl = |s|^2 for every symmetric s
  const LegendreBounds bh = legendre_bounds(Tensor4::biharmonic(3));
  CHECK(bh.lambda_min == doctest::Approx(1.0));
  CHECK(bh.lambda_max == doctest::Approx(1.0));
}

TEST_CASE("pairing and minor symmetrization") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int n = 3;
  Tensor4 x(n);
  for (double& v : x.data()) v = U(rng);
  const Mat f = random_symmetric(n, rng), e = random_symmetric(n, rng);
  double direct = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) direct += x(i, j, k, l) * f(i, k) * e(j, l);
  CHECK(x.pair(f, e) == doctest::Approx(direct).epsilon(1e-13));
  CHECK(x.minor_symmetrized().pair(f, e) == doctest::Approx(direct).epsilon(1e-13));
  const Tensor4 s = x.minor_symmetrized();
  CHECK(s.max_abs_diff(s.minor_symmetrized()) < 1e-15);
}
