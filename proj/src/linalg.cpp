#include "hstat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hstat {

Tensor4& Tensor4::operator+=(const Tensor4& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor4& Tensor4::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Tensor4 Tensor4::delta_ij_kl(int n) {
  Tensor4 t(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) t(i, i, k, k) = 1.0;
  return t;
}

Tensor4 Tensor4::biharmonic(int n) {
  Tensor4 t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(i, j, i, j) = 1.0;
  return t;
}

Tensor4 Tensor4::minor_symmetrized() const {
  Tensor4 s(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l)
          s(i, j, k, l) = 0.25 * ((*this)(i, j, k, l) + (*this)(k, j, i, l) +
                                  (*this)(i, l, k, j) + (*this)(k, l, i, j));
  return s;
}

double Tensor4::max_abs_diff(const Tensor4& o) const {
  double m = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - o.data_[i]));
  return m;
}

double Tensor4::pair(const Mat& f, const Mat& e) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) s += (*this)(i, j, k, l) * f(i, k) * e(j, l);
  return s;
}

SymEigen jacobi_eigen(const Mat& input, double tol, int max_sweeps) {
  const auto n = input.rows();
  Mat a = 0.5 * (input + input.transpose());
  Mat v = Mat::Identity(n, n);
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= tol * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });
  SymEigen out{Vec(n), Mat(n, n)};
  for (Eigen::Index c = 0; c < n; ++c) {
    out.values(c) = a(order[c], order[c]);
    out.vectors.col(c) = v.col(order[c]);
  }
  return out;
}

std::vector<Mat> symmetric_basis(int n) {
  std::vector<Mat> basis;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      if (i == j) {
        e(i, i) = 1.0;
      } else {
        e(i, j) = e(j, i) = 1.0 / std::sqrt(2.0);
      }
      basis.push_back(std::move(e));
    }
  }
  return basis;
}

Mat legendre_matrix(const Tensor4& x) {
  const auto basis = symmetric_basis(x.dim());
  const auto m = static_cast<Eigen::Index>(basis.size());
  Mat q(m, m);
  const int n = x.dim();
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) s += x(i, j, k, l) * basis[a](i, j) * basis[b](k, l);
      q(a, b) = s;
    }
  }
  return 0.5 * (q + q.transpose());
}

LegendreBounds legendre_bounds(const Tensor4& x) {
  const Mat q = legendre_matrix(x);
  const SymEigen eig = jacobi_eigen(q);
  const auto basis = symmetric_basis(x.dim());
  Mat sigma = Mat::Zero(x.dim(), x.dim());
  for (std::size_t a = 0; a < basis.size(); ++a) sigma += eig.vectors(static_cast<Eigen::Index>(a), 0) * basis[a];
  return {eig.values(0), eig.values(eig.values.size() - 1), sigma};
}

bool is_symmetric(const Mat& a, double tol) {
  return a.rows() == a.cols() && (a - a.transpose()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace hstat
