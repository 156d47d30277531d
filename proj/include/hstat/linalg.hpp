/// @file linalg.hpp
/// @brief Small dense linear algebra: four-index tensors, symmetric matrix
/// bases and a cyclic Jacobi eigensolver for n <= a handful.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace hstat {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Dense n^4 array X^{ij,kl}. The pairing convention used everywhere is
/// X^{ij,kl} f_{ik} eta_{jl} for bilinear forms and X^{ij,kl} s_{ij} s_{kl}
/// for the Legendre form.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n * n), 0.0) {}

  int dim() const { return n_; }

  double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Tensor4& operator+=(const Tensor4& o);
  Tensor4& operator*=(double s);

  /// delta^{ij} delta^{kl}
  static Tensor4 delta_ij_kl(int n);
  /// delta^{ik} delta^{jl}; its energy density is (tr D^2 v)^2.
  static Tensor4 biharmonic(int n);

  /// Average over the index swaps i<->k and j<->l. Two tensors with equal
  /// projections define the same bilinear form on symmetric matrices.
  Tensor4 minor_symmetrized() const;

  double max_abs_diff(const Tensor4& o) const;

  /// X^{ij,kl} f_{ik} e_{jl}
  double pair(const Mat& f, const Mat& e) const;

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l);
  }

  int n_ = 0;
  std::vector<double> data_;
};

struct SymEigen {
  Vec values;   // ascending
  Mat vectors;  // columns
};

/// Cyclic Jacobi rotations; input must be symmetric.
SymEigen jacobi_eigen(const Mat& a, double tol = 1e-15, int max_sweeps = 64);

/// Orthonormal basis of symmetric n x n matrices under the Frobenius inner
/// product: E_ii and (E_ij + E_ji)/sqrt(2).
std::vector<Mat> symmetric_basis(int n);

/// m x m matrix (m = n(n+1)/2) of the quadratic form s -> X^{ij,kl} s_ij s_kl
/// in the orthonormal symmetric basis, symmetrized.
Mat legendre_matrix(const Tensor4& x);

struct LegendreBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Mat argmin;  // unit Frobenius-norm symmetric matrix attaining lambda_min
};

LegendreBounds legendre_bounds(const Tensor4& x);

/// Max-norm symmetry test.
bool is_symmetric(const Mat& a, double tol);

}  // namespace hstat
