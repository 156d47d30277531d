/// @file metric.hpp
/// @brief Background metrics h on the 2n-ball in block form
///
///   h = I_{2n} + [[A, C^T], [C, B]],   h_{ij} = d_ij + A_ij,
///   h_{k+n,l+n} = d_kl + B_kl,         h_{k+n,j} = C_kj,
///
/// evaluated at (x, y) with x the base coordinate and y the fibre
/// coordinate (y = Du(x) on a gradient graph). A and B are symmetric, C is
/// arbitrary. Metrics are immutable callables and safe to share between
/// threads.
#pragma once

#include "hstat/linalg.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hstat {

struct MetricBlocks {
  Mat A, B, C;
};

/// Slice k of each array is the partial derivative in y_k.
struct MetricDyBlocks {
  std::vector<Mat> dA, dB, dC;
};

enum class MetricKind { Flat, Conformal, RandomTrig };

struct MetricPreset {
  MetricKind kind = MetricKind::Flat;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

class MetricField {
 public:
  using BlockFn = std::function<MetricBlocks(const Vec& x, const Vec& y)>;
  using DyFn = std::function<MetricDyBlocks(const Vec& x, const Vec& y)>;

  MetricField(int n, BlockFn blocks, DyFn dy_blocks, double domain_radius,
              std::string label, bool flat = false);

  static MetricField flat(int n);
  static MetricField conformal(int n, double epsilon);
  static MetricField random_trig(int n, double epsilon, std::uint64_t seed);
  static MetricField from_preset(int n, const MetricPreset& preset);

  int dim() const { return n_; }
  double domain_radius() const { return domain_radius_; }
  bool is_flat() const { return flat_; }
  const std::string& label() const { return label_; }

  /// Sup-norm bound on the blocks, when the preset knows one.
  std::optional<double> c0_norm_bound() const { return c0_bound_; }
  void set_c0_norm_bound(double b) { c0_bound_ = b; }

  /// Throws Domain outside the ball, Validity if h is not positive definite.
  MetricBlocks eval(const Vec& x, const Vec& y) const;
  MetricDyBlocks eval_dy(const Vec& x, const Vec& y) const;

  /// Full 2n x 2n matrix h(x, y).
  Mat full_matrix(const Vec& x, const Vec& y) const;

  /// Raw callables, used by the pullback constructions.
  const BlockFn& block_fn() const { return blocks_; }
  const DyFn& dy_fn() const { return dy_blocks_; }

 private:
  void check_domain(const Vec& x, const Vec& y) const;

  int n_;
  BlockFn blocks_;
  DyFn dy_blocks_;
  double domain_radius_;
  std::string label_;
  bool flat_;
  std::optional<double> c0_bound_;
};

/// Pullback under S(x, y) = (x/R, y/R) in rescaled coordinates:
/// blocks~(x, y) = blocks(x/R, y/R), so |D h~| = |D h| / R and the domain
/// radius grows by R. Requires R >= 1.
MetricField dilate(const MetricField& m, double R);

/// The metric (1 + s) h, expressed in block form.
MetricField scale_metric(const MetricField& m, double s);

/// Assemble the full matrix from blocks.
Mat assemble_full(const MetricBlocks& b);

}  // namespace hstat
