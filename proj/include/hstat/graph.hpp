/// @file graph.hpp
/// @brief Induced metric on the gradient graph {(x, Du(x))} and its volume.
#pragma once

#include "hstat/grid.hpp"
#include "hstat/linalg.hpp"
#include "hstat/metric.hpp"
#include "hstat/quadrature.hpp"

#include <vector>

namespace hstat {

struct InducedMetricPoint {
  Mat g;
  double sqrt_det_g = 1.0;
  Mat g_inv;
};

/// g = I + U^2 + A + U B U + U C + C^T U with U = D^2u and the blocks taken
/// at (x, Du). Throws Degeneracy when g is not positive definite.
InducedMetricPoint induced_metric(const MetricBlocks& blocks, const Mat& d2u);
InducedMetricPoint induced_metric(const MetricField& m, const Vec& x, const Vec& du, const Mat& d2u);

/// Vol_h(Gamma(u)) over a region, 3-point Gauss-Legendre on every cell piece.
/// Regions may reach the cube boundary; the outermost node layer then uses
/// one-sided differences.
double volume(const PotentialGrid& u, const MetricField& m, const Region& region);

/// Volume over the interior cube spanned by nodes 1..N-1, the functional the
/// optimizer and the first-variation audit differentiate.
double interior_volume(const PotentialGrid& u, const MetricField& m);

/// The same sum restricted to the listed cells (lower-corner nodes, each
/// with every corner in the band 1..N-1).
double interior_volume(const PotentialGrid& u, const MetricField& m,
                       const std::vector<std::size_t>& cells);

}  // namespace hstat
