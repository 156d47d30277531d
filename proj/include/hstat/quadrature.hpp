/// @file quadrature.hpp
/// @brief Gauss-Legendre rules on grid cells and on balls/boxes cut by the
/// grid.
#pragma once

#include "hstat/linalg.hpp"

#include <functional>
#include <vector>

namespace hstat {

class PotentialGrid;

struct Rule1D {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

/// Gauss-Legendre with `points` nodes (1..5) mapped to [0, 1].
const Rule1D& gauss_legendre(int points);

/// Tensor rule on the unit cell [0, 1]^n together with the multilinear
/// corner weights at each point. Corner c has bit d set when it is the upper
/// node along axis d.
struct CellRule {
  int dim = 0;
  std::vector<Vec> points;
  std::vector<double> weights;
  std::vector<std::vector<double>> corner_weights;  // [point][corner]

  CellRule(int n, int points_per_axis);
};

/// Lower-corner nodes of the cells whose every corner lies in the node band
/// [lo, N - lo] along each axis.
std::vector<std::size_t> cells_within(const PotentialGrid& grid, int lo);

/// Offsets (flat) of the 2^n cell corners relative to the lower corner.
std::vector<std::size_t> corner_offsets(const PotentialGrid& grid);

struct Region {
  enum class Kind { Ball, Box };
  Kind kind = Kind::Box;
  Vec center;
  double radius = 1.0;  // ball radius or box half-width

  static Region ball(const Vec& center, double radius);
  static Region box(const Vec& center, double half_width);
  static Region unit_ball(int n);
  /// The full cube [-1, 1]^n.
  static Region cube(int n);
  /// The cube spanned by the nodes 1..N-1, where centered stencils exist.
  static Region interior(const PotentialGrid& grid);

  bool contains(const Vec& x, double tol = 0.0) const;
};

/// Quadrature points and weights for a region intersected with [-1, 1]^n.
/// Every axis is split at grid lines, so each piece lies inside one cell.
/// The last axis uses exact limits; outer axes of a ball use the substitution
/// x = c + rho sin(theta), which removes the square-root behaviour of the
/// section width at the rim.
struct WeightedPoints {
  std::vector<Vec> points;
  std::vector<double> weights;
};

WeightedPoints region_points(const Region& region, double spacing, int points_per_axis = 3);

}  // namespace hstat
