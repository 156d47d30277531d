/// @file optimize.hpp
/// @brief Minimization of the interior volume over clamped potentials.
///
/// The unknowns are the nodes at least PotentialGrid::kClampedBand layers
/// inside the cube; all other nodes keep the boundary data, which clamps
/// both values and discrete first derivatives on the boundary band.
#pragma once

#include "hstat/grid.hpp"
#include "hstat/metric.hpp"

#include <vector>

namespace hstat {

/// d interior_volume / d u_node for every free node, zero on clamped nodes.
/// G . eta equals weak_residual(m, u, eta) for any nodal eta supported on
/// free nodes.
PotentialGrid discrete_gradient(const MetricField& m, const PotentialGrid& u);

struct MinimizeConfig {
  double tol_grad = 1e-8;        // sup-norm of the discrete gradient
  int max_iters = 200;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 40;
  double hessian_cap = 0.9;      // spectral norm of D^2u at every node
};

struct MinimizeResult {
  PotentialGrid u;
  double initial_volume = 0.0;
  double final_volume = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> volume_history;  // one entry per accepted iterate
};

/// Descent on interior_volume from the given data (its free nodes are the
/// initial iterate). Each direction solves P d = -G with P the Hessian of
/// the small-slope flat energy int |D^2_h u|^2 / 2 (same stencils,
/// interpolation and cells as the volume), factored once; steps follow
/// Armijo backtracking and trial iterates violating the Hessian cap are
/// rejected. Throws Steepness when the data already violate the cap.
MinimizeResult minimize(const MetricField& m, const PotentialGrid& boundary_data, const MinimizeConfig& cfg = {});

/// max over nodes 1..N-1 of the spectral norm of the centered Hessian.
double max_hessian_norm(const PotentialGrid& u);

}  // namespace hstat
