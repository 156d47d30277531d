/// @file flatphase.hpp
/// @brief Lagrangian phase Theta = sum_i arctan lambda_i(D^2u) for the flat
/// metric and its weak pairing int sqrt(g) g^{ij} Theta_i eta_j dx.
#pragma once

#include "hstat/grid.hpp"
#include "hstat/linalg.hpp"
#include "hstat/variation.hpp"

#include <vector>

namespace hstat {

/// sum of arctan of the eigenvalues; throws Shape for non-symmetric input.
double phase(const Mat& d2u);

struct PhaseField {
  PotentialGrid theta;             // defined on nodes 1..N-1, zero on the outer layer
  std::vector<Vec> eigenvalues;    // per node, empty on the outer layer
};

PhaseField phase_field(const PotentialGrid& u);

/// int sqrt(g) g^{ij} Theta_i eta_j over the cells spanned by nodes
/// 2..N-2, with D Theta by centered differences of the nodal phase and the
/// analytic gradient of eta.
double phase_pairing(const PotentialGrid& u, const TestFunction& eta);

}  // namespace hstat
