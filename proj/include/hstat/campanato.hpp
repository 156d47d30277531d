/// @file campanato.hpp
/// @brief Decay of int_{B_rho} |D^2w|^2 and of the mean oscillation of D^2w,
/// and a sample-level checker for the standard iteration lemma
///
///   phi(rho) <= A [(rho/r)^alpha + eps] phi(r) + B r^beta   (all rho <= r <= R)
///   =>  phi(rho) <= c [(rho/r)^gamma phi(r) + B r^beta].
#pragma once

#include "hstat/bvp.hpp"
#include "hstat/grid.hpp"
#include "hstat/linalg.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace hstat {

struct DecayProfile {
  Vec center;
  std::vector<double> radii;  // decreasing
  std::vector<double> phi;    // int_{B_rho} |D^2w|^2
  std::vector<double> osc;    // int_{B_rho} |D^2w - (D^2w)_rho|^2
  std::vector<Mat> means;     // (D^2w)_rho
  std::optional<double> phi_slope;
  std::optional<double> osc_slope;  // absent when osc vanishes to round-off
  std::optional<double> c1;         // max over rho < r of phi(rho) / ((rho/r)^n phi(r))
  std::optional<double> c2;         // same for osc with exponent n + 2
};

using HessianFn = std::function<Mat(const Vec&)>;

/// Hessian from interpolated centered differences; balls must stay inside
/// the cube spanned by nodes 1..N-1.
DecayProfile decay_profile(const PotentialGrid& w, const Vec& center, const std::vector<double>& radii);
/// Hessian of the Hermite field; balls must stay inside the cube.
DecayProfile decay_profile(const HermiteField& w, const Vec& center, const std::vector<double>& radii);

/// int_{B_rho(center)} |D^2w - M|^2 with the profile's quadrature.
double oscillation_about(const PotentialGrid& w, const Vec& center, double rho, const Mat& M);

/// r0, r0/2, ..., down to the smallest radius >= min_cells * spacing.
std::vector<double> dyadic_radii(double r0, double spacing, double min_cells = 6.0, int max_count = 16);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct HanLinInstance {
  double A = 1.0, B = 0.0, alpha = 0.0, beta = 0.0, gamma = 0.0, epsilon = 0.0, R = 1.0;
  std::vector<std::pair<double, double>> samples;  // (rho, phi(rho))
};

struct HanLinResult {
  bool pass = false;
  double c = 0.0;            // smallest constant for which the conclusion holds on the samples
  bool epsilon_star_ok = false;
  double epsilon_star = 0.0;
  double c_theory = 0.0;     // constant delivered by the iteration argument
  double tau = 0.0;
  bool c_uniform = false;    // per-r fitted constants within 10% of each other
};

/// Validates the instance, checks the hypothesis on every sampled pair
/// rho <= r <= R (Hypothesis error naming the pair otherwise) and fits the
/// conclusion constant. pass = epsilon < epsilon* and c <= c_theory.
HanLinResult hanlin_check(const HanLinInstance& inst);

}  // namespace hstat
