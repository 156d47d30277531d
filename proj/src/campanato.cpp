#include "hstat/campanato.hpp"

#include "hstat/errors.hpp"
#include "hstat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hstat {

namespace {

DecayProfile profile_from(const HessianFn& hess, int n, double spacing, const Vec& center,
                          const std::vector<double>& radii) {
  if (radii.empty()) fail(ErrorKind::Parameter, "decay profile needs radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0)) fail(ErrorKind::Parameter, "radii must be positive");
    if (k > 0 && !(radii[k] < radii[k - 1])) fail(ErrorKind::Parameter, "radii must be strictly decreasing");
  }
  DecayProfile p;
  p.center = center;
  p.radii = radii;
  for (double rho : radii) {
    const WeightedPoints pts = region_points(Region::ball(center, rho), spacing, 4);
    std::vector<Mat> H(pts.points.size());
    Mat mean = Mat::Zero(n, n);
    double vol = 0.0, phi = 0.0;
    for (std::size_t q = 0; q < pts.points.size(); ++q) {
      H[q] = hess(pts.points[q]);
      mean += pts.weights[q] * H[q];
      vol += pts.weights[q];
      phi += pts.weights[q] * H[q].squaredNorm();
    }
    mean /= vol;
    double osc = 0.0;
    for (std::size_t q = 0; q < pts.points.size(); ++q) osc += pts.weights[q] * (H[q] - mean).squaredNorm();
    p.phi.push_back(phi);
    p.osc.push_back(osc);
    p.means.push_back(mean);
  }
  // smallest constants over the sampled pairs rho < r; the pair rho = r
  // would pin both at 1 whenever the decay is faster than the model
  const auto pair_constant = [&](const std::vector<double>& v, double exponent) {
    double c = 0.0;
    for (std::size_t j = 0; j < radii.size(); ++j)
      for (std::size_t i = j + 1; i < radii.size(); ++i)
        c = std::max(c, v[i] / (std::pow(radii[i] / radii[j], exponent) * v[j]));
    return c;
  };
  if (radii.size() >= 2) {
    const bool phi_ok = std::all_of(p.phi.begin(), p.phi.end(), [](double v) { return v > 0.0; });
    if (phi_ok) {
      p.phi_slope = loglog_slope(p.radii, p.phi);
      p.c1 = pair_constant(p.phi, n);
    }
    const double osc_floor = 1e-20 * std::max(1.0, p.phi.front());
    const bool osc_ok = std::all_of(p.osc.begin(), p.osc.end(), [&](double v) { return v > osc_floor; });
    if (osc_ok) {
      p.osc_slope = loglog_slope(p.radii, p.osc);
      p.c2 = pair_constant(p.osc, n + 2);
    }
  }
  return p;
}

void check_inside(const Vec& center, double rho, double half_width) {
  if ((center.cwiseAbs().array() + rho > half_width + 1e-12).any())
    fail(ErrorKind::Domain, "ball leaves the region where the Hessian is available");
}

}  // namespace

DecayProfile decay_profile(const PotentialGrid& w, const Vec& center, const std::vector<double>& radii) {
  if (center.size() != w.dim()) fail(ErrorKind::Shape, "decay profile: center dimension");
  for (double rho : radii) check_inside(center, rho, 1.0 - w.spacing());
  const DerivativeField jets(w);
  return profile_from([&](const Vec& x) { return jets.at(x).d2u; }, w.dim(), w.spacing(), center, radii);
}

DecayProfile decay_profile(const HermiteField& w, const Vec& center, const std::vector<double>& radii) {
  if (center.size() != w.dim()) fail(ErrorKind::Shape, "decay profile: center dimension");
  for (double rho : radii) check_inside(center, rho, 1.0);
  return profile_from([&](const Vec& x) { return w.hessian(x); }, w.dim(), w.spacing(), center, radii);
}

double oscillation_about(const PotentialGrid& w, const Vec& center, double rho, const Mat& M) {
  check_inside(center, rho, 1.0 - w.spacing());
  const DerivativeField jets(w);
  const WeightedPoints pts = region_points(Region::ball(center, rho), w.spacing(), 4);
  double osc = 0.0;
  for (std::size_t q = 0; q < pts.points.size(); ++q)
    osc += pts.weights[q] * (jets.at(pts.points[q]).d2u - M).squaredNorm();
  return osc;
}

std::vector<double> dyadic_radii(double r0, double spacing, double min_cells, int max_count) {
  if (!(r0 > 0.0) || !(spacing > 0.0)) fail(ErrorKind::Parameter, "dyadic radii need positive r0 and spacing");
  std::vector<double> out;
  for (double r = r0; r >= min_cells * spacing - 1e-12 && static_cast<int>(out.size()) < max_count; r *= 0.5)
    out.push_back(r);
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::Parameter, "slope fit needs >= 2 points");
  double mx = 0.0, my = 0.0;
  const double m = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]) / m;
    my += std::log(y[k]) / m;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) fail(ErrorKind::Parameter, "slope fit needs distinct abscissae");
  return sxy / sxx;
}

HanLinResult hanlin_check(const HanLinInstance& inst) {
  auto samples = inst.samples;
  if (samples.size() < 4) fail(ErrorKind::Parameter, "iteration check needs samples at >= 4 radii");
  if (!(0.0 <= inst.beta && inst.beta < inst.gamma && inst.gamma < inst.alpha))
    fail(ErrorKind::Parameter, "need 0 <= beta < gamma < alpha");
  if (!(inst.A > 0.0) || inst.B < 0.0 || inst.epsilon < 0.0 || !(inst.R > 0.0))
    fail(ErrorKind::Parameter, "need A > 0, B >= 0, epsilon >= 0, R > 0");
  std::sort(samples.begin(), samples.end());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto [rho, phi] = samples[k];
    if (!(rho > 0.0) || rho > inst.R * (1.0 + 1e-12)) fail(ErrorKind::Parameter, "sample radius outside (0, R]");
    if (phi < 0.0) fail(ErrorKind::Parameter, "phi must be nonnegative");
    if (k > 0 && (rho == samples[k - 1].first || phi < samples[k - 1].second))
      fail(ErrorKind::Parameter, "phi must be sampled at distinct radii and nondecreasing");
  }

  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i; j < samples.size(); ++j) {
      const auto [rho, phi_rho] = samples[i];
      const auto [r, phi_r] = samples[j];
      const double rhs = inst.A * (std::pow(rho / r, inst.alpha) + inst.epsilon) * phi_r + inst.B * std::pow(r, inst.beta);
      if (phi_rho > rhs * (1.0 + 1e-12) + 1e-300) {
        std::ostringstream os;
        os << "hypothesis fails for rho = " << rho << ", r = " << r;
        fail(ErrorKind::Hypothesis, os.str());
      }
    }

  HanLinResult res;
  const double gamma0 = 0.5 * (inst.alpha + inst.gamma);
  res.tau = std::min(std::pow(2.0 * inst.A, -1.0 / (inst.alpha - gamma0)), 0.5);
  res.epsilon_star = std::pow(res.tau, inst.alpha);
  res.epsilon_star_ok = inst.epsilon < res.epsilon_star;
  res.c_theory = std::max(std::pow(res.tau, -inst.gamma),
                          1.0 / (std::pow(res.tau, inst.beta) * (1.0 - std::pow(res.tau, gamma0 - inst.beta))));

  std::vector<double> per_r;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    double cj = 0.0;
    for (std::size_t i = 0; i <= j; ++i) {
      const double denom = std::pow(samples[i].first / samples[j].first, inst.gamma) * samples[j].second +
                           inst.B * std::pow(samples[j].first, inst.beta);
      if (denom > 0.0)
        cj = std::max(cj, samples[i].second / denom);
      else if (samples[i].second > 0.0)
        cj = std::numeric_limits<double>::infinity();
    }
    per_r.push_back(cj);
    res.c = std::max(res.c, cj);
  }
  const auto [lo, hi] = std::minmax_element(per_r.begin(), per_r.end());
  res.c_uniform = *hi <= 1.1 * *lo;
  res.pass = res.epsilon_star_ok && res.c <= res.c_theory;
  return res;
}

}  // namespace hstat
