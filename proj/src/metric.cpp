#include "hstat/metric.hpp"

#include "hstat/errors.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <sstream>

namespace hstat {

namespace {

constexpr double kSymmetryTol = 1e-12;

MetricBlocks zero_blocks(int n) {
  return {Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n)};
}

MetricDyBlocks zero_dy(int n) {
  MetricDyBlocks d;
  d.dA.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  d.dB = d.dA;
  d.dC = d.dA;
  return d;
}

// Portable uniform in [0, 1) from the raw engine output.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// One scalar entry: eps * sum_m w_m [sin(k_m . z + phi_m) - sin(phi_m)],
// sum_m w_m = 1/2, so |entry| <= eps and entry(0) = 0.
struct TrigEntry {
  std::vector<Vec> waves;
  std::vector<double> phases;
  std::vector<double> weights;

  double value(const Vec& z) const {
    double s = 0.0;
    for (std::size_t m = 0; m < waves.size(); ++m)
      s += weights[m] * (std::sin(waves[m].dot(z) + phases[m]) - std::sin(phases[m]));
    return s;
  }

  double dz(const Vec& z, Eigen::Index a) const {
    double s = 0.0;
    for (std::size_t m = 0; m < waves.size(); ++m)
      s += weights[m] * waves[m](a) * std::cos(waves[m].dot(z) + phases[m]);
    return s;
  }
};

struct TrigMetricData {
  int n = 0;
  double eps = 0.0;
  // Indexed [block][i * n + j]; blocks A, B are filled for i <= j only.
  std::vector<TrigEntry> entries[3];
};

std::shared_ptr<const TrigMetricData> make_trig_data(int n, double eps, std::uint64_t seed) {
  constexpr int kTerms = 3;
  constexpr double kWaveMax = 1.5;
  auto data = std::make_shared<TrigMetricData>();
  data->n = n;
  data->eps = eps;
  std::mt19937_64 rng(seed);
  for (auto& block : data->entries) {
    block.resize(static_cast<std::size_t>(n * n));
    for (auto& e : block) {
      double wsum = 0.0;
      for (int m = 0; m < kTerms; ++m) {
        Vec k(2 * n);
        for (int a = 0; a < 2 * n; ++a) k(a) = kWaveMax * (2.0 * unit_uniform(rng) - 1.0);
        e.waves.push_back(std::move(k));
        e.phases.push_back(2.0 * M_PI * unit_uniform(rng));
        const double w = 0.25 + unit_uniform(rng);
        e.weights.push_back(w);
        wsum += w;
      }
      for (double& w : e.weights) w *= 0.5 / wsum;
    }
  }
  return data;
}

Vec joint(const Vec& x, const Vec& y) {
  Vec z(x.size() + y.size());
  z << x, y;
  return z;
}

}  // namespace

MetricField::MetricField(int n, BlockFn blocks, DyFn dy_blocks, double domain_radius,
                         std::string label, bool flat)
    : n_(n),
      blocks_(std::move(blocks)),
      dy_blocks_(std::move(dy_blocks)),
      domain_radius_(domain_radius),
      label_(std::move(label)),
      flat_(flat) {
  if (n < 1) fail(ErrorKind::Parameter, "metric dimension must be >= 1");
}

MetricField MetricField::flat(int n) {
  MetricField m(
      n, [n](const Vec&, const Vec&) { return zero_blocks(n); },
      [n](const Vec&, const Vec&) { return zero_dy(n); },
      std::numeric_limits<double>::infinity(), "flat", true);
  m.set_c0_norm_bound(1.0);
  return m;
}

MetricField MetricField::conformal(int n, double epsilon) {
  if (!(epsilon >= 0.0)) fail(ErrorKind::Parameter, "conformal epsilon must be >= 0");
  auto blocks = [n, epsilon](const Vec& x, const Vec&) {
    const double s = std::expm1(2.0 * epsilon * x(0));
    const Mat d = s * Mat::Identity(n, n);
    return MetricBlocks{d, d, Mat::Zero(n, n)};
  };
  auto dy = [n](const Vec&, const Vec&) { return zero_dy(n); };
  std::ostringstream label;
  label << "conformal(" << epsilon << ")";
  MetricField m(n, blocks, dy, 2.0, label.str());
  m.set_c0_norm_bound(std::exp(4.0 * epsilon));
  return m;
}

MetricField MetricField::random_trig(int n, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0)) fail(ErrorKind::Parameter, "random_trig epsilon must be >= 0");
  auto data = make_trig_data(n, epsilon, seed);
  auto blocks = [data](const Vec& x, const Vec& y) {
    const int n = data->n;
    const Vec z = joint(x, y);
    MetricBlocks b = zero_blocks(n);
    Mat* out[3] = {&b.A, &b.B, &b.C};
    for (int blk = 0; blk < 3; ++blk) {
      for (int i = 0; i < n; ++i) {
        for (int j = (blk == 2 ? 0 : i); j < n; ++j) {
          const double v = data->eps * data->entries[blk][static_cast<std::size_t>(i * n + j)].value(z);
          (*out[blk])(i, j) = v;
          if (blk != 2) (*out[blk])(j, i) = v;
        }
      }
    }
    return b;
  };
  auto dy = [data](const Vec& x, const Vec& y) {
    const int n = data->n;
    const Vec z = joint(x, y);
    MetricDyBlocks d = zero_dy(n);
    std::vector<Mat>* out[3] = {&d.dA, &d.dB, &d.dC};
    for (int blk = 0; blk < 3; ++blk) {
      for (int i = 0; i < n; ++i) {
        for (int j = (blk == 2 ? 0 : i); j < n; ++j) {
          const auto& e = data->entries[blk][static_cast<std::size_t>(i * n + j)];
          for (int k = 0; k < n; ++k) {
            const double v = data->eps * e.dz(z, n + k);
            (*out[blk])[static_cast<std::size_t>(k)](i, j) = v;
            if (blk != 2) (*out[blk])[static_cast<std::size_t>(k)](j, i) = v;
          }
        }
      }
    }
    return d;
  };
  std::ostringstream label;
  label << "random_trig(" << epsilon << ", " << seed << ")";
  MetricField m(n, blocks, dy, 2.0, label.str());
  m.set_c0_norm_bound(1.0 + epsilon);
  return m;
}

MetricField MetricField::from_preset(int n, const MetricPreset& preset) {
  switch (preset.kind) {
    case MetricKind::Flat: return flat(n);
    case MetricKind::Conformal: return conformal(n, preset.epsilon);
    case MetricKind::RandomTrig: return random_trig(n, preset.epsilon, preset.seed);
  }
  fail(ErrorKind::Parameter, "unknown metric preset");
}

void MetricField::check_domain(const Vec& x, const Vec& y) const {
  if (x.size() != n_ || y.size() != n_) fail(ErrorKind::Shape, "metric point has wrong dimension");
  if (flat_) return;
  const double r2 = x.squaredNorm() + y.squaredNorm();
  if (r2 > domain_radius_ * domain_radius_ * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "point at radius " << std::sqrt(r2) << " outside metric domain of radius " << domain_radius_;
    fail(ErrorKind::Domain, os.str());
  }
}

MetricBlocks MetricField::eval(const Vec& x, const Vec& y) const {
  check_domain(x, y);
  MetricBlocks b = blocks_(x, y);
  if (flat_) return b;
  if (!is_symmetric(b.A, kSymmetryTol) || !is_symmetric(b.B, kSymmetryTol))
    fail(ErrorKind::Validity, "metric blocks A, B must be symmetric");
  b.A = 0.5 * (b.A + b.A.transpose()).eval();
  b.B = 0.5 * (b.B + b.B.transpose()).eval();
  Eigen::LLT<Mat> llt(assemble_full(b));
  if (llt.info() != Eigen::Success) fail(ErrorKind::Validity, "background metric is not positive definite");
  return b;
}

MetricDyBlocks MetricField::eval_dy(const Vec& x, const Vec& y) const {
  check_domain(x, y);
  return dy_blocks_(x, y);
}

Mat MetricField::full_matrix(const Vec& x, const Vec& y) const { return assemble_full(eval(x, y)); }

Mat assemble_full(const MetricBlocks& b) {
  const auto n = b.A.rows();
  Mat h = Mat::Identity(2 * n, 2 * n);
  h.topLeftCorner(n, n) += b.A;
  h.topRightCorner(n, n) += b.C.transpose();
  h.bottomLeftCorner(n, n) += b.C;
  h.bottomRightCorner(n, n) += b.B;
  return h;
}

MetricField dilate(const MetricField& m, double R) {
  if (!(R >= 1.0)) fail(ErrorKind::Parameter, "dilation factor must satisfy R >= 1");
  if (m.is_flat()) return MetricField::flat(m.dim());
  const double inv = 1.0 / R;
  auto fn = m.block_fn();
  auto dy = m.dy_fn();
  auto blocks = [fn, inv](const Vec& x, const Vec& y) { return fn(x * inv, y * inv); };
  auto dblocks = [dy, inv](const Vec& x, const Vec& y) {
    MetricDyBlocks d = dy(x * inv, y * inv);
    for (auto* v : {&d.dA, &d.dB, &d.dC})
      for (Mat& s : *v) s *= inv;
    return d;
  };
  std::ostringstream label;
  label << "dilate(" << m.label() << ", " << R << ")";
  MetricField out(m.dim(), blocks, dblocks, m.domain_radius() * R, label.str());
  if (m.c0_norm_bound()) out.set_c0_norm_bound(*m.c0_norm_bound());
  return out;
}

MetricField scale_metric(const MetricField& m, double s) {
  if (!(s > -1.0)) fail(ErrorKind::Parameter, "metric scale factor must keep 1 + s > 0");
  const int n = m.dim();
  auto fn = m.block_fn();
  auto dy = m.dy_fn();
  auto blocks = [fn, s, n](const Vec& x, const Vec& y) {
    MetricBlocks b = fn(x, y);
    b.A = (1.0 + s) * b.A + s * Mat::Identity(n, n);
    b.B = (1.0 + s) * b.B + s * Mat::Identity(n, n);
    b.C *= (1.0 + s);
    return b;
  };
  auto dblocks = [dy, s](const Vec& x, const Vec& y) {
    MetricDyBlocks d = dy(x, y);
    for (auto* v : {&d.dA, &d.dB, &d.dC})
      for (Mat& t : *v) t *= (1.0 + s);
    return d;
  };
  std::ostringstream label;
  label << "(1+" << s << ")*" << m.label();
  return MetricField(n, blocks, dblocks, m.domain_radius(), label.str());
}

}  // namespace hstat
