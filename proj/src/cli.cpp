#include "hstat/cli.hpp"

#include "hstat/bvp.hpp"
#include "hstat/campanato.hpp"
#include "hstat/errors.hpp"
#include "hstat/flatphase.hpp"
#include "hstat/graph.hpp"
#include "hstat/io.hpp"
#include "hstat/linearize.hpp"
#include "hstat/metric.hpp"
#include "hstat/optimize.hpp"
#include "hstat/variation.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>

namespace hstat::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string config_digest(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

json to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(r);
  }
  return rows;
}

Vec vec_from(const json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw UsageError(std::string(what) + " must be an array of " + std::to_string(n) + " numbers");
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

Mat mat_from(const json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw UsageError(std::string(what) + " must be an n x n array");
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m.row(i) = vec_from(j[static_cast<std::size_t>(i)], n, what).transpose();
  return m;
}

struct Context {
  json config;
  json params;
  fs::path out_dir;
  fs::path base_dir;
  int n = 0;
  int N = 0;
  std::optional<PotentialGrid> input;

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }
};

MetricField make_metric(const Context& ctx) {
  const json m = ctx.config.value("metric", json::object());
  if (!m.is_object()) throw UsageError("metric must be an object");
  const std::string kind = m.value("kind", std::string("flat"));
  MetricPreset p;
  if (kind == "flat")
    p.kind = MetricKind::Flat;
  else if (kind == "conformal")
    p.kind = MetricKind::Conformal;
  else if (kind == "random_trig")
    p.kind = MetricKind::RandomTrig;
  else
    throw UsageError("unknown metric kind '" + kind + "'");
  p.epsilon = m.value("epsilon", 0.0);
  p.seed = m.value("seed", std::uint64_t{0});
  return MetricField::from_preset(ctx.n, p);
}

ScalarFn named_potential(const std::string& name, const json& params, int n) {
  if (name == "zero") return potentials::zero();
  if (name == "paraboloid") return potentials::paraboloid(params.value("c", 0.1));
  if (name == "quadratic") {
    if (!params.contains("matrix")) throw UsageError("quadratic potential needs params.matrix");
    return potentials::quadratic(mat_from(params["matrix"], n, "params.matrix"));
  }
  if (name == "sincos") return potentials::sincos(params.value("amplitude", 0.2));
  if (name == "cubic_harmonic") return potentials::cubic_harmonic();
  if (name == "quartic") return potentials::quartic();
  if (name == "random_cubic")
    return potentials::random_cubic(n, params.value("amplitude", 0.1), params.value("seed", std::uint64_t{0}));
  throw UsageError("unknown potential preset '" + name + "'");
}

PotentialGrid make_potential(const Context& ctx) {
  if (ctx.input) return *ctx.input;
  const std::string name = ctx.params.value("preset_u", std::string("zero"));
  return PotentialGrid::sample(ctx.n, ctx.N, named_potential(name, ctx.params, ctx.n), name);
}

std::vector<TestFunction> make_bumps(const Context& ctx) {
  std::vector<TestFunction> out;
  if (ctx.params.contains("bumps")) {
    for (const json& b : ctx.params["bumps"]) {
      if (!b.is_object()) throw UsageError("each bump must be an object {center, radius}");
      out.emplace_back(vec_from(b.at("center"), ctx.n, "bump center"), b.at("radius").get<double>());
    }
    if (out.empty()) throw UsageError("params.bumps is empty");
    return out;
  }
  out.emplace_back(Vec::Zero(ctx.n), 0.4);
  for (int d = 0; d < ctx.n; ++d) {
    Vec c = Vec::Zero(ctx.n);
    c(d) = 0.2;
    out.emplace_back(c, 0.35);
    c(d) = -0.15;
    out.emplace_back(c, 0.3);
  }
  return out;
}

json bump_json(const TestFunction& t) { return {{"center", to_json(t.center())}, {"radius", t.radius()}}; }

Region make_region(const Context& ctx, const PotentialGrid& u) {
  const json r = ctx.params.value("region", json("unit_ball"));
  if (r.is_string()) {
    const std::string s = r.get<std::string>();
    if (s == "unit_ball") return Region::unit_ball(ctx.n);
    if (s == "cube") return Region::cube(ctx.n);
    if (s == "interior") return Region::interior(u);
    throw UsageError("unknown region '" + s + "'");
  }
  if (r.is_object() && r.contains("ball"))
    return Region::ball(vec_from(r["ball"].at("center"), ctx.n, "ball center"), r["ball"].at("radius").get<double>());
  if (r.is_object() && r.contains("box"))
    return Region::box(vec_from(r["box"].at("center"), ctx.n, "box center"), r["box"].at("half_width").get<double>());
  throw UsageError("region must be a name or {ball: {...}} / {box: {...}}");
}

std::vector<std::size_t> make_sample(const Context& ctx, const PotentialGrid& u, int min_margin = 1) {
  const int stride = ctx.params.value("stride", std::max(1, u.cells() / 8));
  const int margin = std::max(min_margin, ctx.params.value("margin", 1));
  return interior_sample(u, stride, margin);
}

Tensor4 make_tensor(const json& desc, int n, const MetricField& flat, const char* what) {
  if (desc.is_string()) {
    const std::string s = desc.get<std::string>();
    if (s == "delta") return Tensor4::delta_ij_kl(n);
    if (s == "biharmonic") return Tensor4::biharmonic(n);
    throw UsageError(std::string(what) + ": unknown tensor '" + s + "'");
  }
  if (desc.is_object() && desc.contains("flat_at")) {
    const double c = desc["flat_at"].get<double>();
    return flux_jacobian(flat, Vec::Zero(n), Vec::Zero(n), c * Mat::Identity(n, n));
  }
  if (desc.is_array()) {
    const auto v = desc.get<std::vector<double>>();
    if (v.size() != static_cast<std::size_t>(n * n * n * n))
      throw UsageError(std::string(what) + " must have n^4 entries");
    Tensor4 t(n);
    t.data() = v;
    return t;
  }
  throw UsageError(std::string(what) + " must be 'delta', 'biharmonic', {flat_at: c} or an n^4 array");
}

json cmd_volume(const Context& ctx) {
  const PotentialGrid u = make_potential(ctx);
  const MetricField m = make_metric(ctx);
  const Region region = make_region(ctx, u);
  return {{"volume", volume(u, m, region)}, {"interior_volume", interior_volume(u, m)}};
}

json cmd_residual(const Context& ctx) {
  const PotentialGrid u = make_potential(ctx);
  const MetricField m = make_metric(ctx);
  const double t = ctx.params.value("t", 1e-5);
  json probes = json::array();
  double worst = 0.0;
  for (const TestFunction& eta : make_bumps(ctx)) {
    const FirstVariation fv = first_variation_check(m, u, eta, t);
    worst = std::max(worst, std::abs(fv.analytic));
    json p = bump_json(eta);
    p["weak_residual"] = fv.analytic;
    p["first_variation_numeric"] = fv.numeric;
    probes.push_back(p);
  }
  return {{"probes", probes}, {"max_abs_residual", worst}, {"tolerances", {{"t", t}}}};
}

json cmd_ellipticity(const Context& ctx) {
  const PotentialGrid u = make_potential(ctx);
  const MetricField m = make_metric(ctx);
  const auto sample = make_sample(ctx, u);
  const EllipticityReport r = legendre_constant(m, u, sample);
  return {{"lambda_min", r.lambda_min},
          {"worst_point", to_json(r.worst_point)},
          {"worst_sigma", to_json(r.worst_sigma)},
          {"samples", sample.size()},
          {"tolerances", {{"jacobian_step", 1e-5}}}};
}

json cmd_closeness(const Context& ctx) {
  const PotentialGrid u = make_potential(ctx);
  const MetricField m = make_metric(ctx);
  const Tensor4 a0 = make_tensor(ctx.params.value("a0", json("delta")), ctx.n, MetricField::flat(ctx.n), "params.a0");
  const int h_steps = ctx.params.value("h_steps", 1);
  // the shifted node x + h e_p also needs centered differences
  const auto sample = make_sample(ctx, u, 1 + h_steps);
  const ClosenessReport r = closeness_report(m, u, a0, ctx.params.value("epsilon0", 0.5), sample, h_steps);
  return {{"sup_dev", r.sup_dev},
          {"epsilon0", r.epsilon0},
          {"pass", r.pass},
          {"worst_point", to_json(r.worst_point)},
          {"samples", sample.size()},
          {"tolerances", {{"epsilon0", r.epsilon0}, {"h_steps", h_steps}}}};
}

json cmd_minimize(const Context& ctx) {
  const PotentialGrid data = make_potential(ctx);
  const MetricField m = make_metric(ctx);
  MinimizeConfig cfg;
  cfg.tol_grad = ctx.params.value("tol_grad", cfg.tol_grad);
  cfg.max_iters = ctx.params.value("max_iters", cfg.max_iters);
  cfg.hessian_cap = ctx.params.value("hessian_cap", cfg.hessian_cap);
  const MinimizeResult r = minimize(m, data, cfg);
  const std::string out = ctx.params.value("output_grid", std::string("minimizer.json"));
  PotentialGrid u = r.u;
  u.set_description("minimizer");
  write_grid(ctx.out_dir / out, u);
  json probes = json::array();
  double worst = 0.0;
  for (const TestFunction& eta : make_bumps(ctx)) {
    const double res = weak_residual(m, r.u, eta);
    worst = std::max(worst, std::abs(res));
    json p = bump_json(eta);
    p["weak_residual"] = res;
    probes.push_back(p);
  }
  return {{"converged", r.converged},       {"iterations", r.iterations},
          {"grad_norm", r.grad_norm},       {"initial_volume", r.initial_volume},
          {"final_volume", r.final_volume}, {"probes", probes},
          {"max_abs_residual", worst},      {"output_grid", out},
          {"tolerances", {{"tol_grad", cfg.tol_grad}, {"hessian_cap", cfg.hessian_cap}, {"max_iters", cfg.max_iters}}}};
}

json cmd_solve_bvp(const Context& ctx) {
  const PotentialGrid g = make_potential(ctx);
  const Tensor4 c0 = make_tensor(ctx.params.value("c0", json("biharmonic")), ctx.n, MetricField::flat(ctx.n), "params.c0");
  const ConstantTensor ct = ConstantTensor::from(c0);
  const std::string domain = ctx.params.value("domain", std::string("cube"));
  BvpSolution s;
  if (domain == "cube") {
    BvpOptions opts;
    const std::string solver = ctx.params.value("solver", std::string("direct"));
    if (solver == "iterative")
      opts.solver = BvpSolver::Iterative;
    else if (solver != "direct")
      throw UsageError("params.solver must be 'direct' or 'iterative'");
    s = solve_bvp(ct, g, ctx.params.value("half_width", 1.0), opts);
  } else if (domain == "disk") {
    s = solve_bvp_ball(ct, HermiteField::from_grid(g), Vec::Zero(ctx.n), ctx.params.value("radius", 1.0));
  } else {
    throw UsageError("params.domain must be 'cube' or 'disk'");
  }
  const std::string out = ctx.params.value("output_grid", std::string("bvp_solution.json"));
  write_grid(ctx.out_dir / out, s.values);
  return {{"energy", s.energy},
          {"free_dofs", s.free_dofs},
          {"iterations", s.iterations},
          {"relative_residual", s.relative_residual},
          {"solver", s.solver},
          {"legendre_constant", ct.lambda},
          {"output_grid", out},
          {"tolerances", {{"relative_residual", BvpOptions{}.tolerance}}}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json cmd_campanato(const Context& ctx) {
  const PotentialGrid w = make_potential(ctx);
  const Vec center = ctx.params.contains("center") ? vec_from(ctx.params["center"], ctx.n, "params.center")
                                                   : Vec::Zero(ctx.n);
  std::vector<double> radii;
  if (ctx.params.contains("radii"))
    radii = ctx.params["radii"].get<std::vector<double>>();
  else
    radii = dyadic_radii(ctx.params.value("r0", 0.5), w.spacing(), ctx.params.value("min_cells", 6.0));
  const DecayProfile p = decay_profile(w, center, radii);
  const std::string csv = ctx.params.value("csv", std::string("profile.csv"));
  write_profile_csv(ctx.out_dir / csv, p);
  json res = {{"radii", p.radii},
              {"phi", p.phi},
              {"osc", p.osc},
              {"phi_slope", optional_json(p.phi_slope)},
              {"osc_slope", optional_json(p.osc_slope)},
              {"c1", optional_json(p.c1)},
              {"c2", optional_json(p.c2)},
              {"csv", csv}};
  if (ctx.params.contains("hanlin")) {
    const json& h = ctx.params["hanlin"];
    HanLinInstance inst;
    inst.A = h.value("A", 1.0);
    inst.B = h.value("B", 0.0);
    inst.alpha = h.value("alpha", static_cast<double>(ctx.n));
    inst.beta = h.value("beta", 0.0);
    inst.gamma = h.value("gamma", ctx.n - 1.0);
    inst.epsilon = h.value("epsilon", 0.0);
    inst.R = h.value("R", radii.front());
    for (std::size_t k = 0; k < p.radii.size(); ++k) inst.samples.emplace_back(p.radii[k], p.phi[k]);
    const HanLinResult r = hanlin_check(inst);
    res["hanlin"] = {{"pass", r.pass},       {"c", r.c},         {"epsilon_star_ok", r.epsilon_star_ok},
                     {"epsilon_star", r.epsilon_star}, {"c_theory", r.c_theory}, {"c_uniform", r.c_uniform}};
  }
  return res;
}

json cmd_linearize(const Context& ctx) {
  const PotentialGrid u = make_potential(ctx);
  const MetricField m = make_metric(ctx);
  const int p = ctx.params.value("p", 0);
  const int h_steps = ctx.params.value("h_steps", 1);
  const Linearization lin(m, u, p, h_steps);
  const DiffQuotient f = diff_quotient(u, p, h_steps);
  json probes = json::array();
  double worst = 0.0;
  for (const TestFunction& eta : make_bumps(ctx)) {
    const PotentialGrid e = eta.sample(u.cells());
    const double lhs = linear_weak_residual(lin, f, e);
    const double rhs = diff1_recombination(m, u, p, h_steps, e);
    worst = std::max(worst, std::abs(lhs - rhs));
    json j = bump_json(eta);
    j["linear_residual"] = lhs;
    j["recombination"] = rhs;
    probes.push_back(j);
  }
  const PointCoefficients c0 = lin.at(Vec::Zero(ctx.n));
  return {{"p", p},
          {"h", lin.h()},
          {"probes", probes},
          {"max_identity_gap", worst},
          {"beta_at_origin", c0.beta.data()},
          {"gamma_at_origin", to_json(c0.gamma)},
          {"psi_at_origin", to_json(c0.psi)},
          {"tolerances", {{"t_points", LinearizeOptions{}.t_points}, {"slot_step", LinearizeOptions{}.slot_step}}}};
}

json cmd_cross_check(const Context& ctx) {
  const PotentialGrid u = make_potential(ctx);
  const MetricField flat = MetricField::flat(ctx.n);
  json probes = json::array();
  double num = 0.0, den = 0.0;
  std::vector<std::pair<double, double>> pairs;
  for (const TestFunction& eta : make_bumps(ctx)) {
    const double wr = weak_residual(flat, u, eta);
    const double pp = phase_pairing(u, eta);
    num += wr * pp;
    den += pp * pp;
    pairs.emplace_back(wr, pp);
    json j = bump_json(eta);
    j["weak_residual"] = wr;
    j["phase_pairing"] = pp;
    j["ratio"] = std::abs(pp) > 1e-12 ? json(wr / pp) : json(nullptr);
    probes.push_back(j);
  }
  const double kappa = den > 0.0 ? num / den : 0.0;
  double worst = 0.0;
  for (auto [wr, pp] : pairs) worst = std::max(worst, std::abs(wr - kappa * pp));
  return {{"probes", probes}, {"fitted_constant", kappa}, {"max_abs_mismatch", worst}};
}

const std::map<std::string, std::function<json(const Context&)>>& commands() {
  static const std::map<std::string, std::function<json(const Context&)>> table = {
      {"volume", cmd_volume},         {"residual", cmd_residual},   {"ellipticity", cmd_ellipticity},
      {"closeness", cmd_closeness},   {"minimize", cmd_minimize},   {"solve-bvp", cmd_solve_bvp},
      {"campanato", cmd_campanato},   {"linearize", cmd_linearize}, {"cross-check", cmd_cross_check},
  };
  return table;
}

Context make_context(const json& config, const fs::path& out_dir, const fs::path& base_dir) {
  if (!config.is_object()) throw UsageError("config must be a JSON object");
  Context ctx;
  ctx.config = config;
  ctx.out_dir = out_dir;
  ctx.base_dir = base_dir;
  ctx.params = config.value("params", json::object());
  if (!ctx.params.is_object()) throw UsageError("params must be an object");
  const json grid = config.value("grid", json::object());
  if (!grid.is_object()) throw UsageError("grid must be an object");
  if (grid.contains("input")) {
    const fs::path p = ctx.resolve(grid["input"].get<std::string>());
    if (!fs::exists(p)) throw UsageError("grid input " + p.string() + " does not exist");
    ctx.input = read_grid(p);
    ctx.n = ctx.input->dim();
    ctx.N = ctx.input->cells();
  } else {
    ctx.n = grid.value("n", 2);
    ctx.N = grid.value("N", 64);
  }
  if (ctx.n < 1 || ctx.n > 3) throw UsageError("grid.n must be 1, 2 or 3");
  if (ctx.N < 8) throw UsageError("grid.N must be at least 8");
  return ctx;
}

}  // namespace

RunOutcome run(const json& config, const fs::path& out_dir, const fs::path& base_dir) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  json& report = outcome.report;
  report["command"] = config.is_object() ? config.value("command", json(nullptr)) : json(nullptr);
  report["config_digest"] = config_digest(config);
  report["results"] = json::object();
  report["errors"] = json::array();
  try {
    const Context ctx = make_context(config, out_dir, base_dir);
    if (!config.contains("command") || !config["command"].is_string()) throw UsageError("config needs a command");
    const std::string command = config["command"].get<std::string>();
    const auto it = commands().find(command);
    if (it == commands().end()) throw UsageError("unknown command '" + command + "'");
    fs::create_directories(out_dir);
    report["results"] = it->second(ctx);
  } catch (const UsageError& e) {
    outcome.exit_code = 2;
    report["errors"].push_back({{"kind", "usage"}, {"message", e.what()}});
  } catch (const json::exception& e) {
    outcome.exit_code = 2;
    report["errors"].push_back({{"kind", "usage"}, {"message", e.what()}});
  } catch (const Error& e) {
    outcome.exit_code = e.kind() == ErrorKind::Io ? 2 : 1;
    report["errors"].push_back({{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}});
  }
  report["wall_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  std::ofstream os(out_dir / "report.json");
  if (os) os << report.dump(2) << '\n';
  return outcome;
}

}  // namespace hstat::cli
