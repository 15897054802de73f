#include "commands.hpp"

#include "report.hpp"

#include "logsp/fields.hpp"
#include "logsp/moser.hpp"
#include "logsp/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

namespace logsp::cli {

namespace {

constexpr double kPi = std::numbers::pi;

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

Json config_echo(const RunConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["domain"] = {{"L", c.L}};
  j["grid"] = {{"N", c.N}, {"h", c.grid().spacing()}};
  j["model"] = {{"p", c.p}, {"alpha0", c.alpha0}};
  j["symmetry"] = {{"group", c.group().name()}, {"exact_on_grid", c.group().exact_on_grid()}};
  j["potential"] = c.potential().describe();
  j["nonlinearity"] = c.nonlinearity().name();
  if (c.flip_a2_sign) j["debug"] = {{"flip_a2_sign", true}};
  return j;
}

std::vector<Field> random_fields(const Grid& g, unsigned long long seed, int count, double radius) {
  Rng rng(seed);
  std::vector<Field> out;
  for (int k = 0; k < count; ++k) out.push_back(random_smooth_field(g, rng, radius));
  return out;
}

Json check_entry(const std::string& id, bool pass, Json extremal) {
  Json j;
  j["id"] = id;
  j["verdict"] = pass ? "pass" : "fail";
  j["extremal"] = std::move(extremal);
  return j;
}

Json skipped_entry(const std::string& id, const std::string& reason) {
  Json j;
  j["id"] = id;
  j["verdict"] = "skipped";
  j["reason"] = reason;
  return j;
}

// I1 = I0 + I2 on every sample.
Json check_kernel_identity(const Model& model, const std::vector<Field>& fields) {
  double worst = 0;
  Json witness = nullptr;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const auto& ks = model.kernels();
    const double i0 = functional_I(ks, fields[k], model.p(), 0);
    const double i1 = functional_I(ks, fields[k], model.p(), 1);
    const double i2 = functional_I(ks, fields[k], model.p(), 2);
    const double rel = std::abs(i1 - i0 - i2) / std::max(std::abs(i1) + std::abs(i2), 1e-300);
    if (rel > worst) {
      worst = rel;
      witness = {{"field", k}, {"I0", i0}, {"I1", i1}, {"I2", i2}, {"I1_minus_I0_minus_I2", i1 - i0 - i2}};
    }
  }
  Json j = check_entry("kernel_identity", worst <= 1e-10, {{"max_relative_residual", worst}, {"tolerance", 1e-10}});
  if (worst > 1e-10) j["witness"] = witness;
  return j;
}

Json check_fast_direct(const RunConfig& cfg) {
  const Grid g(cfg.L, cfg.verify.bench_n);
  const auto fields = random_fields(g, cfg.seed + 101, 2, cfg.verify.support_radius);
  double worst = 0;
  for (const auto kind : {KernelKind::LogOnePlusR, KernelKind::LogOnePlusInvR, KernelKind::LogR}) {
    const ConvolutionPlan plan(g, kind);
    const Field w1(g, fields[0].values().abs().pow(cfg.p));
    const Field w2(g, fields[1].values().abs().pow(cfg.p));
    const double fast = bilinear_A(plan, w1, w2, EvalPath::Fast);
    const double direct = bilinear_A(plan, w1, w2, EvalPath::Direct);
    worst = std::max(worst, std::abs(fast - direct) / std::max(std::abs(direct), 1e-300));
  }
  return check_entry("fast_direct_agreement", worst <= 1e-10,
                     {{"N", cfg.verify.bench_n}, {"max_relative_difference", worst}, {"tolerance", 1e-10}});
}

Json check_nonlocal_sign(const Model& model, const std::vector<Field>& fields, double radius) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& u : fields) {
    const auto& ks = model.kernels();
    const double i0 = functional_I(ks, u, model.p(), 0);
    const double scale = functional_I(ks, u, model.p(), 1) + std::abs(functional_I(ks, u, model.p(), 2));
    worst = std::max(worst, i0 / scale);
  }
  return check_entry("nonlocal_sign", worst <= 1e-9,
                     {{"support_radius", radius}, {"max_I0_over_scale", worst}, {"tolerance", 1e-9}});
}

Json check_coercivity(const RunConfig& cfg, const Model& model, const SymmetryGroup& G) {
  const auto raw = random_fields(model.grid(), cfg.seed + 202, 2 * cfg.verify.fields, cfg.solver.random_support);
  // Interpolated averaging is only invariant up to O(h^2).
  const double sym_tol = G.exact_on_grid() ? cfg.solver.sym_tol : 0.1;
  double worst = std::numeric_limits<double>::infinity(), defect = 0;
  for (int k = 0; k < cfg.verify.fields; ++k) {
    const Field u = group_average(G, raw[2 * k]);
    const Field v = group_average(G, raw[2 * k + 1]);
    const auto r = coercivity_ratio(model.kernels().a1(), u, v, model.p(), G, sym_tol);
    worst = std::min(worst, r.ratio);
    defect = std::max({defect, r.defect_u, r.defect_v});
  }
  const double bound = 1.0 / 16.0 - 1e-6;
  Json j = check_entry("coercivity", worst >= bound,
                       {{"min_ratio", worst}, {"bound", bound}, {"max_symmetry_defect", defect}});
  j["mode"] = G.exact_on_grid() ? "exact" : "approximate (interpolated group)";
  return j;
}

Json check_hls(const Model& model, const std::vector<Field>& fields) {
  // ln(1 + 1/r) < 1/r, so the sharp Riesz constant for |x|^-1 bounds the ratio.
  const double bound = 2.0 * std::sqrt(kPi);
  double worst = 0;
  for (const auto& u : fields) worst = std::max(worst, hls_ratio(model.kernels().a2(), u, model.p()));
  return check_entry("hls_ratio", std::isfinite(worst) && worst <= bound, {{"max_ratio", worst}, {"bound", bound}});
}

Json check_gradient(const RunConfig& cfg, const Model& model) {
  const Grid& g = model.grid();
  Rng rng(cfg.seed + 303);
  const Field u = 0.4 * random_smooth_field(g, rng, cfg.solver.random_support);
  const Field grad = gradient(u, model);
  const double eps = 1e-5;
  double worst = 0;
  for (int k = 0; k < cfg.verify.fields; ++k) {
    const Field v = random_smooth_field(g, rng, cfg.solver.random_support);
    const double fd = (energy(u + eps * v, model).total - energy(u - eps * v, model).total) / (2 * eps);
    const double an = integrate(g, grad.values() * v.values());
    worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
  }
  return check_entry("gradient_fd", worst <= 1e-5, {{"max_relative_error", worst}, {"tolerance", 1e-5}});
}

struct FiberChecks {
  Json gap, eq55, unique, g_min;
};

FiberChecks check_fiber(const RunConfig& cfg, const Model& model, const std::vector<Field>& fields, bool monotone) {
  FiberChecks out;
  // g(t) = t^{2p} - p t^2 + p - 1 is minimized at t = 1 with value 0.
  double g_min = std::numeric_limits<double>::infinity(), t_at = 0;
  const int steps = int(std::ceil(cfg.verify.fiber_t_max * 1000));
  for (int i = 0; i <= steps; ++i) {
    const double t = i / 1000.0;
    const double v = g_poly(t, model.p());
    if (v < g_min) g_min = v, t_at = t;
  }
  out.g_min = check_entry("g_minimum", t_at == 1.0 && g_min == 0.0, {{"min_value", g_min}, {"argmin", t_at}});
  if (!monotone) {
    const std::string why = "F4prime_mono not satisfied by this nonlinearity";
    out.gap = skipped_entry("fiber_gap", why);
    out.eq55 = skipped_entry("pointwise_gap", why);
    out.unique = skipped_entry("fiber_unique", why);
    return out;
  }
  double worst_gap = std::numeric_limits<double>::infinity();
  int worst_changes_lo = 1 << 30, worst_changes_hi = 0;
  for (const auto& u : fields) {
    const double scale = 1 + std::abs(energy(u, model).total) + norm_H_squared(u, model.V());
    for (int i = 0; i <= 30; ++i) {
      const double t = cfg.verify.fiber_t_max * i / 30.0;
      worst_gap = std::min(worst_gap, fiber_gap(u, t, model) / scale);
    }
    const int changes = fiber_sign_changes(RayProfile(u, model), 1e-4, 1e2, 10000);
    worst_changes_lo = std::min(worst_changes_lo, changes);
    worst_changes_hi = std::max(worst_changes_hi, changes);
  }
  out.gap = check_entry("fiber_gap", worst_gap >= -1e-9, {{"min_relative_gap", worst_gap}, {"tolerance", 1e-9}});
  out.unique = check_entry("fiber_unique", worst_changes_lo == 1 && worst_changes_hi == 1,
                           {{"min_sign_changes", worst_changes_lo}, {"max_sign_changes", worst_changes_hi}});

  double worst55 = std::numeric_limits<double>::infinity();
  const Grid& g = model.grid();
  for (const Index i : {Index(0), g.size() / 4, g.size() / 2}) {
    const Point x(g.coord(i), g.coord(i));
    const double v = model.V()(i, i);
    for (int k = -2000; k <= 2000; ++k) {
      const double t = cfg.verify.fiber_t_max * k / 2000.0;
      worst55 = std::min(worst55, eq55_gap(model.nonlinearity(), v, x, t, model.p(), 1.0));
    }
  }
  out.eq55 = check_entry("pointwise_gap", worst55 >= -1e-9, {{"min_gap", worst55}, {"tolerance", 1e-9}});
  return out;
}

Json condition_section(const RunConfig& cfg, const Model& model, bool& monotone) {
  CheckParams params;
  params.p = cfg.p;
  params.q = cfg.moser.q;
  params.t_max = cfg.verify.fiber_t_max;
  Json out = Json::array();
  monotone = false;
  for (const auto id : {ConditionId::V0, ConditionId::F1, ConditionId::F2, ConditionId::F3, ConditionId::F4,
                        ConditionId::F5, ConditionId::F4PrimeMono, ConditionId::F4PrimeAR}) {
    const auto rep = check_condition(model.nonlinearity(), model.potential(), id, params);
    Json j;
    j["id"] = to_string(id);
    j["verdict"] = to_string(rep.verdict);
    j["extremal_ratio"] = rep.extremal_ratio;
    if (!rep.note.empty()) j["note"] = rep.note;
    if (!rep.witnesses.empty()) {
      const auto& w = rep.witnesses.front();
      j["witness"] = {{"x", w.x.x()}, {"y", w.x.y()}, {"t", w.t}, {"violation", w.violation}};
    }
    if (id == ConditionId::F4PrimeMono) monotone = rep.verdict == Verdict::Pass;
    out.push_back(std::move(j));
  }
  return out;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string row;
  for (const auto& c : cells) {
    if (!row.empty()) row += ',';
    row += c;
  }
  return row + "\n";
}

template <typename T>
std::string opt(const std::optional<T>& v) {
  return v ? format_double(double(*v)) : "";
}

}  // namespace

int run_verify(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const Model model = cfg.model();
  const SymmetryGroup G = cfg.group();
  const auto fields = random_fields(model.grid(), cfg.seed, cfg.verify.fields, cfg.verify.support_radius);

  bool monotone = false;
  const Json conditions = condition_section(cfg, model, monotone);

  Json checks = Json::array();
  checks.push_back(check_kernel_identity(model, fields));
  checks.push_back(check_fast_direct(cfg));
  checks.push_back(check_nonlocal_sign(model, fields, cfg.verify.support_radius));
  checks.push_back(check_coercivity(cfg, model, G));
  checks.push_back(check_hls(model, fields));
  checks.push_back(check_gradient(cfg, model));
  auto fiber = check_fiber(cfg, model, fields, monotone);
  checks.push_back(std::move(fiber.gap));
  checks.push_back(std::move(fiber.eq55));
  checks.push_back(std::move(fiber.unique));
  checks.push_back(std::move(fiber.g_min));

  bool pass = true;
  int failed = 0;
  for (const auto& c : checks) {
    if (c["verdict"] == "fail") {
      pass = false;
      ++failed;
    }
  }
  Json report;
  report["command"] = "verify";
  report["config"] = config_echo(cfg);
  if (cfg.require_exact && !G.exact_on_grid()) {
    report["warning"] = G.name() + " is not exact on the grid; group actions are interpolated";
  }
  report["checks"] = checks;
  report["conditions"] = conditions;
  report["pass"] = pass;
  write_file(out / "verify.json", dump(report));
  log << "verify: " << (pass ? "pass" : "FAIL") << " (" << checks.size() - failed << "/" << checks.size()
      << " checks)\n";
  return pass ? kPass : kCheckFailure;
}

int run_solve(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const Model model = cfg.model();
  const SymmetryGroup G = cfg.group();
  SolveReport rep;
  try {
    rep = solve(cfg.solver, model, G);
  } catch (const std::runtime_error& e) {
    rep.method = to_string(cfg.solver.method);
    rep.verdict = SolveVerdict::Diverged;
    rep.message = e.what();
  }

  Json report;
  report["command"] = "solve";
  report["config"] = config_echo(cfg);
  report["method"] = rep.method;
  report["verdict"] = to_string(rep.verdict);
  report["iterations"] = rep.iterations;
  report["phi"] = rep.phi;
  report["rho"] = rep.rho;
  report["tolerance"] = rep.tolerance;
  report["symmetry_defect"] = rep.defect;
  report["t_u"] = rep.t_u;
  report["nehari"] = rep.nehari;
  report["norm_sq"] = rep.norm_sq;
  if (rep.endpoint_phi) report["endpoint_phi"] = *rep.endpoint_phi;
  if (model.nonlinearity().critical_exponent()) {
    const double a0 = *model.nonlinearity().critical_exponent();
    report["critical_window"] = {{"phi_bound", 2 * kPi / a0}, {"norm_sq_bound", 4 * kPi / a0}};
  }
  if (!rep.message.empty()) report["message"] = rep.message;
  write_file(out / "solve.json", dump(report));

  std::string trace = "iter,phi,rho,defect\n";
  for (const auto& r : rep.trace) {
    trace += csv_row({std::to_string(r.iter), format_double(r.phi), format_double(r.rho), format_double(r.defect)});
  }
  write_file(out / "trace.csv", trace);
  if (rep.u) {
    std::ostringstream field;
    write_field_csv(field, *rep.u);
    write_file(out / "field.csv", field.str());
  }

  log << "solve: " << to_string(rep.verdict) << " after " << rep.iterations << " iterations, Phi = "
      << format_double(rep.phi) << "\n";
  switch (rep.verdict) {
    case SolveVerdict::Converged: return kPass;
    case SolveVerdict::MaxIter: return kCheckFailure;
    case SolveVerdict::Diverged: return kDiverged;
  }
  return kDiverged;
}

int run_moser(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const Model model = cfg.model();
  if (!model.nonlinearity().critical_exponent()) {
    throw ConfigError("moser needs the critical_exp nonlinearity family");
  }
  const auto cert = threshold_certificate(cfg.moser.n_list, cfg.moser.q, model, cfg.moser.margin);

  std::string csv = "n,grad_norm_sq,delta_n,max_t_phi,threshold,pass,error\n";
  Json entries = Json::array();
  for (const auto& e : cert.entries) {
    csv += csv_row({format_double(e.n), opt(e.grad_norm_sq), opt(e.delta_n), opt(e.max_t_phi),
                    format_double(cert.threshold), e.pass ? "1" : "0", Json(e.error).dump()});
    Json j;
    j["n"] = e.n;
    j["pass"] = e.pass;
    if (e.error.empty()) {
      const auto gn = moser_grad_norm_sq(e.n, cfg.moser.q);
      j["grad_norm_sq"] = {{"analytic", gn.analytic}, {"radial", gn.radial},
                           {"relative_difference", std::abs(gn.radial - gn.analytic) / gn.analytic}};
      j["delta_n"] = *e.delta_n;
      j["max_t_phi"] = *e.max_t_phi;
      j["t_max"] = *e.t_max;
    } else {
      j["error"] = e.error;
    }
    entries.push_back(std::move(j));
  }
  write_file(out / "moser.csv", csv);

  Json report;
  report["command"] = "moser";
  report["config"] = config_echo(cfg);
  report["q"] = cfg.moser.q;
  report["threshold"] = cert.threshold;
  report["margin"] = cert.margin;
  report["entries"] = entries;
  report["n0"] = cert.n0 ? Json(*cert.n0) : Json(nullptr);
  report["certified_max"] = cert.certified_max ? Json(*cert.certified_max) : Json(nullptr);
  write_file(out / "moser.json", dump(report));

  log << "moser: " << (cert.n0 ? "n0 = " + format_double(*cert.n0) : std::string("no certified n")) << "\n";
  return cert.n0 ? kPass : kCheckFailure;
}

int run_kernel_bench(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::duration d) { return std::chrono::duration<double>(d).count(); };

  Json rows = Json::array();
  bool pass = true;
  for (const long n : cfg.bench.sizes) {
    const Grid g(cfg.L, n);
    const auto fields = random_fields(g, cfg.seed, 2, cfg.verify.support_radius);
    const Field w1(g, fields[0].values().abs().pow(cfg.p));
    const Field w2(g, fields[1].values().abs().pow(cfg.p));
    for (const auto kind : {KernelKind::LogOnePlusR, KernelKind::LogOnePlusInvR, KernelKind::LogR}) {
      const auto t0 = clock::now();
      const ConvolutionPlan plan(g, kind);
      const double build = seconds(clock::now() - t0);
      double fast = 0, direct = 0, t_fast = 1e300, t_direct = 1e300;
      for (int r = 0; r < cfg.bench.repeats; ++r) {
        auto t = clock::now();
        fast = bilinear_A(plan, w1, w2, EvalPath::Fast);
        t_fast = std::min(t_fast, seconds(clock::now() - t));
        t = clock::now();
        direct = bilinear_A(plan, w1, w2, EvalPath::Direct);
        t_direct = std::min(t_direct, seconds(clock::now() - t));
      }
      const double rel = std::abs(fast - direct) / std::max(std::abs(direct), 1e-300);
      pass = pass && rel <= 1e-10;
      rows.push_back({{"N", n},
                      {"kernel", to_string(kind)},
                      {"plan_seconds", build},
                      {"fast_seconds", t_fast},
                      {"direct_seconds", t_direct},
                      {"fast", fast},
                      {"direct", direct},
                      {"relative_difference", rel}});
    }
  }
  Json report;
  report["command"] = "kernel-bench";
  report["config"] = config_echo(cfg);
  report["workers"] = worker_count();
  report["tolerance"] = 1e-10;
  report["results"] = rows;
  report["pass"] = pass;
  write_file(out / "kernel_bench.json", dump(report));
  log << "kernel-bench: " << (pass ? "agreement within 1e-10" : "FAIL agreement") << "\n";
  return pass ? kPass : kCheckFailure;
}

}  // namespace logsp::cli
