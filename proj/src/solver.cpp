#include "logsp/solver.hpp"

#include "logsp/fields.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace logsp {

namespace {

double tolerance_for(const SolveConfig& cfg, double phi) { return cfg.rel_tol * (1.0 + std::abs(phi)); }

TraceRow make_row(int iter, double phi, double rho, double defect) { return {iter, phi, rho, defect}; }

// Bisection on zeta' in log t, between a point where zeta' > 0 and one where it is < 0.
double bisect_root(const RayProfile& ray, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double d = ray.dphi(mid);
    if (d > 0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

void finish_report(SolveReport& rep, const Field& u, const Model& model, const SymmetryGroup& group) {
  const Field g = gradient(u, model);
  const EnergyBreakdown e = energy(u, model);
  rep.phi = e.total;
  rep.norm_sq = 2.0 * e.quadratic;
  rep.rho = residual_from_gradient(u, g, model);
  rep.defect = symmetry_defect(group, u);
  rep.nehari = integrate(model.grid(), g.values() * u.values());
  try {
    rep.t_u = fiber_maximize(u, model).t;
  } catch (const std::runtime_error&) {
    rep.t_u = std::numeric_limits<double>::quiet_NaN();
  }
  rep.u = u;
}

}  // namespace

std::string to_string(SolveMethod m) { return m == SolveMethod::Nehari ? "nehari" : "mountain_pass"; }

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::Ring: return "ring";
    case InitKind::RandomSymmetric: return "random";
    case InitKind::File: return "file";
  }
  return "?";
}

std::string to_string(SolveVerdict v) {
  switch (v) {
    case SolveVerdict::Converged: return "converged";
    case SolveVerdict::MaxIter: return "max_iter";
    case SolveVerdict::Diverged: return "diverged";
  }
  return "?";
}

void SolveConfig::validate() const {
  if (max_iter < 1) throw std::invalid_argument("solver.max_iter must be >= 1");
  if (!(eta0 > 0)) throw std::invalid_argument("solver.eta0 must be positive");
  if (!(armijo > 0 && armijo < 1)) throw std::invalid_argument("solver.armijo must be in (0,1)");
  if (max_backtracks < 1) throw std::invalid_argument("solver.max_backtracks must be >= 1");
  if (!(rel_tol > 0)) throw std::invalid_argument("solver.tol must be positive");
  if (!(sym_tol > 0)) throw std::invalid_argument("solver.sym_tol must be positive");
  if (path_nodes < 3) throw std::invalid_argument("solver.path_nodes must be >= 3");
  if (reparam_every < 1) throw std::invalid_argument("solver.reparam_every must be >= 1");
  if (init == InitKind::File && init_file.empty()) throw std::invalid_argument("solver.init_file missing");
}

int fiber_sign_changes(const RayProfile& ray, double t_lo, double t_hi, int samples) {
  if (!(t_lo > 0 && t_hi > t_lo) || samples < 2) throw std::invalid_argument("fiber_sign_changes: bad range");
  int changes = 0;
  int prev = 0;
  const double a = std::log(t_lo), b = std::log(t_hi);
  for (int i = 0; i < samples; ++i) {
    const double d = ray.dphi(std::exp(a + (b - a) * i / (samples - 1)));
    const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (s != 0) {
      if (prev != 0 && s != prev) ++changes;
      prev = s;
    }
  }
  return changes;
}

FiberResult fiber_maximize(const RayProfile& ray) {
  if (!(ray.norm_sq() > 0)) throw std::runtime_error("fiber_maximize: zero field");
  std::vector<double> ts;
  for (double t = 1e-8; t <= 1e8; t *= 1.5) ts.push_back(t);
  std::vector<double> ds(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) ds[i] = ray.dphi(ts[i]);

  FiberResult best;
  best.phi = -std::numeric_limits<double>::infinity();
  bool found = false;
  int prev = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const int s = ds[i] > 0 ? 1 : (ds[i] < 0 ? -1 : 0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++best.sign_changes;
    if (prev == 1 && s == -1) {
      const double t = bisect_root(ray, ts[i - 1], ts[i]);
      const double v = ray.phi(t);
      if (!found || v > best.phi) {
        best.t = t;
        best.phi = v;
      }
      found = true;
    }
    prev = s;
  }
  if (!found || !(best.phi > 0)) throw std::runtime_error("fiber_maximize: no positive maximum on the ray");
  best.unique = best.sign_changes == 1;
  return best;
}

FiberResult fiber_maximize(const Field& u, const Model& model) {
  return fiber_maximize(RayProfile(u, model));
}

Field read_field_csv(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open field file " + path);
  std::string line;
  std::getline(in, line);
  Field u(grid);
  std::vector<char> seen(std::size_t(grid.size() * grid.size()), 0);
  const double h = grid.spacing();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x, y, v;
    if (!(row >> x >> y >> v)) throw std::invalid_argument("malformed field row: " + line);
    const double fi = (x + grid.half_width()) / h - 0.5;
    const double fj = (y + grid.half_width()) / h - 0.5;
    const long i = std::lround(fi), j = std::lround(fj);
    if (i < 0 || j < 0 || i >= grid.size() || j >= grid.size() || std::abs(fi - i) > 1e-6 ||
        std::abs(fj - j) > 1e-6) {
      throw std::invalid_argument("field file does not match the grid");
    }
    u(i, j) = v;
    seen[std::size_t(i + grid.size() * j)] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw std::invalid_argument("field file does not cover the grid");
  }
  return u;
}

Field initial_field(const SolveConfig& cfg, const Model& model, const SymmetryGroup& group) {
  const Grid& grid = model.grid();
  Field u(grid);
  switch (cfg.init) {
    case InitKind::Ring:
      u = bump_ring(grid, group.k(), cfg.ring_radius, cfg.ring_width, cfg.ring_amplitude);
      break;
    case InitKind::RandomSymmetric: {
      Rng rng(cfg.seed);
      u = random_smooth_field(grid, rng, cfg.random_support);
      break;
    }
    case InitKind::File:
      u = read_field_csv(cfg.init_file, grid);
      break;
  }
  u = group_average(group, u);
  if (symmetry_defect(group, u) > cfg.sym_tol && group.exact_on_grid()) {
    throw std::runtime_error("initial field is not group invariant after projection");
  }
  return u;
}

struct RieszMap::Impl {
  explicit Impl(const Grid& g) : grid(g) {}
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  Grid grid;
};

RieszMap::RieszMap(const Model& model) : impl_(std::make_unique<Impl>(model.grid())) {
  const Grid& g = model.grid();
  const Index n = g.size();
  const double ih2 = 1.0 / (g.spacing() * g.spacing());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(std::size_t(5 * n * n));
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Index row = i + n * j;
      trips.emplace_back(row, row, 4.0 * ih2 + model.V()(i, j));
      if (i > 0) trips.emplace_back(row, row - 1, -ih2);
      if (i + 1 < n) trips.emplace_back(row, row + 1, -ih2);
      if (j > 0) trips.emplace_back(row, row - n, -ih2);
      if (j + 1 < n) trips.emplace_back(row, row + n, -ih2);
    }
  }
  Eigen::SparseMatrix<double> K(n * n, n * n);
  K.setFromTriplets(trips.begin(), trips.end());
  impl_->llt.compute(K);
  if (impl_->llt.info() != Eigen::Success) throw std::runtime_error("Riesz map: factorization failed");
}

RieszMap::~RieszMap() = default;
RieszMap::RieszMap(RieszMap&&) noexcept = default;

Field RieszMap::operator()(const Field& g) const {
  const Index n = impl_->grid.size();
  const Eigen::Map<const Eigen::VectorXd> rhs(g.values().data(), n * n);
  Eigen::VectorXd sol = impl_->llt.solve(rhs);
  FieldArray<double> out = Eigen::Map<FieldArray<double>>(sol.data(), n, n);
  return Field(g.grid(), std::move(out));
}

SolveReport nehari_minimize(const SolveConfig& cfg, const Model& model, const SymmetryGroup& group,
                            const std::optional<Field>& start) {
  cfg.validate();
  SolveReport rep;
  rep.method = to_string(SolveMethod::Nehari);
  const RieszMap riesz(model);
  Field u = group_average(group, start ? *start : initial_field(cfg, model, group));
  u = fiber_maximize(u, model).t * u;

  double phi = energy(u, model).total;
  for (int iter = 0;; ++iter) {
    const Field g = gradient(u, model);
    const double rho = residual_from_gradient(u, g, model);
    rep.trace.push_back(make_row(iter, phi, rho, symmetry_defect(group, u)));
    rep.iterations = iter;
    rep.tolerance = tolerance_for(cfg, phi);
    if (rho <= rep.tolerance) {
      rep.verdict = SolveVerdict::Converged;
      break;
    }
    if (iter >= cfg.max_iter) {
      rep.verdict = SolveVerdict::MaxIter;
      break;
    }

    Field d = group_average(group, riesz(g));
    const double radial = inner_H(d, u, model.V()) / norm_H_squared(u, model.V());
    d = d - radial * u;
    const double slope = integrate(model.grid(), g.values() * d.values());

    double eta = cfg.eta0;
    bool accepted = false;
    Field next(u.grid());
    double next_phi = phi;
    for (int b = 0; b < cfg.max_backtracks; ++b, eta *= 0.5) {
      const Field w = group_average(group, u - eta * d);
      FiberResult fr;
      try {
        fr = fiber_maximize(w, model);
      } catch (const std::runtime_error&) {
        continue;
      }
      next = fr.t * w;
      next_phi = fr.phi;
      if (fr.phi <= phi - cfg.armijo * eta * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Roundoff floor: accept a non-increasing step, otherwise give up.
      if (next_phi <= phi + 1e-12 * (1.0 + std::abs(phi)) && next_phi != phi) {
        accepted = true;
      } else {
        rep.verdict = SolveVerdict::Diverged;
        rep.message = "no descent after backtracking";
        break;
      }
    }
    u = next;
    phi = next_phi;
  }
  finish_report(rep, u, model, group);
  if (rep.verdict == SolveVerdict::Converged && !(rep.phi > 0)) {
    rep.verdict = SolveVerdict::Diverged;
    rep.message = "converged to a non-positive level";
  }
  return rep;
}

namespace {

// Brent maximization of Phi on the segment a + s (b - a), s in [0, 1].
std::pair<double, Field> segment_max(const Field& a, const Field& b, const Model& model) {
  const Field dir = b - a;
  auto f = [&](double s) { return -energy(a + s * dir, model).total; };
  const double cgold = 0.5 * (3.0 - std::sqrt(5.0));
  double lo = 0, hi = 1;
  double x = lo + cgold * (hi - lo), w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0, e = 0;
  for (int it = 0; it < 60; ++it) {
    const double xm = 0.5 * (lo + hi);
    const double tol1 = 1e-9 * std::abs(x) + 1e-12;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (hi - lo)) break;
    bool golden = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0) p = -p;
      q = std::abs(q);
      if (std::abs(p) < std::abs(0.5 * q * e) && p > q * (lo - x) && p < q * (hi - x)) {
        e = d;
        d = p / q;
        const double u = x + d;
        if (u - lo < tol2 || hi - u < tol2) d = xm >= x ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      e = (x >= xm ? lo : hi) - x;
      d = cgold * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0 ? tol1 : -tol1);
    const double fu = f(u);
    if (fu <= fx) {
      (u >= x ? lo : hi) = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      (u < x ? lo : hi) = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {-fx, a + x * dir};
}

// Equal arc length in the H norm; endpoints stay put.
void reparametrize(std::vector<Field>& path, std::vector<double>& energies, const Model& model) {
  const std::size_t m = path.size() - 1;
  std::vector<double> arc(m + 1, 0.0);
  for (std::size_t i = 1; i <= m; ++i) arc[i] = arc[i - 1] + norm_H(path[i] - path[i - 1], model.V());
  if (!(arc[m] > 0)) return;
  std::vector<Field> fresh(path);
  std::size_t seg = 0;
  for (std::size_t j = 1; j < m; ++j) {
    const double target = arc[m] * double(j) / double(m);
    while (seg + 1 < m && arc[seg + 1] < target) ++seg;
    const double len = arc[seg + 1] - arc[seg];
    const double s = len > 0 ? (target - arc[seg]) / len : 0.0;
    fresh[j] = path[seg] + s * (path[seg + 1] - path[seg]);
  }
  path.swap(fresh);
  for (std::size_t j = 1; j < m; ++j) energies[j] = energy(path[j], model).total;
}

}  // namespace

SolveReport mountain_pass(const SolveConfig& cfg, const Model& model, const SymmetryGroup& group,
                          const std::optional<Field>& start) {
  cfg.validate();
  SolveReport rep;
  rep.method = to_string(SolveMethod::MountainPass);
  const RieszMap riesz(model);
  const Field u0 = group_average(group, start ? *start : initial_field(cfg, model, group));

  double t_end = 1.0;
  double e_phi = energy(u0, model).total;
  for (int k = 0; k < 80 && !(e_phi < 0); ++k) {
    t_end *= 2.0;
    e_phi = energy(t_end * u0, model).total;
  }
  if (!(e_phi < 0)) throw std::runtime_error("mountain_pass: no endpoint with negative energy on the ray");
  rep.endpoint_phi = e_phi;

  const int m = cfg.path_nodes;
  std::vector<Field> path;
  std::vector<double> energies;
  for (int i = 0; i <= m; ++i) {
    path.push_back((t_end * double(i) / m) * u0);
    energies.push_back(i == 0 ? 0.0 : energy(path.back(), model).total);
  }

  Field u = path[1];
  for (int iter = 0;; ++iter) {
    if (iter > 0 && iter % cfg.reparam_every == 0) reparametrize(path, energies, model);
    const int k = int(std::max_element(energies.begin() + 1, energies.end() - 1) - energies.begin());
    if (!(energies[std::size_t(k)] > 0)) {
      rep.verdict = SolveVerdict::Diverged;
      rep.message = "path collapsed below the zero level";
      u = path[std::size_t(k)];
      break;
    }
    for (int side : {-1, 1}) {
      auto [v, w] = segment_max(path[std::size_t(k + side)], path[std::size_t(k)], model);
      if (v > energies[std::size_t(k)]) {
        path[std::size_t(k)] = group_average(group, w);
        energies[std::size_t(k)] = energy(path[std::size_t(k)], model).total;
      }
    }
    u = path[std::size_t(k)];
    const double phi = energies[std::size_t(k)];
    const Field g = gradient(u, model);
    const double rho = residual_from_gradient(u, g, model);
    rep.trace.push_back(make_row(iter, phi, rho, symmetry_defect(group, u)));
    rep.iterations = iter;
    rep.tolerance = tolerance_for(cfg, phi);
    if (rho <= rep.tolerance) {
      rep.verdict = SolveVerdict::Converged;
      break;
    }
    if (iter >= cfg.max_iter) {
      rep.verdict = SolveVerdict::MaxIter;
      break;
    }
    const Field d = group_average(group, riesz(g));
    const double slope = integrate(model.grid(), g.values() * d.values());
    double eta = cfg.eta0;
    bool accepted = false;
    for (int b = 0; b < cfg.max_backtracks; ++b, eta *= 0.5) {
      const Field w = group_average(group, u - eta * d);
      const double v = energy(w, model).total;
      if (v <= phi - cfg.armijo * eta * slope) {
        path[std::size_t(k)] = w;
        energies[std::size_t(k)] = v;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rep.verdict = SolveVerdict::Diverged;
      rep.message = "no descent after backtracking";
      break;
    }
  }
  finish_report(rep, u, model, group);
  if (rep.verdict == SolveVerdict::Converged && !(rep.phi > 0)) {
    rep.verdict = SolveVerdict::Diverged;
    rep.message = "converged to a non-positive level";
  }
  return rep;
}

SolveReport solve(const SolveConfig& cfg, const Model& model, const SymmetryGroup& group) {
  return cfg.method == SolveMethod::Nehari ? nehari_minimize(cfg, model, group)
                                           : mountain_pass(cfg, model, group);
}

}  // namespace logsp
