#pragma once

// Critical point search restricted to a symmetry-invariant subspace. Nehari
// descent is the workhorse; the mountain pass is an independent cross-check.

#include "logsp/functional.hpp"
#include "logsp/symmetry.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace logsp {

enum class SolveMethod { Nehari, MountainPass };
enum class InitKind { Ring, RandomSymmetric, File };
enum class SolveVerdict { Converged, MaxIter, Diverged };

std::string to_string(SolveMethod m);
std::string to_string(InitKind k);
std::string to_string(SolveVerdict v);

struct SolveConfig {
  SolveMethod method = SolveMethod::Nehari;
  int max_iter = 2000;
  double eta0 = 1.0;
  double armijo = 1e-4;
  int max_backtracks = 20;
  double rel_tol = 1e-6;  // stop when rho <= rel_tol (1 + |Phi|)
  double sym_tol = 1e-10;

  InitKind init = InitKind::Ring;
  double ring_radius = 1.0;
  double ring_width = 0.5;
  double ring_amplitude = 1.0;
  double random_support = 2.0;
  unsigned long long seed = 1;
  std::string init_file;

  int path_nodes = 40;
  int reparam_every = 50;

  void validate() const;
};

struct TraceRow {
  int iter = 0;
  double phi = 0;
  double rho = 0;
  double defect = 0;
};

struct SolveReport {
  std::string method;
  SolveVerdict verdict = SolveVerdict::MaxIter;
  int iterations = 0;
  double phi = 0;
  double rho = 0;
  double tolerance = 0;
  double defect = 0;
  double t_u = 0;     // fiber maximizer of the final field (1 on the Nehari set)
  double nehari = 0;  // <Phi'(u), u>
  double norm_sq = 0;
  std::optional<double> endpoint_phi;  // mountain pass only
  std::vector<TraceRow> trace;
  std::string message;
  std::optional<Field> u;
};

struct FiberResult {
  double t = 0;
  double phi = 0;
  int sign_changes = 0;  // of zeta' on the coarse geometric scan
  bool unique = true;
};

/// Maximizer of zeta(t) = Phi(t u) over t > 0. Throws std::runtime_error when zeta'
/// never turns negative.
FiberResult fiber_maximize(const Field& u, const Model& model);
FiberResult fiber_maximize(const RayProfile& ray);

/// Sign changes of zeta' on a log grid of `samples` points in [t_lo, t_hi].
int fiber_sign_changes(const RayProfile& ray, double t_lo, double t_hi, int samples = 10000);

/// Symmetric starting field per the config (already group averaged).
Field initial_field(const SolveConfig& cfg, const Model& model, const SymmetryGroup& group);

/// Reads "x,y,u" rows written by write_field_csv; the grid must match.
Field read_field_csv(const std::string& path, const Grid& grid);

/// Riesz map of the H inner product: solves (-Delta_h + V) d = g.
class RieszMap {
 public:
  explicit RieszMap(const Model& model);
  ~RieszMap();
  RieszMap(RieszMap&&) noexcept;
  Field operator()(const Field& g) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SolveReport nehari_minimize(const SolveConfig& cfg, const Model& model, const SymmetryGroup& group,
                            const std::optional<Field>& start = std::nullopt);

SolveReport mountain_pass(const SolveConfig& cfg, const Model& model, const SymmetryGroup& group,
                          const std::optional<Field>& start = std::nullopt);

SolveReport solve(const SolveConfig& cfg, const Model& model, const SymmetryGroup& group);

}  // namespace logsp
