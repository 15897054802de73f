#pragma once

// Nonlinearities f(x, t) with closed-form primitives F(x, t) = int_0^t f(x, s) ds,
// and sampling certificates for the growth and structure conditions.

#include "logsp/grid.hpp"
#include "logsp/potential.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace logsp {

using Point = Eigen::Vector2d;

class Nonlinearity {
 public:
  enum class Family { CriticalExp, SubcriticalPower, SubcriticalExp, User };

  /// f = lambda t (e^{alpha0 t^2} - 1),  F = lambda [(e^{alpha0 t^2} - 1)/(2 alpha0) - t^2/2]
  static Nonlinearity critical_exp(double lambda, double alpha0);
  /// f = b |t|^{q-2} t,  F = (b/q) |t|^q
  static Nonlinearity subcritical_power(double b, double q_pow);
  /// F = lambda (e^{alpha0 |t|^gamma} - 1 - alpha0 |t|^gamma) with gamma in (1, 2),
  /// f = lambda alpha0 gamma |t|^{gamma-2} t (e^{alpha0 |t|^gamma} - 1)
  static Nonlinearity subcritical_exp(double lambda, double alpha0, double gamma = 1.5);
  /// x-dependent family; the caller is responsible for F being the primitive of f.
  static Nonlinearity user(std::function<double(const Point&, double)> f,
                           std::function<double(const Point&, double)> F, std::string name);
  /// f = 0
  static Nonlinearity zero() { return subcritical_power(0.0, 4.0); }

  Family family() const { return family_; }
  std::string name() const;
  bool autonomous() const { return family_ != Family::User; }

  double lambda() const { return lambda_; }
  double alpha0() const { return alpha0_; }
  double b() const { return b_; }
  double q_pow() const { return q_pow_; }
  double gamma() const { return gamma_; }
  /// Critical growth exponent, if the family has one.
  std::optional<double> critical_exponent() const;

  double f(double t) const;
  double F(double t) const;
  double f(const Point& x, double t) const;
  double F(const Point& x, double t) const;
  /// ln |f(t)|, finite where f itself would overflow.
  double log_abs_f(double t) const;
  double log_F(double t) const;

  FieldArray<double> apply_f(const Field& u) const;
  FieldArray<double> apply_F(const Field& u) const;

 private:
  Nonlinearity() = default;

  Family family_ = Family::SubcriticalPower;
  double lambda_ = 0;
  double alpha0_ = 0;
  double b_ = 0;
  double q_pow_ = 0;
  double gamma_ = 0;
  std::string user_name_;
  std::function<double(const Point&, double)> user_f_;
  std::function<double(const Point&, double)> user_F_;
};

enum class ConditionId { V0, F1, F2, F3, F4, F5, F4PrimeMono, F4PrimeAR };
std::string to_string(ConditionId id);
std::optional<ConditionId> condition_from_string(const std::string& name);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict verdict);

struct Witness {
  Point x = Point::Zero();
  double t = 0;
  double violation = 0;
};

struct ConditionReport {
  ConditionId id = ConditionId::F2;
  Verdict verdict = Verdict::Pass;
  std::vector<Witness> witnesses;
  double extremal_ratio = 0;
  std::string note;
};

/// Parameters of the sampled sweep. Unused fields are ignored per condition.
struct CheckParams {
  double t_max = 10.0;
  int samples = 10000;
  double check_tol = 1e-9;
  double p = 2.0;
  double mu = 1.0;    // g_p weight (monotone form) or AR exponent
  double mu1 = 4.0;   // (F4)
  double mu2 = 0.0;   // (F4)
  double M0 = 1.0;    // (F2)
  double t0 = 1.0;    // (F2) threshold
  double t1 = 1.0;    // AR threshold
  double s0 = 2.0;    // (F5) near-zero exponent for p > 2
  double q = 2.0;     // (F3)
  std::vector<Point> points;  // x samples; origin if empty
};

/// Sampling certificate: pass means no violation found at this resolution.
ConditionReport check_condition(const Nonlinearity& nl, const Potential& potential,
                                ConditionId id, const CheckParams& params);

/// Symmetric t samples: log-spaced near 0 and near t_max, linear in between.
std::vector<double> condition_t_samples(double t_max, int samples);

struct GammaEstimate {
  double estimate = 0;                 // min sampled ||u|| / ||u||_{H^1}
  std::optional<double> analytic_floor;  // min(1, sqrt(V)) for constant V
};

/// Upper estimate of inf ||u|| / ||u||_{H^1} over random smooth fields.
GammaEstimate estimate_gamma(const Potential& potential, const Grid& grid, int samples,
                             unsigned long long seed = 1);

/// sup_{0 < |t| <= t1} F(t) / t^2, sampled.
double m_t1(const Nonlinearity& nl, double t1, int samples = 10000);

}  // namespace logsp
