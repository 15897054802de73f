#include "logsp/nonlinearity.hpp"

#include "logsp/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace logsp {

namespace {

// e^s - 1 - s without cancellation for small s.
double expm1_minus_x(double s) {
  if (std::abs(s) < 0.5) {
    double term = 0.5 * s * s;
    double acc = term;
    for (int k = 3; k < 30; ++k) {
      term *= s / k;
      acc += term;
      if (std::abs(term) < 1e-18 * std::abs(acc)) break;
    }
    return acc;
  }
  return std::expm1(s) - s;
}

// ln(e^s - 1) for s > 0, stable for large s.
double log_expm1(double s) { return s > 30 ? s + std::log1p(-std::exp(-s)) : std::log(std::expm1(s)); }

// ln(e^s - 1 - s) for s > 0.
double log_expm1_minus_x(double s) {
  return s > 30 ? s + std::log1p(-(1.0 + s) * std::exp(-s)) : std::log(expm1_minus_x(s));
}

constexpr double kRoundoff = 64 * std::numeric_limits<double>::epsilon();

struct Sweep {
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<Witness> witnesses;

  // violation > 0 means the inequality fails by that (relative) amount.
  void record(const Point& x, double t, double violation) {
    if (std::isnan(violation)) violation = std::numeric_limits<double>::infinity();
    worst = std::max(worst, violation);
    if (violation > kRoundoff) {
      witnesses.push_back({x, t, violation});
    }
  }

  ConditionReport finish(ConditionId id, double tol) {
    ConditionReport rep;
    rep.id = id;
    rep.extremal_ratio = worst;
    std::sort(witnesses.begin(), witnesses.end(),
              [](const Witness& a, const Witness& b) { return a.violation > b.violation; });
    if (worst <= kRoundoff) {
      rep.verdict = Verdict::Pass;
    } else if (worst <= tol) {
      rep.verdict = Verdict::Inconclusive;
      rep.note = "tight within check_tol";
    } else {
      rep.verdict = Verdict::Fail;
    }
    if (witnesses.size() > 5) witnesses.resize(5);
    rep.witnesses = std::move(witnesses);
    return rep;
  }
};

// Relative violation of lhs >= rhs.
double violation(double lhs, double rhs) {
  const double scale = std::abs(lhs) + std::abs(rhs);
  if (scale == 0) return 0;
  return (rhs - lhs) / scale;
}

std::vector<Point> sample_points(const CheckParams& params) {
  if (params.points.empty()) return {Point::Zero()};
  return params.points;
}

}  // namespace

Nonlinearity Nonlinearity::critical_exp(double lambda, double alpha0) {
  if (!(lambda > 0) || !(alpha0 > 0)) {
    throw std::invalid_argument("critical_exp: lambda and alpha0 must be positive");
  }
  Nonlinearity nl;
  nl.family_ = Family::CriticalExp;
  nl.lambda_ = lambda;
  nl.alpha0_ = alpha0;
  return nl;
}

Nonlinearity Nonlinearity::subcritical_power(double b, double q_pow) {
  if (!(b >= 0)) throw std::invalid_argument("subcritical_power: b must be >= 0");
  if (!(q_pow >= 2)) throw std::invalid_argument("subcritical_power: q_pow must be >= 2");
  Nonlinearity nl;
  nl.family_ = Family::SubcriticalPower;
  nl.b_ = b;
  nl.q_pow_ = q_pow;
  return nl;
}

Nonlinearity Nonlinearity::subcritical_exp(double lambda, double alpha0, double gamma) {
  if (!(lambda > 0) || !(alpha0 > 0)) {
    throw std::invalid_argument("subcritical_exp: lambda and alpha0 must be positive");
  }
  if (!(gamma > 1 && gamma < 2)) throw std::invalid_argument("subcritical_exp: gamma in (1,2)");
  Nonlinearity nl;
  nl.family_ = Family::SubcriticalExp;
  nl.lambda_ = lambda;
  nl.alpha0_ = alpha0;
  nl.gamma_ = gamma;
  return nl;
}

Nonlinearity Nonlinearity::user(std::function<double(const Point&, double)> f,
                                std::function<double(const Point&, double)> F, std::string name) {
  if (!f || !F) throw std::invalid_argument("user nonlinearity: f and F are required");
  Nonlinearity nl;
  nl.family_ = Family::User;
  nl.user_f_ = std::move(f);
  nl.user_F_ = std::move(F);
  nl.user_name_ = std::move(name);
  return nl;
}

std::string Nonlinearity::name() const {
  switch (family_) {
    case Family::CriticalExp: return "critical_exp";
    case Family::SubcriticalPower: return "subcritical_power";
    case Family::SubcriticalExp: return "subcritical_exp";
    case Family::User: return user_name_;
  }
  return "?";
}

std::optional<double> Nonlinearity::critical_exponent() const {
  if (family_ == Family::CriticalExp) return alpha0_;
  return std::nullopt;
}

double Nonlinearity::f(double t) const {
  switch (family_) {
    case Family::CriticalExp:
      return lambda_ * t * std::expm1(alpha0_ * t * t);
    case Family::SubcriticalPower:
      return b_ * std::pow(std::abs(t), q_pow_ - 2.0) * t;
    case Family::SubcriticalExp: {
      if (t == 0) return 0.0;
      const double a = std::abs(t);
      return lambda_ * alpha0_ * gamma_ * std::pow(a, gamma_ - 2.0) * t *
             std::expm1(alpha0_ * std::pow(a, gamma_));
    }
    case Family::User:
      return user_f_(Point::Zero(), t);
  }
  return 0.0;
}

double Nonlinearity::F(double t) const {
  switch (family_) {
    case Family::CriticalExp:
      return lambda_ * expm1_minus_x(alpha0_ * t * t) / (2.0 * alpha0_);
    case Family::SubcriticalPower:
      return b_ / q_pow_ * std::pow(std::abs(t), q_pow_);
    case Family::SubcriticalExp:
      return lambda_ * expm1_minus_x(alpha0_ * std::pow(std::abs(t), gamma_));
    case Family::User:
      return user_F_(Point::Zero(), t);
  }
  return 0.0;
}

double Nonlinearity::f(const Point& x, double t) const {
  return family_ == Family::User ? user_f_(x, t) : f(t);
}

double Nonlinearity::F(const Point& x, double t) const {
  return family_ == Family::User ? user_F_(x, t) : F(t);
}

double Nonlinearity::log_abs_f(double t) const {
  const double a = std::abs(t);
  if (a == 0) return -std::numeric_limits<double>::infinity();
  switch (family_) {
    case Family::CriticalExp:
      return std::log(lambda_) + std::log(a) + log_expm1(alpha0_ * a * a);
    case Family::SubcriticalPower:
      return std::log(b_) + (q_pow_ - 1.0) * std::log(a);
    case Family::SubcriticalExp:
      return std::log(lambda_ * alpha0_ * gamma_) + (gamma_ - 1.0) * std::log(a) +
             log_expm1(alpha0_ * std::pow(a, gamma_));
    case Family::User:
      return std::log(std::abs(user_f_(Point::Zero(), t)));
  }
  return 0.0;
}

double Nonlinearity::log_F(double t) const {
  const double a = std::abs(t);
  if (a == 0) return -std::numeric_limits<double>::infinity();
  switch (family_) {
    case Family::CriticalExp:
      return std::log(lambda_ / (2.0 * alpha0_)) + log_expm1_minus_x(alpha0_ * a * a);
    case Family::SubcriticalPower:
      return std::log(b_ / q_pow_) + q_pow_ * std::log(a);
    case Family::SubcriticalExp:
      return std::log(lambda_) + log_expm1_minus_x(alpha0_ * std::pow(a, gamma_));
    case Family::User:
      return std::log(user_F_(Point::Zero(), t));
  }
  return 0.0;
}

FieldArray<double> Nonlinearity::apply_f(const Field& u) const {
  if (autonomous()) return u.values().unaryExpr([this](double t) { return f(t); });
  const auto& g = u.grid();
  FieldArray<double> out(g.size(), g.size());
  for (Index j = 0; j < g.size(); ++j)
    for (Index i = 0; i < g.size(); ++i) out(i, j) = user_f_(Point(g.coord(i), g.coord(j)), u(i, j));
  return out;
}

FieldArray<double> Nonlinearity::apply_F(const Field& u) const {
  if (autonomous()) return u.values().unaryExpr([this](double t) { return F(t); });
  const auto& g = u.grid();
  FieldArray<double> out(g.size(), g.size());
  for (Index j = 0; j < g.size(); ++j)
    for (Index i = 0; i < g.size(); ++i) out(i, j) = user_F_(Point(g.coord(i), g.coord(j)), u(i, j));
  return out;
}

std::string to_string(ConditionId id) {
  switch (id) {
    case ConditionId::V0: return "V0";
    case ConditionId::F1: return "F1";
    case ConditionId::F2: return "F2";
    case ConditionId::F3: return "F3";
    case ConditionId::F4: return "F4";
    case ConditionId::F5: return "F5";
    case ConditionId::F4PrimeMono: return "F4prime_mono";
    case ConditionId::F4PrimeAR: return "F4prime_AR";
  }
  return "?";
}

std::optional<ConditionId> condition_from_string(const std::string& name) {
  for (auto id : {ConditionId::V0, ConditionId::F1, ConditionId::F2, ConditionId::F3,
                  ConditionId::F4, ConditionId::F5, ConditionId::F4PrimeMono,
                  ConditionId::F4PrimeAR}) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<double> condition_t_samples(double t_max, int samples) {
  if (!(t_max > 0) || samples < 8) throw std::invalid_argument("condition sweep: bad sampling box");
  const int per_side = samples / 2;
  const int half = per_side / 2;
  std::vector<double> pos;
  pos.reserve(per_side);
  const double lo = std::log(1e-6), hi = std::log(0.5);
  for (int k = 0; k < half; ++k) {
    pos.push_back(t_max * std::exp(lo + (hi - lo) * k / (half - 1)));
  }
  const int rest = per_side - half;
  for (int k = rest - 1; k >= 0; --k) {
    // gaps to t_max log-spaced from 0.5 t_max down to 1e-6 t_max, then t_max itself
    const double gap = k == 0 ? 0.0 : 0.5 * t_max * std::exp(lo * (1.0 - double(k) / (rest - 1)));
    pos.push_back(t_max - gap);
  }
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  std::vector<double> out;
  out.reserve(2 * pos.size());
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
  out.insert(out.end(), pos.begin(), pos.end());
  return out;
}

ConditionReport check_condition(const Nonlinearity& nl, const Potential& potential, ConditionId id,
                                const CheckParams& params) {
  const auto points = sample_points(params);
  const auto ts = condition_t_samples(params.t_max, params.samples);
  Sweep sweep;

  switch (id) {
    case ConditionId::V0: {
      for (const auto& x : points) sweep.record(x, 0.0, potential(x.x(), x.y()) < 0 ? 1.0 : 0.0);
      double far_inf = std::numeric_limits<double>::infinity();
      for (int a = 0; a < 360; ++a) {
        const double th = 2.0 * std::numbers::pi * a / 360;
        const Point x(params.t_max * std::cos(th), params.t_max * std::sin(th));
        const double v = potential(x.x(), x.y());
        far_inf = std::min(far_inf, v);
        sweep.record(x, 0.0, v < 0 ? 1.0 : 0.0);
      }
      if (!(far_inf > 0)) sweep.record(Point(params.t_max, 0), 0.0, 1.0);
      auto rep = sweep.finish(id, params.check_tol);
      rep.extremal_ratio = far_inf;
      rep.note = "inf of V on the far ring reported as extremal_ratio";
      return rep;
    }
    case ConditionId::F1: {
      if (auto a0 = nl.critical_exponent()) {
        // f(t) e^{-alpha t^2} -> 0 for alpha > alpha0 and -> infinity below it.
        const double t = std::max(10.0, params.t_max);
        const double above = nl.log_abs_f(t) - 1.2 * *a0 * t * t;
        const double below = nl.log_abs_f(t) - 0.8 * *a0 * t * t;
        sweep.record(Point::Zero(), t, above < std::log(1e-6) ? 0.0 : 1.0);
        sweep.record(Point::Zero(), -t, below > std::log(1e6) ? 0.0 : 1.0);
        auto rep = sweep.finish(id, params.check_tol);
        rep.extremal_ratio = above;
        rep.note = "critical growth tag in log space";
        return rep;
      }
      // Subcritical: ln|f(t)| / t^2 decreasing on the upper half of the box.
      double prev = std::numeric_limits<double>::infinity();
      for (double t : ts) {
        if (t < 0.5 * params.t_max) continue;
        const double g = nl.log_abs_f(t) / (t * t);
        sweep.record(Point::Zero(), t, std::isfinite(prev) ? violation(prev, g) : 0.0);
        prev = g;
      }
      auto rep = sweep.finish(id, params.check_tol);
      rep.note = "subcritical: ln|f|/t^2 decreasing at large t";
      return rep;
    }
    case ConditionId::F2: {
      for (const auto& x : points) {
        for (double t : ts) {
          const double ft = nl.f(x, t);
          sweep.record(x, t, ft * t >= 0 ? 0.0 : 1.0);
          if (std::abs(t) >= params.t0) {
            sweep.record(x, t, violation(params.M0 * std::abs(ft), nl.F(x, t)));
          }
        }
      }
      return sweep.finish(id, params.check_tol);
    }
    case ConditionId::F3: {
      const auto a0 = nl.critical_exponent();
      if (!a0) {
        ConditionReport rep;
        rep.id = id;
        rep.verdict = Verdict::Inconclusive;
        rep.note = "family has no critical exponent";
        return rep;
      }
      // q ln|t| + ln F(t) - alpha0 t^2 must increase without bound.
      double prev = -std::numeric_limits<double>::infinity();
      double last = 0;
      for (double t : ts) {
        if (t < 0.5 * params.t_max) continue;
        const double g = params.q * std::log(t) + nl.log_F(t) - *a0 * t * t;
        if (std::isfinite(prev)) sweep.record(Point::Zero(), t, g < prev ? (prev - g) / (1 + std::abs(g)) : 0.0);
        prev = g;
        last = g;
      }
      auto rep = sweep.finish(id, params.check_tol);
      rep.extremal_ratio = last;
      return rep;
    }
    case ConditionId::F4: {
      for (const auto& x : points) {
        const double v = potential(x.x(), x.y());
        for (double t : ts) {
          const double lhs = nl.f(x, t) * t;
          const double rhs = params.mu1 * nl.F(x, t) - params.mu2 * v * t * t;
          sweep.record(x, t, violation(lhs, rhs));
        }
      }
      return sweep.finish(id, params.check_tol);
    }
    case ConditionId::F5: {
      const double lo = std::log(1e-8), hi = std::log(1e-2);
      const int m = 200;
      double worst_small = 0, worst_mid = 0, worst_floor = 0;
      for (const auto& x : points) {
        for (int k = 0; k < m; ++k) {
          const double t = std::exp(lo + (hi - lo) * k / (m - 1));
          for (double s : {t, -t}) {
            const double expo = params.p == 2.0 ? 1.0 : params.s0;
            const double ratio = std::abs(nl.f(x, s)) / std::pow(t, expo);
            if (t <= 1e-5) worst_small = std::max(worst_small, ratio);
            else worst_mid = std::max(worst_mid, ratio);
            if (k == 0) worst_floor = std::max(worst_floor, ratio);
          }
        }
      }
      if (params.p == 2.0) {
        // f(t)/t -> 0: either negligible already, or still visibly decaying over the
        // last three decades (log slope at least 0.05).
        const double decay = std::log(std::max(worst_small, 1e-300)) - std::log(std::max(worst_floor, 1e-300));
        const bool decaying = decay >= 0.05 * std::log(1e3);
        sweep.record(Point::Zero(), 1e-8, worst_floor > params.check_tol && !decaying ? worst_floor : 0.0);
      } else {
        // |f(t)|/|t|^{s0} stays bounded as t -> 0
        sweep.record(Point::Zero(), 1e-8,
                     worst_small > worst_mid * (1 + params.check_tol) + params.check_tol
                         ? violation(worst_mid, worst_small)
                         : 0.0);
      }
      auto rep = sweep.finish(id, params.check_tol);
      rep.extremal_ratio = worst_small;
      if (params.p != 2.0) rep.note = "exponent s taken equal to s0";
      return rep;
    }
    case ConditionId::F4PrimeMono: {
      const double power = 2.0 * params.p - 1.0;
      for (const auto& x : points) {
        const double v = potential(x.x(), x.y());
        auto g = [&](double t) { return (nl.f(x, t) - params.mu * v * t) / std::pow(std::abs(t), power); };
        double prev = 0;
        double prev_t = 0;
        for (double t : ts) {
          const double gt = g(t);
          if (prev_t != 0 && (prev_t > 0) == (t > 0)) sweep.record(x, t, violation(gt, prev));
          prev = gt;
          prev_t = t;
        }
      }
      return sweep.finish(id, params.check_tol);
    }
    case ConditionId::F4PrimeAR: {
      for (const auto& x : points) {
        for (double t : ts) {
          const double ft = nl.f(x, t) * t;
          sweep.record(x, t, ft > 0 ? 0.0 : 1.0);
          if (std::abs(t) >= params.t1) sweep.record(x, t, violation(ft, params.mu * nl.F(x, t)));
        }
      }
      return sweep.finish(id, params.check_tol);
    }
  }
  throw std::invalid_argument("check_condition: unknown condition");
}

GammaEstimate estimate_gamma(const Potential& potential, const Grid& grid, int samples,
                             unsigned long long seed) {
  if (samples < 1) throw std::invalid_argument("estimate_gamma: samples must be >= 1");
  const Field v = potential.sample(grid);
  const Field one(grid, FieldArray<double>::Ones(grid.size(), grid.size()));
  Rng rng(seed);
  GammaEstimate out;
  out.estimate = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const Field u = random_smooth_field(grid, rng, 0.5 * grid.half_width(), 3);
    const double num = norm_H_squared(u, v);
    const double den = norm_H_squared(u, one);
    if (den > 0) out.estimate = std::min(out.estimate, std::sqrt(num / den));
  }
  if (potential.is_constant()) out.analytic_floor = std::min(1.0, std::sqrt(potential.v0()));
  return out;
}

double m_t1(const Nonlinearity& nl, double t1, int samples) {
  if (!(t1 > 0)) throw std::invalid_argument("m_t1: t1 must be positive");
  double best = -std::numeric_limits<double>::infinity();
  for (double t : condition_t_samples(t1, samples)) {
    if (t == 0) continue;
    best = std::max(best, nl.F(t) / (t * t));
  }
  return best;
}

}  // namespace logsp
