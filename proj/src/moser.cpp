#include "logsp/moser.hpp"

#include "logsp/parallel.hpp"
#include "logsp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace logsp {

namespace {

constexpr double kPi = std::numbers::pi;

const GaussRule& rule16() {
  static const GaussRule r = gauss_legendre(16);
  return r;
}

// Panel nodes and weights for int_a^b g(s) ds.
void composite_nodes(double a, double b, int panels, std::vector<double>& x, std::vector<double>& w) {
  const auto& r = rule16();
  const double len = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * len;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      x.push_back(lo + 0.5 * len * (r.nodes[i] + 1.0));
      w.push_back(0.5 * len * r.weights[i]);
    }
  }
}

// F(v) e^{lw}, via logs so the plateau at large t cannot overflow spuriously.
double weighted_F(const Nonlinearity& nl, double v, double lw) {
  if (v == 0) return 0.0;
  const double lf = nl.log_F(v);
  if (std::isnan(lf)) {
    const double f = nl.F(v);
    return f * std::exp(lw);
  }
  return std::exp(lf + lw);
}

double angular_average(const Potential& V, double r) {
  const auto& rule = rule16();
  double acc = 0;
  for (int k = 0; k < 4; ++k) {
    const double lo = 0.5 * kPi * k;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double th = lo + 0.25 * kPi * (rule.nodes[i] + 1.0);
      acc += 0.25 * kPi * rule.weights[i] * V(r * std::cos(th), r * std::sin(th));
    }
  }
  return acc / (2.0 * kPi);
}

double max_potential_on_unit_ball(const Potential& V) {
  double vmax = -std::numeric_limits<double>::infinity();
  for (int a = 0; a <= 64; ++a) {
    const double r = a / 64.0;
    for (int b = 0; b < 128; ++b) {
      const double th = 2.0 * kPi * b / 128.0;
      vmax = std::max(vmax, V(r * std::cos(th), r * std::sin(th)));
    }
  }
  return vmax;
}

}  // namespace

double MoserProfile::operator()(double r) const {
  if (r < 0) throw std::domain_error("moser: negative radius");
  if (r <= r_in) return plateau;
  if (r >= 1) return 0.0;
  return slope * std::log(1.0 / r);
}

MoserProfile moser_profile(double n, double q) {
  if (!(n >= 3)) throw std::domain_error("moser: n must be >= 3");
  if (!(q >= 2)) throw std::domain_error("moser: q must be >= 2");
  MoserProfile w;
  w.n = n;
  w.q = q;
  w.ln_n = std::log(n);
  const double lln = std::log(w.ln_n);
  w.s_in = w.ln_n - 0.5 * q * lln;
  if (!(w.s_in > 0)) throw std::domain_error("moser: r_in >= 1 for this n");
  w.r_in = std::exp(-w.s_in);
  w.slope = 1.0 / std::sqrt(2.0 * kPi * w.ln_n);
  w.plateau = std::sqrt(w.ln_n) / std::sqrt(2.0 * kPi) - q * lln / (2.0 * std::sqrt(2.0 * kPi * w.ln_n));
  return w;
}

MoserFunction build_moser(double n, double q, const Grid& grid) {
  MoserFunction m{moser_profile(n, q), Field(grid), false, {}};
  const auto& w = m.profile;
  m.field = Field::from_function(grid, [&](double x, double y) { return w(std::hypot(x, y)); });
  m.resolved = grid.spacing() < 0.5 * w.r_in;
  if (!m.resolved) m.warning = "grid does not resolve r_in; radial overlay used for integrals";
  return m;
}

MoserGradNorm moser_grad_norm_sq(double n, double q, const Grid* grid) {
  const MoserProfile w = moser_profile(n, q);
  MoserGradNorm out;
  out.analytic = 1.0 - q * std::log(w.ln_n) / (2.0 * w.ln_n);

  // 2 pi int |omega'|^2 r dr on a geometric mesh from r_in to 1.
  const int m = 4096;
  double acc = 0;
  double r0 = w.r_in, v0 = w(r0);
  for (int k = 1; k <= m; ++k) {
    const double r1 = std::exp(-w.s_in * (1.0 - double(k) / m));
    const double v1 = k == m ? 0.0 : w(r1);
    const double d = (v1 - v0) / (r1 - r0);
    acc += d * d * 0.5 * (r0 + r1) * (r1 - r0);
    r0 = r1;
    v0 = v1;
  }
  out.radial = 2.0 * kPi * acc;

  if (grid) {
    const MoserFunction f = build_moser(n, q, *grid);
    out.grid_value = dirichlet_energy(f.field);
    out.grid_agrees = std::abs(*out.grid_value - out.radial) <= 1e-2 * std::abs(out.radial);
  }
  return out;
}

double moser_delta(const MoserProfile& w) {
  std::vector<double> s, ws;
  composite_nodes(0.0, w.s_in, 200, s, ws);
  double acc = kPi * w.r_in * w.r_in * w.plateau * w.plateau;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = w.slope * s[i];
    acc += ws[i] * 2.0 * kPi * std::exp(-2.0 * s[i]) * v * v;
  }
  return acc;
}

MoserRay::MoserRay(const MoserProfile& w, const Model& model) : w_(w), model_(&model) {
  if (!model.nonlinearity().autonomous()) {
    throw std::invalid_argument("moser: radial evaluation needs an autonomous nonlinearity");
  }
  const double p = model.p();
  composite_nodes(0.0, w.s_in, 400, s_nodes_, s_weights_);

  grad_ = w.s_in / w.ln_n;

  // int V omega^2 dA
  {
    std::vector<double> r, wr;
    composite_nodes(0.0, w.r_in, 4, r, wr);
    double acc = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      acc += wr[i] * 2.0 * kPi * r[i] * angular_average(model.potential(), r[i]) * w.plateau * w.plateau;
    }
    for (std::size_t i = 0; i < s_nodes_.size(); ++i) {
      const double s = s_nodes_[i];
      const double rr = std::exp(-s);
      const double v = w.slope * s;
      acc += s_weights_[i] * 2.0 * kPi * rr * rr * angular_average(model.potential(), rr) * v * v;
    }
    vmass_ = acc;
  }

  // I0 = -int_0^inf M(e^{-s})^2 ds with M the |omega|^p mass inside radius e^{-s}.
  {
    const double rho_plat = std::pow(w.plateau, p);
    const double m_plat = kPi * w.r_in * w.r_in * rho_plat;
    double acc = 0.25 * kPi * kPi * rho_plat * rho_plat * std::pow(w.r_in, 4);
    auto density = [&](double s) { return 2.0 * kPi * std::exp(-2.0 * s) * std::pow(w.slope * s, p); };
    const auto& rule = rule16();
    const int panels = 400;
    const double len = w.s_in / panels;
    double m_right = m_plat;  // mass inside radius e^{-b} at the panel's large-s end
    for (int k = panels - 1; k >= 0; --k) {
      const double a = k * len;
      const double b = a + len;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = a + 0.5 * len * (rule.nodes[i] + 1.0);
        double inner = 0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
          const double sigma = s + 0.5 * (b - s) * (rule.nodes[j] + 1.0);
          inner += 0.5 * (b - s) * rule.weights[j] * density(sigma);
        }
        const double M = m_right + inner;
        acc += 0.5 * len * rule.weights[i] * M * M;
      }
      double panel = 0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        panel += 0.5 * len * rule.weights[j] * density(a + 0.5 * len * (rule.nodes[j] + 1.0));
      }
      m_right += panel;
    }
    i0_ = -acc;
  }
}

double MoserRay::phi(double t) const {
  const double p = model_->p();
  const auto& nl = model_->nonlinearity();
  double pot = weighted_F(nl, t * w_.plateau, std::log(kPi * w_.r_in * w_.r_in));
  for (std::size_t i = 0; i < s_nodes_.size(); ++i) {
    const double s = s_nodes_[i];
    pot += s_weights_[i] * weighted_F(nl, t * w_.slope * s, std::log(2.0 * kPi) - 2.0 * s);
  }
  const double quad = 0.5 * t * t * (grad_ + vmass_);
  const double nonlocal = std::pow(t, 2.0 * p) * i0_ / (4.0 * p * kPi);
  if (std::isinf(pot)) return -std::numeric_limits<double>::infinity();
  return quad + nonlocal - pot;
}

double moser_T(double n, double q) {
  const double ln_n = std::log(n);
  const double lln = std::log(ln_n);
  return ln_n - q * lln + q * q * lln * lln / (4.0 * ln_n);
}

double case2_envelope(double n, double q, double t, const Model& model) {
  const auto a0 = model.nonlinearity().critical_exponent();
  if (!a0) throw std::invalid_argument("case2_envelope: needs a critical family");
  const double lo = std::sqrt(3.0 * kPi / *a0);
  const double hi = std::sqrt(8.0 * kPi / *a0);
  if (t < lo || t > hi) throw std::domain_error("case2_envelope: t outside the case (ii) window");
  const MoserProfile w = moser_profile(n, q);
  const double delta = moser_delta(w);
  const double v1 = max_potential_on_unit_ball(model.potential());
  const double tn = moser_T(n, q);
  const double lln = std::log(w.ln_n);
  const double log_coef = 0.5 * q * std::log(*a0) + std::log(kPi) + q * lln - q * std::log(2.0) -
                          2.0 * w.ln_n - 0.5 * q * std::log(tn);
  return 0.5 * (1.0 + v1 * delta) * t * t - q * lln / (4.0 * w.ln_n) * t * t -
         std::exp(log_coef + *a0 / (2.0 * kPi) * t * t * tn);
}

RayMaximum maximize_moser_ray(const MoserRay& ray) {
  const int m = 200;
  const double lo = std::log(1e-3), hi = std::log(1e2);
  std::vector<double> ts(m), vals(m);
  for (int i = 0; i < m; ++i) {
    ts[i] = std::exp(lo + (hi - lo) * i / (m - 1));
    vals[i] = ray.phi(ts[i]);
  }
  const int best = int(std::max_element(vals.begin(), vals.end()) - vals.begin());
  double a = ts[std::max(best - 1, 0)];
  double b = ts[std::min(best + 1, m - 1)];
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = ray.phi(c), fd = ray.phi(d);
  while (b - a > 1e-8) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = ray.phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = ray.phi(d);
    }
  }
  RayMaximum out{0.5 * (a + b), ray.phi(0.5 * (a + b))};
  if (vals[best] > out.phi) out = {ts[best], vals[best]};
  return out;
}

ThresholdCertificate threshold_certificate(const std::vector<double>& n_list, double q,
                                           const Model& model, double margin) {
  const auto a0 = model.nonlinearity().critical_exponent();
  if (!a0) throw std::invalid_argument("threshold_certificate: needs a critical family");
  ThresholdCertificate cert;
  cert.threshold = 2.0 * kPi / *a0;
  cert.margin = margin;
  cert.entries.resize(n_list.size());
  parallel_for(0, long(n_list.size()), [&](long i) {
    MoserEntry& e = cert.entries[std::size_t(i)];
    e.n = n_list[std::size_t(i)];
    try {
      const MoserProfile w = moser_profile(e.n, q);
      const MoserRay ray(w, model);
      e.grad_norm_sq = ray.grad_norm_sq();
      e.delta_n = moser_delta(w);
      const RayMaximum best = maximize_moser_ray(ray);
      e.max_t_phi = best.phi;
      e.t_max = best.t;
      e.pass = best.phi < cert.threshold - margin;
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
  });
  for (const auto& e : cert.entries) {
    if (e.pass) {
      cert.n0 = e.n;
      cert.certified_max = e.max_t_phi;
      break;
    }
  }
  return cert;
}

}  // namespace logsp
