#include "dcsim/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dcsim/errors.hpp"

namespace dcsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// --------------------------------------------------------------- Barenblatt

double barenblatt(const Coord& x, double t, double m, int n) {
  if (!(m > 1.0)) throw std::invalid_argument("barenblatt: m must exceed 1");
  if (n < 1 || n > 3) throw std::invalid_argument("barenblatt: n must be 1, 2 or 3");
  const double k = 1.0 / (m - 1.0 + 2.0 / n);
  double r2 = 0.0;
  for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
  const double bracket = 1.0 - k * (m - 1.0) / (2.0 * m * n) * r2 / std::pow(1.0 + t, 2.0 * k / n);
  if (bracket <= 0.0) return 0.0;
  return std::pow(1.0 + t, -k) * std::pow(bracket, 1.0 / (m - 1.0));
}

double barenblatt_support_sq(double t, double m, int n) {
  const double k = 1.0 / (m - 1.0 + 2.0 / n);
  return 2.0 * m * n / (k * (m - 1.0)) * std::pow(1.0 + t, 2.0 * k / n);
}

// ------------------------------------------------------------ profiles

void ProfileParams::validate(double m) const {
  if (!(eps > 0.0)) throw std::invalid_argument("profile: eps must be positive");
  if (!(eta > 0.0)) throw std::invalid_argument("profile: eta must be positive");
  if (std::abs(d - 1.0 / (m - 1.0)) > 1e-15 * d) throw std::invalid_argument("profile: d must equal 1/(m-1)");
  if (kind == ProfileKind::lower) {
    if (!(beta > 0.0 && beta < 0.5)) throw std::invalid_argument("lower profile: beta must lie in (0, 1/2)");
    if (std::abs(rate_exp - (1.0 - beta) / (m - 1.0)) > 1e-14)
      throw std::invalid_argument("lower profile: kappa must equal (1-beta)/(m-1)");
  } else {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("upper profile: tau must lie in (0, 1)");
    if (!(beta > 0.0)) throw std::invalid_argument("upper profile: beta must be positive");
  }
}

double ProfileParams::support_radius(double t) const {
  return std::sqrt(eta * std::pow(tau + t, beta));
}

double profile_eval(const ProfileParams& p, const Coord& x, double t) {
  const double s = p.tau + t;
  const double bracket = p.eta - squared_distance(x, p.x0) / std::pow(s, p.beta);
  if (bracket <= 0.0) return 0.0;
  const double amplitude = p.kind == ProfileKind::lower ? std::pow(s, -p.rate_exp) : std::pow(s, p.rate_exp);
  return p.eps * amplitude * std::pow(bracket, p.d);
}

ProfileParams select_lower_params(double m, int n, double mu, double delta, double r, double eps1,
                                  double diam, double C1, double C2, const Coord& x0) {
  if (!(m > 1.0)) throw std::invalid_argument("select_lower_params: m must exceed 1");
  if (!(delta >= 1.0 && delta < m)) throw HypothesisError("lower profile requires 1 <= delta < m");
  if (n < 1 || n > 3) throw std::invalid_argument("select_lower_params: n must be 1, 2 or 3");
  if (!(mu > 0.0)) throw std::invalid_argument("select_lower_params: mu must be positive");
  if (!(r > 0.0)) throw std::invalid_argument("select_lower_params: seed radius must be positive");
  if (!(eps1 > 0.0 && eps1 <= 0.5)) throw std::invalid_argument("select_lower_params: eps1 must lie in (0, 1/2]");
  if (!(diam > 0.0)) throw std::invalid_argument("select_lower_params: diam must be positive");
  if (!(C1 >= 0.0 && C2 >= 0.0)) throw std::invalid_argument("select_lower_params: C1, C2 must be nonnegative");

  const double inv = 1.0 / (m - 1.0);
  const double d = inv;
  const double b_diffusion = std::pow(1.0 / (8.0 * n * m), inv);
  const double b_gradient = C1 > 0.0 ? std::pow(1.0 / (8.0 * m * (m - 1.0) * C1 * diam), inv) : kInf;
  const double b_seed = eps1 / std::pow(r, 2.0 * d);
  const double b_growth = C2 > 0.0 ? std::pow(mu / (2.0 * C2), 1.0 / (m - delta)) : kInf;

  ProfileParams p;
  p.kind = ProfileKind::lower;
  p.eps = std::min({b_diffusion, b_gradient, b_seed, b_growth});
  p.eta = r * r;
  p.beta = std::min(4.0 * std::pow(p.eps, m - 1.0) * m / (m - 1.0), 0.499);
  p.rate_exp = (1.0 - p.beta) / (m - 1.0);
  p.tau = 1.0;
  p.d = d;
  p.x0 = x0;
  return p;
}

UpperConditionSlack upper_condition_slack(const ProfileParams& p, double m, double mu, double delta,
                                          double C1, double C2, double t) {
  const double s = p.tau + t;
  const double sigma = p.rate_exp;
  const double em1 = std::pow(p.eps, m - 1.0);
  UpperConditionSlack out;
  out.spreading = (m - 1.0) * p.beta - 8.0 * m * em1 * std::pow(s, (m - 1.0) * sigma - p.beta + 1.0);
  const double height = m + p.eps * std::pow(p.tau, sigma) * std::pow(p.eta, p.d);
  out.signal = 2.0 * sigma / 3.0 -
               (C2 + height * height * C1 * C1 * m) * em1 * std::pow(s, (m - 1.0) * sigma + 1.0) * p.eta;
  out.growth = sigma / 3.0 - mu * std::pow(p.eps, delta - 1.0) * std::pow(s, (delta - 1.0) * sigma + 1.0) *
                                 std::pow(p.eta, p.d * (delta - 1.0));
  return out;
}

UpperProfile select_upper_params(double m, double mu, double delta, double r0, double r1, double eps1,
                                 double C1, double C2, const Coord& x0, double tau_start) {
  if (!(m > 1.0)) throw std::invalid_argument("select_upper_params: m must exceed 1");
  if (!(r0 > 0.0 && r1 > r0)) throw std::invalid_argument("select_upper_params: need 0 < r0 < r1");
  if (!(eps1 > 0.0)) throw std::invalid_argument("select_upper_params: eps1 must be positive");
  if (!(C1 >= 0.0 && C2 >= 0.0)) throw std::invalid_argument("select_upper_params: C1, C2 must be nonnegative");
  if (!(tau_start > 0.0 && tau_start < 1.0)) throw std::invalid_argument("select_upper_params: tau_start in (0,1)");

  constexpr double beta = 1.0, sigma = 1.0;
  const double d = 1.0 / (m - 1.0);
  const double r2 = 0.5 * (r0 + r1);

  UpperProfile out;
  for (double tau = tau_start; tau >= 1e-8; tau *= 0.5, ++out.halvings) {
    ProfileParams& p = out.params;
    p.kind = ProfileKind::upper;
    p.beta = beta;
    p.rate_exp = sigma;
    p.tau = tau;
    p.d = d;
    p.x0 = x0;
    p.eta = r2 * r2 / std::pow(tau, beta);
    p.eps = eps1 / (std::pow(tau, sigma - d * beta) * std::pow(r2 * r2 - r0 * r0, d));
    out.t0 = std::min(tau, tau * (std::pow(r1 / r2, 2.0 / beta) - 1.0));
    if (upper_condition_slack(p, m, mu, delta, C1, C2, 0.0).all_hold() &&
        upper_condition_slack(p, m, mu, delta, C1, C2, out.t0).all_hold())
      return out;
  }
  std::ostringstream os;
  os << "select_upper_params: no tau >= 1e-8 satisfies the upper-profile inequalities (m=" << m << ", mu=" << mu
     << ", delta=" << delta << ", eps1=" << eps1 << ", C1=" << C1 << ", C2=" << C2 << ", r0=" << r0
     << ", r1=" << r1 << ")";
  throw NumericalError(os.str());
}

// ----------------------------------------------------------------- ODEs

BlowupResult ode_blowup_classify(double C, double c, double m, double g0) {
  if (!(C > 0.0 && c > 0.0 && g0 > 0.0)) throw std::invalid_argument("ode_blowup_classify: inputs must be positive");
  if (!(m > 1.0)) throw std::invalid_argument("ode_blowup_classify: m must exceed 1");
  const double threshold = (m - 1.0) * std::pow(g0, m - 1.0);
  const double ratio = c / C;
  BlowupResult out;
  if (std::abs(ratio - threshold) <= 1e-12 * threshold) {
    out.kind = BlowupClass::marginal;
  } else if (ratio < threshold) {
    // 1/(m-1) (g0^(1-m) - g^(1-m)) = (C/c)(1 - e^(-ct)), with g^(1-m) -> 0.
    out.kind = BlowupClass::blows_up;
    out.blowup_time = -std::log1p(-ratio / threshold) / c;
  } else {
    out.kind = BlowupClass::bounded;
  }
  return out;
}

namespace {

struct Pair {
  double a, b;
};

Pair envelope_rhs(const OdeEnvelopeParams& p, double t, Pair y) {
  const double signal = p.C2 * std::exp(-p.c2 * t);
  auto logistic = [&](double u) { return p.mu * std::pow(u, p.delta) * (1.0 - u); };
  return {signal * std::pow(y.a, p.m) + logistic(y.a), -signal * std::pow(y.b, p.m) + logistic(y.b)};
}

Pair rk4_step(const OdeEnvelopeParams& p, double t, Pair y, double h) {
  const Pair k1 = envelope_rhs(p, t, y);
  const Pair k2 = envelope_rhs(p, t + 0.5 * h, {y.a + 0.5 * h * k1.a, y.b + 0.5 * h * k1.b});
  const Pair k3 = envelope_rhs(p, t + 0.5 * h, {y.a + 0.5 * h * k2.a, y.b + 0.5 * h * k2.b});
  const Pair k4 = envelope_rhs(p, t + h, {y.a + h * k3.a, y.b + h * k3.b});
  return {y.a + h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
          y.b + h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b)};
}

// Samples every `stride` steps of size h, starting at t1.
std::vector<Pair> integrate(const OdeEnvelopeParams& p, double h, std::size_t steps, std::size_t stride) {
  std::vector<Pair> out;
  out.reserve(steps / stride + 1);
  Pair y{p.u1_init, p.u2_init};
  out.push_back(y);
  for (std::size_t s = 1; s <= steps; ++s) {
    y = rk4_step(p, p.t1 + static_cast<double>(s - 1) * h, y, h);
    if (!std::isfinite(y.a) || !std::isfinite(y.b)) throw NumericalError("ode_envelopes: trajectory diverged");
    if (s % stride == 0) out.push_back(y);
  }
  return out;
}

}  // namespace

OdeEnvelopes ode_envelopes(const OdeEnvelopeParams& p, double t_end, double dt) {
  if (!(p.u1_init > 1.0 && p.u2_init > 0.0 && p.u2_init < 1.0))
    throw std::invalid_argument("ode_envelopes: need u1_init > 1 > u2_init > 0");
  if (!(p.C2 >= 0.0 && p.c2 > 0.0 && p.mu > 0.0 && p.m > 1.0 && p.delta >= 1.0))
    throw std::invalid_argument("ode_envelopes: invalid coefficients");
  if (!(t_end > p.t1 && dt > 0.0)) throw std::invalid_argument("ode_envelopes: need t_end > t1 and dt > 0");

  OdeEnvelopes out;
  if (p.C2 > 0.0) {
    const auto cls = ode_blowup_classify(p.C2 * std::exp(-p.c2 * p.t1), p.c2, p.m, p.u1_init);
    if (cls.kind != BlowupClass::bounded) {
      out.marginal = true;
      return out;
    }
  }

  const double span = t_end - p.t1;
  auto steps = static_cast<std::size_t>(std::ceil(span / dt));
  std::vector<Pair> coarse, fine;
  for (int halving = 0;; ++halving) {
    if (halving > 24) throw NumericalError("ode_envelopes: step halving did not converge");
    const double h = span / static_cast<double>(steps);
    coarse = integrate(p, h, steps, 1);
    fine = integrate(p, 0.5 * h, 2 * steps, 2);
    double err = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k)
      err = std::max({err, std::abs(coarse[k].a - fine[k].a), std::abs(coarse[k].b - fine[k].b)});
    if (err <= 1e-10) {
      out.step_used = 0.5 * h;
      break;
    }
    steps *= 2;
  }

  const double h = span / static_cast<double>(steps);
  double u1_max = 0.0;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    out.t.push_back(p.t1 + static_cast<double>(k) * h);
    out.u1.push_back(fine[k].a);
    out.u2.push_back(fine[k].b);
    u1_max = std::max(u1_max, fine[k].a);
    if (!(fine[k].a >= 1.0)) out.u1_above_one = false;
    if (!(fine[k].b >= p.u2_init * (1.0 - 1e-12) && fine[k].b <= 1.0)) out.u2_in_band = false;
  }

  const double a = p.mu * std::pow(p.u2_init, p.delta);
  const double forcing = std::pow(u1_max, p.m) * p.C2;
  for (double t : out.t) {
    double integral;
    if (std::abs(a - p.c2) > 1e-12 * std::max(a, p.c2))
      integral = (std::exp(-p.c2 * t) - std::exp(-a * (t - p.t1) - p.c2 * p.t1)) / (a - p.c2);
    else
      integral = std::exp(-a * t) * (t - p.t1);
    out.u1_bar.push_back(1.0 + (p.u1_init - 1.0) * std::exp(-a * (t - p.t1)) + forcing * integral);
  }
  return out;
}

Field w_exact(const Field& w0, const Field& z_integral) {
  if (w0.size() != z_integral.size()) throw std::invalid_argument("w_exact: size mismatch");
  Field out(w0.grid);
  for (std::size_t k = 0; k < w0.size(); ++k) {
    if (z_integral[k] < 0.0) throw std::domain_error("w_exact: time integral of z must be nonnegative");
    out[k] = w0[k] * std::exp(-z_integral[k]);
  }
  return out;
}

}  // namespace dcsim
