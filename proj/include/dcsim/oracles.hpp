#pragma once

#include <optional>
#include <vector>

#include "dcsim/grid.hpp"

namespace dcsim {

/// Barenblatt source solution of u_t = lap(u^m) in n dimensions, shifted so
/// that t = 0 corresponds to time 1:
///   B = (1+t)^-k [(1 - k(m-1)/(2mn) |x|^2 / (1+t)^(2k/n))_+]^(1/(m-1)),
///   k = 1/(m-1+2/n).
double barenblatt(const Coord& x, double t, double m, int n);

/// Squared support radius of the Barenblatt profile at time t.
double barenblatt_support_sq(double t, double m, int n);

enum class ProfileKind { lower, upper };

/// Self-similar comparison profile
///   g = eps (tau+t)^s [(eta - |x-x0|^2 / (tau+t)^beta)_+]^d
/// with s = -kappa (lower, tau = 1) or s = +sigma (upper, tau in (0,1)).
struct ProfileParams {
  double eps = 0.0;
  double eta = 0.0;
  double beta = 0.0;
  double rate_exp = 0.0;  ///< kappa for lower profiles, sigma for upper ones
  double tau = 1.0;
  double d = 1.0;         ///< 1/(m-1)
  Coord x0{0.0, 0.0, 0.0};
  ProfileKind kind = ProfileKind::lower;

  /// Throws std::invalid_argument when the kind-specific invariants fail.
  void validate(double m) const;
  /// Radius of the support at time t.
  double support_radius(double t) const;
};

/// Lower profile from the seed ball B_r(x0) on which u0 >= eps1.
///
/// eta = r^2; eps is the minimum of (1/(8nm))^(1/(m-1)),
/// (1/(8m(m-1) C1 diam))^(1/(m-1)), eps1 / r^(2d) and (mu/(2 C2))^(1/(m-delta)).
/// A zero C1 or C2 drops the corresponding branch. beta = 4 eps^(m-1) m/(m-1),
/// capped at 0.499 so that it stays inside (0, 1/2).
ProfileParams select_lower_params(double m, int n, double mu, double delta, double r, double eps1,
                                  double diam, double C1, double C2, const Coord& x0);

struct UpperProfile {
  ProfileParams params;
  double t0 = 0.0;        ///< validity horizon
  int halvings = 0;       ///< how often tau was halved from the starting value
};

/// The three sufficient inequalities for the upper profile, evaluated at
/// time t with the bracket at its maximum eta. Each entry is lhs - rhs.
struct UpperConditionSlack {
  double spreading = 0.0;
  double signal = 0.0;
  double growth = 0.0;
  bool all_hold() const { return spreading >= 0.0 && signal >= 0.0 && growth >= 0.0; }
};

UpperConditionSlack upper_condition_slack(const ProfileParams& p, double m, double mu, double delta,
                                          double C1, double C2, double t);

/// Upper profile for u0 supported in B_r0(x0) with sup u0 <= eps1 and
/// B_r1(x0) inside the domain. beta = sigma = 1; tau starts at `tau_start`
/// and is halved until the sufficient inequalities hold on [0, t0].
/// Throws NumericalError if tau would drop below 1e-8.
UpperProfile select_upper_params(double m, double mu, double delta, double r0, double r1, double eps1,
                                 double C1, double C2, const Coord& x0, double tau_start = 0.5);

/// Pointwise value of a lower or upper profile.
double profile_eval(const ProfileParams& p, const Coord& x, double t);

// ----------------------------------------------------------- ODE results

enum class BlowupClass { blows_up, bounded, marginal };

struct BlowupResult {
  BlowupClass kind = BlowupClass::bounded;
  std::optional<double> blowup_time;
};

/// Classifies g' = C e^(-ct) g^m, g(0) = g0 by comparing c/C with
/// (m-1) g0^(m-1). Ties within relative 1e-12 are `marginal`.
BlowupResult ode_blowup_classify(double C, double c, double m, double g0);

struct OdeEnvelopeParams {
  double C2 = 0.0;
  double c2 = 1.0;
  double t1 = 0.0;
  double u1_init = 2.0;
  double u2_init = 0.5;
  double mu = 1.0;
  double delta = 1.0;
  double m = 2.0;
};

struct OdeEnvelopes {
  bool marginal = false;         ///< u1 may blow up: no trajectories computed
  std::vector<double> t;
  std::vector<double> u1;        ///< upper envelope
  std::vector<double> u2;        ///< lower envelope
  std::vector<double> u1_bar;    ///< closed-form linear bound on u1
  double step_used = 0.0;
  bool u1_above_one = true;      ///< u1(t) > 1 on the whole interval
  bool u2_in_band = true;        ///< u2_init <= u2(t) < 1 on the whole interval
};

/// Integrates the upper/lower ODE envelopes
///   u1' =  C2 e^(-c2 t) u1^m + mu u1^delta (1 - u1)
///   u2' = -C2 e^(-c2 t) u2^m + mu u2^delta (1 - u2)
/// from t1 to t_end with classical RK4, halving `dt` until a step-doubling
/// estimate is below 1e-10. Also evaluates the closed-form bound
///   ub' = C^m C2 e^(-c2 t) + mu u2_init^delta (1 - ub),  C = max u1.
OdeEnvelopes ode_envelopes(const OdeEnvelopeParams& p, double t_end, double dt);

/// w = w0 exp(-int_0^t z ds), cellwise.
Field w_exact(const Field& w0, const Field& z_integral);

}  // namespace dcsim
