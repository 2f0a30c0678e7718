#pragma once

#include <span>
#include <string>
#include <vector>

#include "dcsim/kernels.hpp"
#include "dcsim/model.hpp"
#include "dcsim/oracles.hpp"

namespace dcsim {

struct HistoryRow {
  double t = 0.0;
  double support_radius = 0.0;
  double sup_u = 0.0;
  double inf_u_on_support = 0.0;
  double norm_u_minus_1 = 0.0;
  double norm_w = 0.0;
  double norm_v_minus_target = 0.0;
  double norm_z_minus_1 = 0.0;
  double mass_u = 0.0;
  double mass_vw = 0.0;
};

/// Time series of front and norm measurements; t strictly increasing.
struct FrontHistory {
  std::vector<HistoryRow> rows;

  std::vector<double> column(double HistoryRow::*member) const;
  static const std::vector<std::string>& column_names();
  /// Member pointer for a column name; throws std::invalid_argument otherwise.
  static double HistoryRow::*member(const std::string& name);
};

struct SteadyTargets {
  double u = 1.0;
  double v = 0.0;
  double w = 0.0;
  double z = 1.0;
};

/// (1/r, mean v0 + mean w0, 0, 1/r).
SteadyTargets steady_state_targets(const StateQuad& initial, const ModelParams& params);

/// Largest |x_cell - x0| over cells with u > threshold, plus h/2; 0 if none.
double support_radius(const Field& u, const Coord& x0, double threshold = 1e-12);

/// Everything needed to turn a state into a history row.
struct RowContext {
  Coord x0{0.0, 0.0, 0.0};
  double support_threshold = 1e-12;
  SteadyTargets targets;
  Backend backend = Backend::openmp;
};

HistoryRow measure(const StateQuad& s, const RowContext& ctx);

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  double exponent_stderr = 0.0;
  std::size_t samples = 0;
};

/// Least squares of log r against log(1+t) over samples with t >= t_min, r > 0.
PowerLawFit fit_power_law(std::span<const double> t, std::span<const double> r, double t_min);

struct ExponentialFit {
  double rate = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  double rate_stderr = 0.0;
  std::size_t samples = 0;
  std::size_t excluded_nonpositive = 0;
};

/// Least squares of log y against t over samples with t >= t_min; returns
/// minus the slope as the rate. Samples with y <= 0 are skipped and counted.
ExponentialFit fit_exponential(std::span<const double> t, std::span<const double> y, double t_min);

/// t_min that discards the first `fraction` of a series (by sample count).
double leading_fraction_cutoff(std::span<const double> t, double fraction);

struct ViolationSite {
  Coord x{0.0, 0.0, 0.0};
  double t = 0.0;
  double amount = 0.0;
  bool lower = true;
};

struct SandwichReport {
  double max_lower_violation = 0.0;
  double max_upper_violation = 0.0;
  std::vector<ViolationSite> violation_locations;  ///< capped at 1000 entries
  std::size_t violation_count = 0;
  std::size_t snapshots_checked_upper = 0;
  std::size_t snapshots_checked_lower = 0;
};

/// Compares every cell of every snapshot against the lower profile (all t)
/// and the upper profile (t <= t0). Violations larger than `tol` are listed.
SandwichReport sandwich_check(std::span<const StateQuad> snapshots, const ProfileParams& lower,
                              const UpperProfile& upper, double tol);

struct ConservationAudit {
  double drift = 0.0;
  bool absolute = false;  ///< initial mass was zero: drift is absolute
};

/// max |mass_vw(t) - mass_vw(0)| / mass_vw(0).
ConservationAudit conservation_audit(const FrontHistory& history);

/// Observed C1 = max |grad v| and C2 = max |lap v| over a set of states.
struct SignalBounds {
  double C1 = 0.0;
  double C2 = 0.0;
};

SignalBounds observed_signal_bounds(std::span<const StateQuad> snapshots, Backend b = Backend::openmp);

/// Seed ball for the lower profile: scans radii around x0 and keeps the one
/// whose profile has the largest centre value. eps1 is the minimum of u0
/// over cell centres inside the ball, capped at 1/2.
struct SeedBall {
  double r = 0.0;
  double eps1 = 0.0;
};

SeedBall choose_seed_ball(const Field& u0, const Coord& x0, const ModelParams& params, double C1, double C2);

/// Both comparison profiles built from an initial state and observed bounds.
struct SandwichProfiles {
  ProfileParams lower;
  UpperProfile upper;
  SeedBall seed;
  double r0 = 0.0;
  double r1 = 0.0;
  SignalBounds bounds;
};

/// Builds the lower and upper profiles for the run that started at
/// `initial`. `bounds` are the observed maxima; `margin` (0.1 = 10%) is added.
SandwichProfiles build_sandwich_profiles(const StateQuad& initial, const ModelParams& params, const Coord& x0,
                                         SignalBounds bounds, double margin = 0.1);

/// u-weighted centroid of a field.
Coord centroid(const Field& u);

}  // namespace dcsim
