#include "dcsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dcsim/errors.hpp"

namespace dcsim {

// ------------------------------------------------------------ FrontHistory

namespace {

struct ColumnDef {
  const char* name;
  double HistoryRow::*member;
};

const ColumnDef kColumns[] = {
    {"t", &HistoryRow::t},
    {"support_radius", &HistoryRow::support_radius},
    {"sup_u", &HistoryRow::sup_u},
    {"inf_u_on_support", &HistoryRow::inf_u_on_support},
    {"norm_u_minus_1", &HistoryRow::norm_u_minus_1},
    {"norm_w", &HistoryRow::norm_w},
    {"norm_v_minus_target", &HistoryRow::norm_v_minus_target},
    {"norm_z_minus_1", &HistoryRow::norm_z_minus_1},
    {"mass_u", &HistoryRow::mass_u},
    {"mass_vw", &HistoryRow::mass_vw},
};

}  // namespace

std::vector<double> FrontHistory::column(double HistoryRow::*m) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.*m);
  return out;
}

const std::vector<std::string>& FrontHistory::column_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : kColumns) n.emplace_back(c.name);
    return n;
  }();
  return names;
}

double HistoryRow::*FrontHistory::member(const std::string& name) {
  for (const auto& c : kColumns)
    if (name == c.name) return c.member;
  throw std::invalid_argument("unknown history column '" + name + "'");
}

// --------------------------------------------------------------- measures

SteadyTargets steady_state_targets(const StateQuad& initial, const ModelParams& params) {
  SteadyTargets t;
  t.u = 1.0 / params.r;
  t.z = 1.0 / params.r;
  t.w = 0.0;
  t.v = initial.v.mean() + initial.w.mean();
  return t;
}

double support_radius(const Field& u, const Coord& x0, double threshold) {
  double best = -1.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (u[k] > threshold) best = std::max(best, squared_distance(u.grid.cell_center(k), x0));
  if (best < 0.0) return 0.0;
  return std::sqrt(best) + 0.5 * u.grid.spacing();
}

HistoryRow measure(const StateQuad& s, const RowContext& ctx) {
  using namespace kernels;
  const Backend b = ctx.backend;
  HistoryRow row;
  row.t = s.t;
  row.support_radius = support_radius(s.u, ctx.x0, ctx.support_threshold);
  row.sup_u = max_value(b, s.u.span());
  double inf_support = 0.0;
  bool any = false;
  double dev_u = 0.0, dev_v = 0.0, dev_z = 0.0, sup_w = 0.0;
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    const double uk = s.u[k];
    if (uk > ctx.support_threshold) {
      inf_support = any ? std::min(inf_support, uk) : uk;
      any = true;
    }
    dev_u = std::max(dev_u, std::abs(uk - ctx.targets.u));
    dev_v = std::max(dev_v, std::abs(s.v[k] - ctx.targets.v));
    dev_z = std::max(dev_z, std::abs(s.z[k] - ctx.targets.z));
    sup_w = std::max(sup_w, std::abs(s.w[k]));
  }
  row.inf_u_on_support = inf_support;
  row.norm_u_minus_1 = dev_u;
  row.norm_w = sup_w;
  row.norm_v_minus_target = dev_v;
  row.norm_z_minus_1 = dev_z;
  const double vol = s.grid().cell_volume();
  row.mass_u = sum(b, s.u.span()) * vol;
  row.mass_vw = (sum(b, s.v.span()) + sum(b, s.w.span())) * vol;
  return row;
}

// ------------------------------------------------------------------ fits

namespace {

struct LineFit {
  double intercept, slope, r_squared, slope_stderr;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientData("fit: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - (f.intercept + f.slope * x[k]);
    sse += e * e;
  }
  f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  f.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
  return f;
}

}  // namespace

PowerLawFit fit_power_law(std::span<const double> t, std::span<const double> r, double t_min) {
  if (t.size() != r.size()) throw std::invalid_argument("fit_power_law: length mismatch");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_min || !(r[k] > 0.0)) continue;
    x.push_back(std::log1p(t[k]));
    y.push_back(std::log(r[k]));
  }
  if (x.size() < 8) throw InsufficientData("fit_power_law: fewer than 8 usable samples");
  const LineFit f = least_squares(x, y);
  return {f.slope, std::exp(f.intercept), f.r_squared, f.slope_stderr, x.size()};
}

ExponentialFit fit_exponential(std::span<const double> t, std::span<const double> y, double t_min) {
  if (t.size() != y.size()) throw std::invalid_argument("fit_exponential: length mismatch");
  std::vector<double> xs, ys;
  std::size_t excluded = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_min) continue;
    if (!(y[k] > 0.0)) {
      ++excluded;
      continue;
    }
    xs.push_back(t[k]);
    ys.push_back(std::log(y[k]));
  }
  if (xs.size() < 8) throw InsufficientData("fit_exponential: fewer than 8 positive samples");
  const LineFit f = least_squares(xs, ys);
  return {-f.slope, std::exp(f.intercept), f.r_squared, f.slope_stderr, xs.size(), excluded};
}

double leading_fraction_cutoff(std::span<const double> t, double fraction) {
  if (t.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(t.size())));
  return t[std::min(k, t.size() - 1)];
}

// -------------------------------------------------------------- sandwich

SandwichReport sandwich_check(std::span<const StateQuad> snapshots, const ProfileParams& lower,
                              const UpperProfile& upper, double tol) {
  constexpr std::size_t kMaxSites = 1000;
  SandwichReport rep;
  auto note = [&](const Coord& x, double t, double amount, bool is_lower) {
    ++rep.violation_count;
    if (rep.violation_locations.size() < kMaxSites) rep.violation_locations.push_back({x, t, amount, is_lower});
  };
  for (const StateQuad& s : snapshots) {
    const bool check_upper = s.t <= upper.t0 * (1.0 + 1e-12);
    ++rep.snapshots_checked_lower;
    if (check_upper) ++rep.snapshots_checked_upper;
    for (std::size_t k = 0; k < s.u.size(); ++k) {
      const Coord x = s.grid().cell_center(k);
      const double below = profile_eval(lower, x, s.t) - s.u[k];
      if (below > 0.0) {
        rep.max_lower_violation = std::max(rep.max_lower_violation, below);
        if (below > tol) note(x, s.t, below, true);
      }
      if (check_upper) {
        const double above = s.u[k] - profile_eval(upper.params, x, s.t);
        if (above > 0.0) {
          rep.max_upper_violation = std::max(rep.max_upper_violation, above);
          if (above > tol) note(x, s.t, above, false);
        }
      }
    }
  }
  return rep;
}

ConservationAudit conservation_audit(const FrontHistory& history) {
  if (history.rows.size() < 2) throw InsufficientData("conservation_audit: need at least 2 rows");
  const double m0 = history.rows.front().mass_vw;
  double drift = 0.0;
  for (const auto& r : history.rows) drift = std::max(drift, std::abs(r.mass_vw - m0));
  if (m0 == 0.0) return {drift, true};
  return {drift / std::abs(m0), false};
}

SignalBounds observed_signal_bounds(std::span<const StateQuad> snapshots, Backend b) {
  SignalBounds out;
  std::vector<double> lap;
  for (const StateQuad& s : snapshots) {
    lap.resize(s.v.size());
    kernels::laplacian(b, s.grid(), s.v.span(), lap);
    out.C1 = std::max(out.C1, kernels::max_face_gradient(b, s.grid(), s.v.span()));
    out.C2 = std::max(out.C2, kernels::max_abs(b, lap));
  }
  return out;
}

Coord centroid(const Field& u) {
  Coord c{0.0, 0.0, 0.0};
  double mass = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Coord x = u.grid.cell_center(k);
    for (int a = 0; a < 3; ++a) c[a] += x[a] * u[k];
    mass += u[k];
  }
  if (!(mass > 0.0)) throw std::invalid_argument("centroid: field has no positive mass");
  for (double& a : c) a /= mass;
  return c;
}

SeedBall choose_seed_ball(const Field& u0, const Coord& x0, const ModelParams& params, double C1, double C2) {
  const Grid& g = u0.grid;
  std::vector<std::pair<double, double>> by_distance;  // (|x - x0|, u0)
  by_distance.reserve(u0.size());
  for (std::size_t k = 0; k < u0.size(); ++k)
    by_distance.emplace_back(std::sqrt(squared_distance(g.cell_center(k), x0)), u0[k]);
  std::sort(by_distance.begin(), by_distance.end());

  SeedBall best;
  double best_centre = 0.0;
  double running_min = std::numeric_limits<double>::infinity();
  const double d = 1.0 / (params.m - 1.0);
  for (std::size_t j = 0; j + 1 < by_distance.size(); ++j) {
    running_min = std::min(running_min, by_distance[j].second);
    if (!(running_min > 0.0)) break;
    const double r = by_distance[j + 1].first;
    if (r <= by_distance[j].first) continue;  // ball would cut through tied cells
    const double eps1 = std::min(running_min, 0.5);
    const ProfileParams p = select_lower_params(params.m, g.dim(), params.mu, params.delta, r, eps1,
                                                g.diameter(), C1, C2, x0);
    const double centre = p.eps * std::pow(r, 2.0 * d);
    if (centre > best_centre) {
      best_centre = centre;
      best = {r, eps1};
    }
  }
  if (!(best.r > 0.0)) throw std::invalid_argument("choose_seed_ball: u0 vanishes at the centre");
  return best;
}

SandwichProfiles build_sandwich_profiles(const StateQuad& initial, const ModelParams& params, const Coord& x0,
                                         SignalBounds bounds, double margin) {
  params.validate_theorem_mode();
  const Grid& g = initial.grid();
  SandwichProfiles out;
  out.bounds = {bounds.C1 * (1.0 + margin), bounds.C2 * (1.0 + margin)};
  out.seed = choose_seed_ball(initial.u, x0, params, out.bounds.C1, out.bounds.C2);
  out.lower = select_lower_params(params.m, g.dim(), params.mu, params.delta, out.seed.r, out.seed.eps1,
                                  g.diameter(), out.bounds.C1, out.bounds.C2, x0);
  out.r0 = support_radius(initial.u, x0, 0.0);
  double clearance = std::numeric_limits<double>::infinity();
  for (int a = 0; a < g.dim(); ++a) {
    clearance = std::min(clearance, x0[a] - g.origin(a));
    clearance = std::min(clearance, g.origin(a) + g.extent(a) - x0[a]);
  }
  out.r1 = clearance * (1.0 - 1e-9);
  if (!(out.r0 < out.r1))
    throw std::invalid_argument("build_sandwich_profiles: support of u0 reaches the boundary");
  out.upper = select_upper_params(params.m, params.mu, params.delta, out.r0, out.r1, initial.u.max(),
                                  out.bounds.C1, out.bounds.C2, x0);
  return out;
}

}  // namespace dcsim
