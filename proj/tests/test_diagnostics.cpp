#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dcsim/diagnostics.hpp"
#include "dcsim/solver.hpp"

using namespace dcsim;

TEST_CASE("support radius examples") {
  const Grid g(1, 10, 1.0);  // h = 0.1
  Field u(g);
  CHECK(support_radius(u, {0.5, 0, 0}) == 0.0);
  u[5] = 1.0;  // centre 0.55
  CHECK(support_radius(u, {0.55, 0, 0}) == doctest::Approx(0.05));
  u[9] = 1e-13;  // below the threshold
  CHECK(support_radius(u, {0.55, 0, 0}) == doctest::Approx(0.05));
  u[9] = 1e-6;
  CHECK(support_radius(u, {0.55, 0, 0}) == doctest::Approx(0.45));

  const Grid g2(2, 10, 1.0);
  Field v(g2);
  v[0] = 1.0;
  CHECK(support_radius(v, {0.55, 0.55, 0}) == doctest::Approx(std::sqrt(0.5) + 0.05));
}

TEST_CASE("exponential and power-law fits recover exact data") {
  std::vector<double> t, y, r;
  for (int k = 0; k <= 50; ++k) {
    t.push_back(0.2 * k);
    y.push_back(3.0 * std::exp(-0.7 * t.back()));
    r.push_back(1.5 * std::pow(1.0 + t.back(), 0.25));
  }
  const ExponentialFit e = fit_exponential(t, y, 0.0);
  CHECK(e.rate == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(e.prefactor == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(e.r_squared == doctest::Approx(1.0));
  CHECK(e.samples == 51);

  const PowerLawFit p = fit_power_law(t, r, 0.0);
  CHECK(p.exponent == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(p.prefactor == doctest::Approx(1.5).epsilon(1e-9));

  y[3] = 0.0;
  y[4] = -1.0;
  const ExponentialFit skip = fit_exponential(t, y, 0.0);
  CHECK(skip.excluded_nonpositive == 2);
  CHECK(skip.rate == doctest::Approx(0.7).epsilon(1e-9));

  CHECK(fit_exponential(t, y, 5.0).samples == 26);
  CHECK(leading_fraction_cutoff(t, 0.2) == doctest::Approx(t[10]));
}

TEST_CASE("noisy fits bracket the true rate within three standard errors") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> noise(0.0, 0.01);
  int inside = 0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> t, y;
    for (int k = 0; k < 200; ++k) {
      t.push_back(0.05 * k);
      y.push_back(2.0 * std::exp(-0.4 * t.back()) * (1.0 + noise(rng)));
    }
    const ExponentialFit e = fit_exponential(t, y, 0.0);
    if (std::abs(e.rate - 0.4) <= 3.0 * e.rate_stderr) ++inside;
    CHECK(e.rate_stderr > 0.0);
  }
  CHECK(inside >= trials - 2);
}

TEST_CASE("conservation audit") {
  FrontHistory h;
  h.rows.resize(2);
  h.rows[0].mass_vw = 10.0;
  h.rows[1].t = 1.0;
  h.rows[1].mass_vw = 10.0 + 1e-11;
  const ConservationAudit a = conservation_audit(h);
  CHECK(a.drift == doctest::Approx(1e-12).epsilon(1e-3));
  CHECK_FALSE(a.absolute);

  h.rows[0].mass_vw = 0.0;
  h.rows[1].mass_vw = 1e-15;
  const ConservationAudit z = conservation_audit(h);
  CHECK(z.absolute);
  CHECK(z.drift == doctest::Approx(1e-15));
}

TEST_CASE("steady targets") {
  const Grid g(1, 4, 1.0);
  StateQuad s(g);
  s.v.values = {1, 2, 3, 4};  // mean 2.5
  s.w.values = {2.5, 2.5, 2.5, 2.5};
  ModelParams p;
  p.r = 2.0;
  const SteadyTargets t = steady_state_targets(s, p);
  CHECK(t.v == doctest::Approx(5.0));
  CHECK(t.u == doctest::Approx(0.5));
  CHECK(t.z == doctest::Approx(0.5));
  CHECK(t.w == 0.0);
}

TEST_CASE("history columns") {
  CHECK(FrontHistory::column_names().size() == 10);
  for (const std::string& name : FrontHistory::column_names()) CHECK_NOTHROW(FrontHistory::member(name));
  CHECK_THROWS_AS(FrontHistory::member("nope"), std::invalid_argument);
  FrontHistory h;
  h.rows.resize(3);
  for (int k = 0; k < 3; ++k) h.rows[k].sup_u = k;
  CHECK(h.column(&HistoryRow::sup_u) == std::vector<double>{0, 1, 2});
}

TEST_CASE("sandwich check") {
  const Grid g(1, 64, 4.0, -2.0);
  const ProfileParams lower = select_lower_params(2.0, 1, 1.0, 1.0, 0.5, 0.5, 4.0, 0.0, 0.0, {0, 0, 0});
  const UpperProfile upper = select_upper_params(2.0, 1.0, 1.0, 0.5, 1.5, 1.0, 0.0, 0.0, {0, 0, 0});

  auto from_profile = [&](const ProfileParams& p, double t) {
    StateQuad s(g);
    s.t = t;
    for (std::size_t k = 0; k < g.size(); ++k) s.u[k] = profile_eval(p, g.cell_center(k), t);
    return s;
  };
  // A profile never violates itself.
  std::vector<StateQuad> self{from_profile(lower, 0.0), from_profile(lower, 0.3)};
  const SandwichReport a = sandwich_check(self, lower, upper, 1e-14);
  CHECK(a.max_lower_violation <= 1e-14);

  // A state between the two profiles is clean.
  std::vector<StateQuad> mid;
  for (double t : {0.0, 0.5 * upper.t0, upper.t0}) {
    StateQuad s(g);
    s.t = t;
    for (std::size_t k = 0; k < g.size(); ++k)
      s.u[k] = std::max(profile_eval(lower, g.cell_center(k), t), 0.5 * profile_eval(upper.params, g.cell_center(k), t));
    mid.push_back(s);
  }
  const SandwichReport m = sandwich_check(mid, lower, upper, 1e-12);
  CHECK(m.snapshots_checked_upper == 3);
  CHECK(m.snapshots_checked_lower == 3);
  CHECK(m.violation_count == 0);

  // Halving u below the lower profile is reported with its location.
  std::vector<StateQuad> low{from_profile(lower, 0.2)};
  for (double& x : low[0].u.values) x *= 0.5;
  const SandwichReport l = sandwich_check(low, lower, upper, 1e-12);
  CHECK(l.violation_count > 0);
  CHECK(l.max_lower_violation > 0.0);
  REQUIRE_FALSE(l.violation_locations.empty());
  CHECK(l.violation_locations.front().lower);
  CHECK(std::abs(l.violation_locations.front().x[0]) < std::sqrt(lower.eta * std::pow(1.2, lower.beta)));
}

TEST_CASE("measured support is nondecreasing along a spreading run") {
  const Grid g(1, 128, 8.0);
  StateQuad s(g);
  for (std::size_t k = 60; k < 68; ++k) s.u[k] = 0.8;
  std::fill(s.z.values.begin(), s.z.values.end(), 1.0);
  ModelParams p;
  p.phi = Sensitivity::linear_switch(1.0);
  SolverConfig c;
  c.end_time = 1.0;
  c.output_stride = 20;
  const RunResult r = run(s, p, c);
  REQUIRE(r.history.rows.size() > 5);
  for (std::size_t k = 1; k < r.history.rows.size(); ++k)
    CHECK(r.history.rows[k].support_radius >= r.history.rows[k - 1].support_radius);
  CHECK(r.front_center[0] == doctest::Approx(4.0));
  CHECK(centroid(s.u)[0] == doctest::Approx(4.0));
}
