#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dcsim/errors.hpp"
#include "dcsim/oracles.hpp"

using namespace dcsim;

TEST_CASE("Barenblatt examples") {
  CHECK(barenblatt({0, 0, 0}, 0.0, 2.0, 1) == doctest::Approx(1.0));
  CHECK(barenblatt({0, 0, 0}, 7.0, 2.0, 1) == doctest::Approx(0.5));  // 8^(-1/3)
  const double edge = std::sqrt(barenblatt_support_sq(0.0, 2.0, 1));
  CHECK(edge == doctest::Approx(std::sqrt(12.0)));
  CHECK(barenblatt({edge * 1.000001, 0, 0}, 0.0, 2.0, 1) == 0.0);
  CHECK(barenblatt({edge, 0, 0}, 0.0, 2.0, 1) < 1e-15);
  CHECK(barenblatt({edge * 0.999, 0, 0}, 0.0, 2.0, 1) > 0.0);
  CHECK(barenblatt({0, 0, 0}, 0.0, 3.0, 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(barenblatt({0, 0, 0}, 0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("Barenblatt satisfies the porous-medium equation inside its support") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> um(1.5, 3.0), ut(0.0, 3.0), uf(0.05, 0.8);
  for (int k = 0; k < 60; ++k) {
    const double m = um(rng), t = ut(rng);
    const int n = 1 + k % 2;
    const double R = std::sqrt(barenblatt_support_sq(t, m, n));
    const Coord x{uf(rng) * R / std::sqrt(2.0), n == 2 ? uf(rng) * R / std::sqrt(2.0) : 0.0, 0.0};
    const double e = 1e-4, et = 1e-5;
    const double ut_fd = (barenblatt(x, t + et, m, n) - barenblatt(x, t - et, m, n)) / (2 * et);
    auto P = [&](Coord y) { return std::pow(barenblatt(y, t, m, n), m); };
    double lap = 0.0;
    for (int a = 0; a < n; ++a) {
      Coord xp = x, xm = x;
      xp[a] += e;
      xm[a] -= e;
      lap += (P(xp) - 2 * P(x) + P(xm)) / (e * e);
    }
    CHECK(ut_fd == doctest::Approx(lap).epsilon(1e-4));
  }
}

TEST_CASE("lower profile parameter selection") {
  const ProfileParams p = select_lower_params(2.0, 1, 1.0, 1.0, 1.0, 0.5, 10.0, 0.0, 0.0, {0, 0, 0});
  CHECK(p.eps == doctest::Approx(0.0625));  // 1/(8 n m)
  CHECK(p.beta == 0.499);                   // 4 eps m/(m-1) = 0.5 gets capped
  CHECK(p.rate_exp == doctest::Approx(0.501));
  CHECK(p.eta == 1.0);
  CHECK_NOTHROW(p.validate(2.0));
  CHECK(profile_eval(p, {0, 0, 0}, 3.0) == doctest::Approx(0.0625 * std::pow(4.0, -0.501)));
  CHECK(profile_eval(p, {1.0, 0, 0}, 0.0) == 0.0);
  CHECK(p.support_radius(3.0) == doctest::Approx(std::pow(4.0, 0.2495)));

  CHECK_THROWS_AS(select_lower_params(2.0, 1, 1.0, 2.0, 1.0, 0.5, 10.0, 0.0, 0.0, {0, 0, 0}), HypothesisError);
  CHECK_THROWS_AS(select_lower_params(2.0, 1, 1.0, 1.0, 1.0, 0.7, 10.0, 0.0, 0.0, {0, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("lower profile eps respects every branch and falls with C2") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> um(1.2, 4.0), uu(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const double m = um(rng);
    const double delta = 1.0 + uu(rng) * (m - 1.0) * 0.99;
    const int n = 1 + k % 3;
    const double mu = 0.1 + 2 * uu(rng), r = 0.1 + 2 * uu(rng), eps1 = 0.01 + 0.49 * uu(rng);
    const double diam = 1 + 20 * uu(rng), C1 = 3 * uu(rng), C2 = 3 * uu(rng);
    const ProfileParams p = select_lower_params(m, n, mu, delta, r, eps1, diam, C1, C2, {0, 0, 0});
    const double d = 1.0 / (m - 1.0);
    CHECK(p.eps <= std::pow(1.0 / (8 * n * m), d) * (1 + 1e-14));
    CHECK(p.eps <= std::pow(1.0 / (8 * m * (m - 1) * C1 * diam), d) * (1 + 1e-14));
    CHECK(p.eps <= eps1 / std::pow(r, 2 * d) * (1 + 1e-14));
    CHECK(p.eps <= std::pow(mu / (2 * C2), 1.0 / (m - delta)) * (1 + 1e-14));
    CHECK(p.beta > 0.0);
    CHECK(p.beta < 0.5);
    CHECK_NOTHROW(p.validate(m));
    const ProfileParams q = select_lower_params(m, n, mu, delta, r, eps1, diam, C1, 2 * C2 + 0.1, {0, 0, 0});
    CHECK(q.eps <= p.eps);
    // the seed ball bounds the initial profile by eps1
    CHECK(profile_eval(p, {0, 0, 0}, 0.0) <= eps1 * (1 + 1e-12));
  }
}

TEST_CASE("upper profile selection") {
  const double m = 2.0, mu = 1.0, delta = 1.5, r0 = 0.25, r1 = 0.75, eps1 = 0.1;
  const UpperProfile up = select_upper_params(m, mu, delta, r0, r1, eps1, 0.2, 0.2, {0, 0, 0});
  CHECK(up.t0 == doctest::Approx(up.params.tau));  // (r1/r2)^2 - 1 = 1.25 exceeds 1
  CHECK_NOTHROW(up.params.validate(m));
  CHECK(upper_condition_slack(up.params, m, mu, delta, 0.2, 0.2, 0.0).all_hold());
  CHECK(upper_condition_slack(up.params, m, mu, delta, 0.2, 0.2, up.t0).all_hold());
  for (int k = 0; k <= 100; ++k) {
    const double x = r0 * k / 100.0;
    CHECK(profile_eval(up.params, {x, 0, 0}, 0.0) >= eps1 * (1 - 1e-12));
  }
  // the support at t0 stays inside B_r1
  CHECK(up.params.support_radius(up.t0) <= r1 * (1 + 1e-12));

  const UpperProfile harder = select_upper_params(m, mu, delta, r0, r1, eps1, 5.0, 5.0, {0, 0, 0});
  CHECK(harder.halvings >= up.halvings);
  CHECK_THROWS_AS(select_upper_params(m, mu, delta, 0.5, 0.25, eps1, 0.0, 0.0, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("blow-up classification") {
  // g' = 2 e^(-t) g^2, g(0) = 1: 1/g = 1 - 2(1 - e^(-t)) vanishes at t = ln 2.
  const BlowupResult a = ode_blowup_classify(2.0, 1.0, 2.0, 1.0);
  CHECK(a.kind == BlowupClass::blows_up);
  REQUIRE(a.blowup_time);
  CHECK(*a.blowup_time == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(ode_blowup_classify(1.0, 2.0, 2.0, 1.0).kind == BlowupClass::bounded);
  CHECK(ode_blowup_classify(1.0, 1.0, 2.0, 1.0).kind == BlowupClass::marginal);
  CHECK_THROWS_AS(ode_blowup_classify(0.0, 1.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("blow-up time agrees with direct integration") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  for (int k = 0; k < 20; ++k) {
    const double C = u(rng), c = u(rng), m = 1.5 + u(rng), g0 = u(rng);
    const BlowupResult r = ode_blowup_classify(C, c, m, g0);
    if (r.kind != BlowupClass::blows_up) continue;
    // dy/dt for y = g^(1-m): linear, closed form y = g0^(1-m) - (m-1)(C/c)(1 - e^(-ct)).
    // Integrate it with RK4 instead and locate the zero crossing.
    auto f = [&](double t) { return -(m - 1) * C * std::exp(-c * t); };
    double y = std::pow(g0, 1 - m), t = 0;
    const double h = 1e-4;
    while (y > 0) {
      const double k1 = f(t), k2 = f(t + h / 2), k4 = f(t + h);
      const double next = y + h / 6 * (k1 + 4 * k2 + k4);
      if (next <= 0) {
        t += h * y / (y - next);
        break;
      }
      y = next;
      t += h;
    }
    CHECK(*r.blowup_time == doctest::Approx(t).epsilon(1e-5));
  }
}

TEST_CASE("ODE envelopes") {
  OdeEnvelopeParams p;
  p.C2 = 0.0;
  const OdeEnvelopes e = ode_envelopes(p, 20.0, 0.1);
  REQUIRE_FALSE(e.marginal);
  CHECK(std::abs(e.u1.back() - 1.0) < 1e-3);
  CHECK(std::abs(e.u2.back() - 1.0) < 1e-3);
  CHECK(e.u1_above_one);
  CHECK(e.u2_in_band);
  // delta = 1 logistic: u = 1 / (1 - (1 - 1/u0) e^(-t))
  for (std::size_t k = 0; k < e.t.size(); k += 17) {
    const double t = e.t[k];
    CHECK(e.u1[k] == doctest::Approx(1.0 / (1.0 - 0.5 * std::exp(-t))).epsilon(1e-9));
    CHECK(e.u2[k] == doctest::Approx(1.0 / (1.0 + std::exp(-t))).epsilon(1e-9));
  }

  p.C2 = 0.3;
  p.c2 = 1.0;
  p.u1_init = 1.5;
  const OdeEnvelopes f = ode_envelopes(p, 15.0, 0.1);
  REQUIRE_FALSE(f.marginal);
  for (std::size_t k = 0; k < f.t.size(); ++k) CHECK(f.u1_bar[k] >= f.u1[k] - 1e-9);
  CHECK(f.u1_above_one);
  CHECK(f.u2_in_band);

  p.C2 = 5.0;
  p.u1_init = 2.0;
  CHECK(ode_envelopes(p, 5.0, 0.1).marginal);
}

TEST_CASE("w_exact") {
  const Grid g(1, 4, 1.0);
  Field w0(g, 3.0), zi(g, 2.0);
  const Field w = w_exact(w0, zi);
  CHECK(w[0] == doctest::Approx(0.406006).epsilon(1e-6));
  zi[1] = -1.0;
  CHECK_THROWS_AS(w_exact(w0, zi), std::domain_error);
}
