#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "dcsim/errors.hpp"
#include "dcsim/model.hpp"

using namespace dcsim;

TEST_CASE("grid geometry") {
  const Grid g(1, 8, 2.0, -1.0);
  CHECK(g.spacing() == doctest::Approx(0.25));
  CHECK(g.size() == 8);
  CHECK(g.center(0, 0) == doctest::Approx(-0.875));
  CHECK(g.cell_center(7)[0] == doctest::Approx(0.875));

  const Grid g2(2, {8, 4}, {2.0, 1.0}, {0.0, 0.0});
  CHECK(g2.size() == 32);
  CHECK(g2.cell_center(8)[1] == doctest::Approx(0.375));  // index i + nx j: (0, 1)
  CHECK(g2.cell_volume() == doctest::Approx(0.0625));

  CHECK_THROWS_AS(Grid(1, 3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(3, 8, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1, 8, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(2, {8, 8}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("q_eval examples") {
  CHECK(q_eval(0.0, 2.0) == 0.0);
  CHECK(q_eval(1.0, 3.0) == 1.0);
  CHECK(q_eval(0.5, 2.0) == doctest::Approx(0.5));
  CHECK(q_eval(0.0, 1.5) == 0.0);
  CHECK_THROWS_AS(q_eval(-0.1, 2.0), std::domain_error);
}

TEST_CASE("q_eval is nondecreasing") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> um(1.01, 4.0), uu(0.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const double m = um(rng), a = uu(rng), b = uu(rng);
    CHECK(q_eval(std::min(a, b), m) <= q_eval(std::max(a, b), m));
  }
}

TEST_CASE("phi_eval examples") {
  CHECK(phi_eval(0.7, Sensitivity::constant(1.0)) == 1.0);
  CHECK(phi_eval(2.0, Sensitivity::linear_switch(1.0)) == -1.0);
  CHECK(phi_eval(1.0, Sensitivity::linear_switch(1.0)) == doctest::Approx(0.0));
  CHECK(phi_eval(0.5, Sensitivity::linear_switch(2.0)) == doctest::Approx(0.75));
}

TEST_CASE("sensitivity descriptors are validated at construction") {
  CHECK_THROWS_AS(Sensitivity::constant(1.5), std::invalid_argument);
  // slope 1/u* = 2 would break |phi'| <= 1
  CHECK_THROWS_AS(Sensitivity::linear_switch(0.5), std::invalid_argument);
  CHECK_THROWS_AS(Sensitivity::table({{0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Sensitivity::table({{0.0, 1.0}, {0.5, -0.5}}), std::invalid_argument);  // slope 3
  CHECK_THROWS_AS(Sensitivity::table({{0.0, 2.0}, {5.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Sensitivity::table({{1.0, 0.0}, {0.5, 0.0}}), std::invalid_argument);

  const Sensitivity t = Sensitivity::table({{0.0, 1.0}, {1.0, 0.5}, {3.0, -0.5}});
  CHECK(t(-1.0) == 1.0);
  CHECK(t(0.5) == doctest::Approx(0.75));
  CHECK(t(2.0) == doctest::Approx(0.0));
  CHECK(t(10.0) == -0.5);
}

TEST_CASE("sensitivity text form round-trips") {
  for (const Sensitivity& s : {Sensitivity::constant(-0.25), Sensitivity::linear_switch(1.0 / 3.0 + 1.0),
                               Sensitivity::table({{0.1, 0.2}, {0.7, 0.3}})})
    CHECK(Sensitivity::parse(s.describe()) == s);
  CHECK_THROWS_AS(Sensitivity::parse("sigmoid 2"), std::invalid_argument);
  CHECK_THROWS_AS(Sensitivity::parse("constant"), std::invalid_argument);
}

TEST_CASE("phi stays bounded with bounded slope") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> us(1.0, 10.0), uu(-5.0, 15.0);
  for (int k = 0; k < 200; ++k) {
    const Sensitivity s = Sensitivity::linear_switch(us(rng));
    const double u = uu(rng);
    CHECK(std::abs(s(u)) <= 1.0);
    CHECK(std::abs(s(u + 1e-3) - s(u)) / 1e-3 <= 1.0 + 1e-6);
  }
  const Sensitivity tab = Sensitivity::table({{0.0, 1.0}, {0.5, 0.6}, {2.0, -0.9}, {3.0, -1.0}});
  for (int k = 0; k < 200; ++k) {
    const double u = uu(rng);
    CHECK(std::abs(tab(u)) <= 1.0);
    CHECK(std::abs(tab(u + 1e-3) - tab(u)) / 1e-3 <= 1.0 + 1e-6);
  }
}

TEST_CASE("logistic_eval examples and sign structure") {
  ModelParams p;
  CHECK(logistic_eval(1.0, p) == 0.0);
  CHECK(logistic_eval(0.0, p) == 0.0);
  ModelParams q;
  q.mu = 2.0;
  q.delta = 2.0;
  CHECK(logistic_eval(0.5, q) == doctest::Approx(0.25));
  CHECK_THROWS_AS(logistic_eval(-1.0, p), std::domain_error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ur(0.2, 5.0), uf(0.01, 0.99);
  for (int k = 0; k < 500; ++k) {
    ModelParams s;
    s.r = ur(rng);
    s.delta = 1.0 + uf(rng);
    const double f = uf(rng);
    CHECK(logistic_eval(f / s.r, s) > 0.0);
    CHECK(logistic_eval((1.0 + f) / s.r, s) < 0.0);
  }
}

TEST_CASE("model parameter validation names the bound") {
  auto message = [](ModelParams p) {
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  ModelParams p;
  CHECK(message(p).empty());
  p.m = 0.5;
  CHECK(message(p) == "m must exceed 1");
  p = {};
  p.delta = 0.5;
  CHECK(message(p) == "delta must be at least 1");
  p = {};
  p.r = 0.0;
  CHECK(message(p) == "r must be positive");
  p = {};
  p.eps_reg = 1.0;
  CHECK(message(p) == "eps_reg must lie in [0, 1)");
  p = {};
  p.mu = -1.0;
  CHECK_FALSE(message(p).empty());

  ModelParams t;
  t.m = 2.0;
  t.delta = 2.0;
  CHECK_THROWS_AS(t.validate_theorem_mode(), HypothesisError);
  t.delta = 1.5;
  CHECK_NOTHROW(t.validate_theorem_mode());
  t.mu = 0.0;
  CHECK_THROWS_AS(t.validate_theorem_mode(), HypothesisError);
}

TEST_CASE("state validation") {
  StateQuad s(Grid(1, 8, 1.0));
  CHECK_NOTHROW(s.validate());
  s.v[3] = std::nan("");
  CHECK_FALSE(s.all_finite());
  CHECK_THROWS_AS(s.validate(), NumericalError);
  StateQuad mixed(Grid(1, 8, 1.0));
  mixed.z = Field(Grid(1, 16, 1.0));
  CHECK_THROWS_AS(mixed.validate(), std::invalid_argument);
}
