#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "dcsim/errors.hpp"
#include "dcsim/oracles.hpp"
#include "dcsim/solver.hpp"

using namespace dcsim;

namespace {

StateQuad uniform(const Grid& g, double u, double v, double w, double z) {
  StateQuad s(g);
  std::fill(s.u.values.begin(), s.u.values.end(), u);
  std::fill(s.v.values.begin(), s.v.values.end(), v);
  std::fill(s.w.values.begin(), s.w.values.end(), w);
  std::fill(s.z.values.begin(), s.z.values.end(), z);
  return s;
}

// u compactly supported with random amplitudes, the rest smooth and positive.
StateQuad random_state(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.0, 2.0), pos(0.1, 1.5);
  StateQuad s(g);
  const std::size_t n = g.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Coord x = g.cell_center(k);
    const double r2 = squared_distance(x, {0.5 * g.extent(0), 0.5 * g.extent(1), 0.0});
    s.u[k] = r2 < 0.1 * g.extent(0) * g.extent(0) ? amp(rng) : 0.0;
    s.v[k] = pos(rng);
    s.w[k] = pos(rng);
    s.z[k] = pos(rng);
  }
  return s;
}

double sum(const Field& f) {
  double s = 0.0;
  for (double x : f.values) s += x;
  return s;
}

ModelParams chemo_params() {
  ModelParams p;
  p.phi = Sensitivity::linear_switch(1.0);
  return p;
}

}  // namespace

TEST_CASE("cfl_dt examples") {
  const Grid g(1, 100, 1.0);
  ModelParams p;
  SolverConfig c;
  const double dt1 = cfl_dt(uniform(g, 1.0, 0.0, 0.0, 1.0), p, c);
  // 0.25 * 1e-4 / (2 (2 + 1) + 1e-4 * 2)
  CHECK(dt1 == doctest::Approx(0.25e-4 / 6.0002).epsilon(1e-12));

  const double dt0 = cfl_dt(uniform(g, 0.0, 0.0, 0.0, 1.0), p, c);
  CHECK(dt0 == doctest::Approx(0.25e-4 / 2.0002).epsilon(1e-12));

  c.cfl_safety = 0.125;
  CHECK(cfl_dt(uniform(g, 1.0, 0.0, 0.0, 1.0), p, c) == doctest::Approx(0.5 * dt1).epsilon(1e-14));

  c.cfl_safety = 100.0;
  CHECK(cfl_dt(uniform(g, 0.0, 0.0, 0.0, 1.0), p, c) <= g.spacing());

  StateQuad bad = uniform(g, 1.0, 0.0, 0.0, 1.0);
  bad.u[3] = std::nan("");
  CHECK_THROWS_AS(cfl_dt(bad, p, c), NumericalError);
}

TEST_CASE("steady states are fixed points") {
  const ModelParams p = chemo_params();
  for (Backend b : {Backend::reference, Backend::openmp}) {
    for (VzStepper st : {VzStepper::semi_implicit, VzStepper::explicit_euler}) {
      SolverConfig c;
      c.backend = b;
      c.v_z_stepper = st;
      for (const Grid& g : {Grid(1, 32, 2.0), Grid(2, 16, 2.0)}) {
        const StateQuad a = uniform(g, 1.0, 0.7, 0.0, 1.0);
        const StateQuad na = step(a, p, c).first;
        CHECK(std::abs(na.u.max() - 1.0) + std::abs(na.u.min() - 1.0) <= 1e-14);
        CHECK(std::abs(na.v.max() - 0.7) + std::abs(na.v.min() - 0.7) <= 1e-14);
        CHECK(na.w.max() == 0.0);
        CHECK(std::abs(na.z.max() - 1.0) + std::abs(na.z.min() - 1.0) <= 1e-12);  // linear solve tolerance

        const StateQuad e = uniform(g, 0.0, 0.3, 0.4, 0.0);
        const StateQuad ne = step(e, p, c).first;
        CHECK(ne.u.max() == 0.0);
        CHECK(std::abs(ne.v.max() - 0.3) + std::abs(ne.v.min() - 0.3) <= 1e-14);
        CHECK(ne.w.min() == 0.4);
        CHECK(ne.z.max() == 0.0);
      }
    }
  }
}

TEST_CASE("single-step invariants on random states") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 24; ++trial) {
    const Grid g = trial % 2 ? Grid(1, 64, 4.0) : Grid(2, 20, 4.0);
    const StateQuad s = random_state(g, rng);
    ModelParams p = chemo_params();
    SolverConfig c;
    c.v_z_stepper = trial % 3 ? VzStepper::semi_implicit : VzStepper::explicit_euler;
    c.backend = trial % 4 < 2 ? Backend::openmp : Backend::reference;
    const auto [n, rep] = step(s, p, c);

    CHECK(n.t == doctest::Approx(s.t + rep.dt_used));
    const double before = sum(s.v) + sum(s.w), after = sum(n.v) + sum(n.w);
    CHECK(std::abs(after - before) <= 1e-12 * before);
    CHECK(rep.mass_vw == doctest::Approx(after * g.cell_volume()).epsilon(1e-13));
    CHECK(n.u.min() >= 0.0);
    CHECK(n.v.min() >= 0.0);
    CHECK(n.z.min() >= 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(n.w[k] <= s.w[k]);
    CHECK(rep.min_u == n.u.min());
    CHECK(rep.max_u == n.u.max());
  }
}

TEST_CASE("support grows by at most one cell per step") {
  const Grid g(1, 64, 4.0);
  StateQuad s = uniform(g, 0.0, 0.5, 0.5, 0.5);
  for (std::size_t k = 20; k < 30; ++k) s.u[k] = 1.0 + 0.1 * static_cast<double>(k % 3);
  for (std::size_t k = 0; k < 64; ++k) s.v[k] = 0.5 + 0.01 * static_cast<double>(k);
  const ModelParams p = chemo_params();
  SolverConfig c;
  std::size_t lo = 20, hi = 29;
  for (int it = 0; it < 5; ++it) {
    s = step(s, p, c).first;
    for (std::size_t k = 0; k < 64; ++k)
      if (k + 1 < lo || k > hi + 1) CHECK(s.u[k] == 0.0);
    lo = lo > 0 ? lo - 1 : 0;
    hi = std::min<std::size_t>(hi + 1, 63);
  }
}

TEST_CASE("without growth the u mass is conserved") {
  std::mt19937_64 rng(22);
  ModelParams p = chemo_params();
  p.mu = 0.0;
  SolverConfig c;
  for (int trial = 0; trial < 6; ++trial) {
    StateQuad s = random_state(trial % 2 ? Grid(1, 64, 4.0) : Grid(2, 16, 4.0), rng);
    const double m0 = sum(s.u);
    double clipped = 0.0;
    for (int it = 0; it < 20; ++it) {
      auto [n, rep] = step(s, p, c);
      clipped += rep.negativity_clipped;
      s = std::move(n);
    }
    CHECK(clipped == 0.0);
    CHECK(std::abs(sum(s.u) - m0) <= 1e-12 * m0);
  }
}

TEST_CASE("with zero sensitivity u stays below max(sup u0, 1/r)") {
  std::mt19937_64 rng(23);
  ModelParams p;
  p.phi = Sensitivity::constant(0.0);
  p.r = 0.8;
  SolverConfig c;
  for (int trial = 0; trial < 4; ++trial) {
    StateQuad s = random_state(Grid(1, 48, 3.0), rng);
    const double bound = std::max(s.u.max(), 1.0 / p.r);
    for (int it = 0; it < 50; ++it) {
      s = step(s, p, c).first;
      CHECK(s.u.max() <= bound * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("porous-medium limit approaches the source solution under refinement") {
  // phi = 0 and mu = 0 decouple u into the porous-medium equation.
  ModelParams p;
  p.phi = Sensitivity::constant(0.0);
  p.mu = 0.0;
  SolverConfig c;
  c.end_time = 0.25;
  c.output_stride = 1000000;
  double previous = 1e300;
  for (int cells : {64, 128, 256}) {
    const Grid g(1, cells, 12.0, -6.0);
    StateQuad s(g);
    for (std::size_t k = 0; k < g.size(); ++k) s.u[k] = barenblatt(g.cell_center(k), 0.0, 2.0, 1);
    const RunResult r = run(s, p, c);
    CHECK(r.final_state.t == doctest::Approx(0.25).epsilon(1e-14));
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
      err += std::abs(r.final_state.u[k] - barenblatt(g.cell_center(k), 0.25, 2.0, 1)) * g.spacing();
    CHECK(err < previous);
    CHECK(err < 0.02);
    previous = err;
  }
}

TEST_CASE("run bookkeeping") {
  const Grid g(1, 32, 2.0);
  const StateQuad s = uniform(g, 0.5, 0.0, 0.2, 1.0);
  const ModelParams p = chemo_params();
  SolverConfig c;
  c.end_time = 0.0;
  const RunResult none = run(s, p, c);
  CHECK(none.history.rows.empty());
  CHECK(none.steps == 0);
  CHECK(none.final_state.u.values == s.u.values);

  struct Counter : RunSink {
    std::size_t rows = 0, snaps = 0, last = 0;
    void on_row(const HistoryRow&) override { ++rows; }
    void on_snapshot(const StateQuad&, std::size_t step) override {
      ++snaps;
      last = step;
    }
  } counter;
  RunSink* sinks[] = {&counter};
  c.end_time = 0.05;
  c.output_stride = 7;
  const RunResult r = run(s, p, c, sinks);
  CHECK(r.final_state.t == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(counter.rows == r.history.rows.size());
  CHECK(counter.snaps == counter.rows);
  CHECK(counter.last == r.steps);
  CHECK(counter.rows == 1 + r.steps / 7 + (r.steps % 7 != 0 ? 1 : 0));
  for (std::size_t k = 1; k < r.history.rows.size(); ++k)
    CHECK(r.history.rows[k].t > r.history.rows[k - 1].t);
}

TEST_CASE("long run relaxes to the uniform steady state") {
  const Grid g(1, 32, 2.0);
  StateQuad s = uniform(g, 0.5, 0.2, 0.3, 1.0);
  for (std::size_t k = 0; k < g.size(); ++k) s.u[k] += 0.2 * std::cos(M_PI * g.cell_center(k)[0]);
  const ModelParams p = chemo_params();
  SolverConfig c;
  c.end_time = 10.0;
  c.output_stride = 100;
  const RunResult r = run(s, p, c);
  CHECK(r.history.rows.back().norm_u_minus_1 < 1e-2);
  CHECK(r.history.rows.back().norm_z_minus_1 < 1e-2);
  CHECK(r.history.rows.back().norm_w < 1e-2);
}

TEST_CASE("reference and OpenMP runs agree") {
  std::mt19937_64 rng(24);
  const StateQuad s = random_state(Grid(2, 72, 4.0), rng);
  const ModelParams p = chemo_params();
  SolverConfig c;
  c.end_time = 0.01;
  c.backend = Backend::reference;
  const RunResult a = run(s, p, c);
  c.backend = Backend::openmp;
  const RunResult b = run(s, p, c);
  CHECK(a.steps == b.steps);
  double diff = 0.0;
  for (std::size_t k = 0; k < s.u.size(); ++k) diff = std::max(diff, std::abs(a.final_state.u[k] - b.final_state.u[k]));
  CHECK(diff <= 1e-9);
}
