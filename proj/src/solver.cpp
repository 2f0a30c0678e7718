#include "dcsim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dcsim/errors.hpp"
#include "dcsim/linear_solver.hpp"

namespace dcsim {

void SolverConfig::validate() const {
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw std::invalid_argument("cfl_safety must lie in (0, 1]");
  if (!(end_time >= 0.0) || !std::isfinite(end_time)) throw std::invalid_argument("end_time must be nonnegative");
  if (output_stride == 0) throw std::invalid_argument("output_stride must be positive");
  if (!(linear_tol > 0.0)) throw std::invalid_argument("linear_tol must be positive");
}

namespace {

void require_finite(const Field& f, const char* name, double t) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!std::isfinite(f[k])) {
      std::ostringstream os;
      os << "non-finite " << name << " at cell " << k << " (t = " << t << ", value " << f[k] << ")";
      throw NumericalError(os.str());
    }
  }
}

void require_finite(const StateQuad& s) {
  require_finite(s.u, "u", s.t);
  require_finite(s.v, "v", s.t);
  require_finite(s.w, "w", s.t);
  require_finite(s.z, "z", s.t);
}

double clip(Field& f, Backend) {
  double removed = 0.0;
  for (double& x : f.values)
    if (x < 0.0) {
      removed -= x;
      x = 0.0;
    }
  return removed * f.grid.cell_volume();
}

}  // namespace

double cfl_dt(const StateQuad& state, const ModelParams& params, const SolverConfig& config) {
  require_finite(state);
  const Backend b = config.backend;
  const Grid& g = state.grid();
  const double h = g.spacing();
  const double max_u = std::max(0.0, kernels::max_value(b, state.u.span()));
  const double grad_v = kernels::max_face_gradient(b, g, state.v.span());
  const double diffusion = 2.0 * g.dim() * (params.m * std::pow(max_u + params.eps_reg, params.m - 1.0) + 1.0);
  const double reaction = h * h * params.mu * (params.delta + 1.0) * std::pow(std::max(max_u, 1.0), params.delta);
  const double dt = config.cfl_safety * h * h / (diffusion + h * grad_v + reaction);
  const double cap = config.dt_max > 0.0 ? config.dt_max : h;
  return std::min(dt, cap);
}

std::pair<StateQuad, StepReport> step(const StateQuad& state, const ModelParams& params,
                                      const SolverConfig& config) {
  return step_with_dt(state, params, config, cfl_dt(state, params, config));
}

std::pair<StateQuad, StepReport> step_with_dt(const StateQuad& state, const ModelParams& params,
                                              const SolverConfig& config, double dt) {
  using namespace kernels;
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step: dt must be positive");
  const Backend b = config.backend;
  const Grid& g = state.grid();
  const std::size_t n = g.size();

  StateQuad next(g);
  next.t = state.t + dt;
  StepReport rep;
  rep.dt_used = dt;

  // u: explicit conservative update
  std::vector<double> rate(n);
  u_rate(b, g, state.u.span(), state.v.span(), params, config.chemo_upwind, rate);
  next.u.values = state.u.values;
  axpy(b, dt, rate, next.u.span());

  // w: exact decay; what w loses is the v source
  exp_decay(b, state.w.span(), state.z.span(), dt, next.w.span());
  std::vector<double> v_rhs(n), z_rhs(n);
  for (std::size_t k = 0; k < n; ++k) {
    v_rhs[k] = state.v[k] + (state.w[k] - next.w[k]);
    z_rhs[k] = state.z[k] + dt * state.u[k];
  }

  if (config.v_z_stepper == VzStepper::semi_implicit) {
    next.v.values = state.v.values;
    next.z.values = state.z.values;
    rep.solver_iterations += solve_helmholtz(b, g, dt, 0.0, v_rhs, next.v.span(), config.linear_tol).iterations;
    rep.solver_iterations += solve_helmholtz(b, g, dt, 1.0, z_rhs, next.z.span(), config.linear_tol).iterations;
  } else {
    std::vector<double> lap(n);
    laplacian(b, g, state.v.span(), lap);
    for (std::size_t k = 0; k < n; ++k) next.v[k] = v_rhs[k] + dt * lap[k];
    laplacian(b, g, state.z.span(), lap);
    for (std::size_t k = 0; k < n; ++k) next.z[k] = z_rhs[k] + dt * (lap[k] - state.z[k]);
  }

  if (config.clip_negative) {
    rep.negativity_clipped = clip(next.u, b);
    rep.signal_clipped = clip(next.v, b) + clip(next.z, b);
  }
  require_finite(next);

  rep.min_u = min_value(b, next.u.span());
  rep.max_u = max_value(b, next.u.span());
  rep.mass_vw = (sum(b, next.v.span()) + sum(b, next.w.span())) * g.cell_volume();
  return {std::move(next), rep};
}

RunResult run(const StateQuad& initial, const ModelParams& params, const SolverConfig& config,
              std::span<RunSink* const> sinks) {
  params.validate();
  config.validate();
  initial.validate();

  RunResult res;
  res.final_state = initial;
  res.max_u = initial.u.max();
  res.min_field_value = std::min({initial.u.min(), initial.v.min(), initial.w.min(), initial.z.min()});
  if (config.end_time <= initial.t) return res;

  RowContext ctx;
  ctx.backend = config.backend;
  ctx.support_threshold = config.support_threshold;
  ctx.targets = steady_state_targets(initial, params);
  if (config.front_center) {
    ctx.x0 = *config.front_center;
  } else if (initial.u.max() > 0.0) {
    ctx.x0 = centroid(initial.u);
  } else {
    const Grid& g = initial.grid();
    for (int a = 0; a < g.dim(); ++a) ctx.x0[a] = g.origin(a) + 0.5 * g.extent(a);
  }
  res.front_center = ctx.x0;

  auto emit = [&](const StateQuad& s, std::size_t step_index) {
    const HistoryRow row = measure(s, ctx);
    res.history.rows.push_back(row);
    for (RunSink* sink : sinks) {
      sink->on_row(row);
      sink->on_snapshot(s, step_index);
    }
  };

  emit(initial, 0);
  StateQuad state = initial;
  std::size_t last_emitted = 0;
  while (state.t < config.end_time) {
    double dt = cfl_dt(state, params, config);
    const double remaining = config.end_time - state.t;
    const bool last = dt >= remaining;
    if (last) dt = remaining;
    auto [next, rep] = step_with_dt(state, params, config, dt);
    if (last) next.t = config.end_time;
    state = std::move(next);
    ++res.steps;
    res.clipped_total += rep.negativity_clipped;
    res.max_u = std::max(res.max_u, rep.max_u);
    res.min_field_value = std::min({res.min_field_value, rep.min_u, kernels::min_value(config.backend, state.v.span()),
                                    kernels::min_value(config.backend, state.w.span()),
                                    kernels::min_value(config.backend, state.z.span())});
    if (res.steps % config.output_stride == 0 || last) {
      emit(state, res.steps);
      last_emitted = res.steps;
    }
  }
  if (last_emitted != res.steps) emit(state, res.steps);
  res.final_state = std::move(state);
  return res;
}

}  // namespace dcsim
