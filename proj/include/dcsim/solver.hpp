#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>

#include "dcsim/diagnostics.hpp"
#include "dcsim/kernels.hpp"
#include "dcsim/model.hpp"

namespace dcsim {

enum class VzStepper { explicit_euler, semi_implicit };

struct SolverConfig {
  double cfl_safety = 0.25;
  double end_time = 1.0;
  std::size_t output_stride = 10;
  bool clip_negative = true;
  bool chemo_upwind = true;
  VzStepper v_z_stepper = VzStepper::semi_implicit;
  /// Upper bound on dt; non-positive means "use h".
  double dt_max = 0.0;
  double linear_tol = 1e-12;
  Backend backend = Backend::openmp;
  /// Centre for support tracking; defaults to the centroid of u0.
  std::optional<Coord> front_center;
  double support_threshold = 1e-12;

  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

struct StepReport {
  double dt_used = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  double mass_vw = 0.0;            ///< sum(v + w) h^dim after the step
  double negativity_clipped = 0.0; ///< u-mass removed by clipping this step
  double signal_clipped = 0.0;     ///< v/z mass removed by clipping this step
  int solver_iterations = 0;
};

/// Stable explicit time step for the current state:
///   cfl h^2 / (2 dim (m (max u + eps)^(m-1) + 1) + h max|grad v|
///              + h^2 mu (delta+1) max(max u, 1)^delta),
/// capped at dt_max (default h). Throws NumericalError on a non-finite state.
double cfl_dt(const StateQuad& state, const ModelParams& params, const SolverConfig& config);

/// One step with dt = cfl_dt(...).
std::pair<StateQuad, StepReport> step(const StateQuad& state, const ModelParams& params,
                                      const SolverConfig& config);

/// One step with a prescribed dt. u explicit (fluxes + logistic), w by exact
/// exponential decay, v and z by the configured stepper. The amount w loses
/// is added to v unchanged, so sum(v + w) is conserved.
std::pair<StateQuad, StepReport> step_with_dt(const StateQuad& state, const ModelParams& params,
                                              const SolverConfig& config, double dt);

/// Receives rows and snapshots every output_stride steps (and at t=0 and the end).
class RunSink {
 public:
  virtual ~RunSink() = default;
  virtual void on_row(const HistoryRow&) {}
  virtual void on_snapshot(const StateQuad&, std::size_t /*step*/) {}
};

struct RunResult {
  FrontHistory history;
  StateQuad final_state;
  std::size_t steps = 0;
  double clipped_total = 0.0;
  double min_field_value = 0.0;  ///< smallest value of any field after any step
  double max_u = 0.0;            ///< largest u over the run, initial included
  Coord front_center{0.0, 0.0, 0.0};
};

/// Steps until t >= end_time (the last step is shortened to land on it).
RunResult run(const StateQuad& initial, const ModelParams& params, const SolverConfig& config,
              std::span<RunSink* const> sinks = {});

}  // namespace dcsim
