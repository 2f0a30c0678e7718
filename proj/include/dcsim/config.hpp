#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcsim/grid.hpp"
#include "dcsim/lattice.hpp"
#include "dcsim/model.hpp"
#include "dcsim/solver.hpp"

namespace dcsim {

/// Initial value of one field.
///   constant C
///   bump x0=A[,B] r0=R height=H     H (1 - |x-x0|^2/R^2)_+
///   barenblatt x0=A[,B] t=T         Barenblatt profile with the model's m
///   snapshot PATH                   the same field of a stored snapshot
struct InitialSpec {
  enum class Kind { constant, bump, barenblatt, snapshot };
  Kind kind = Kind::constant;
  double value = 0.0;
  Coord x0{0.0, 0.0, 0.0};
  double r0 = 1.0;
  double height = 1.0;
  double t = 1.0;
  std::string path;

  static InitialSpec constant(double c);
  static InitialSpec bump(const Coord& x0, double r0, double height);
  static InitialSpec parse(const std::string& text);
  std::string describe(int dim) const;
  bool operator==(const InitialSpec&) const = default;
};

struct GridSpec {
  int dim = 1;
  std::array<int, 2> cells{256, 1};
  std::array<double, 2> extent{16.0, 0.0};
  std::array<double, 2> origin{0.0, 0.0};

  Grid make() const;
  bool operator==(const GridSpec&) const = default;
};

struct OracleToggles {
  bool sandwich = true;
  bool conservation = true;
  bool steady = true;
  double margin = 0.1;  ///< added to observed C1, C2
  bool operator==(const OracleToggles&) const = default;
};

struct LatticeSpec {
  int sites = 50;
  double length = 1.0;
  std::int64_t u_max = 2000;
  std::int64_t particles = 100000;
  int load_site = -1;  ///< -1 loads the centre site
  double alpha = 1.0;
  double beta = 0.0;
  double k = 1.0;
  LatticeKernel kernel = LatticeKernel::pushing;
  int cells_per_bin = 2;
  int seeds = 10;
  double end_time = 0.5;

  LatticeState make(double m, std::uint64_t seed) const;
  bool operator==(const LatticeSpec&) const = default;
};

/// One sweep axis: a dotted key such as "model.mu" and its values.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
  bool operator==(const SweepAxis&) const = default;
};

struct RunConfig {
  ModelParams model;
  GridSpec grid;
  SolverConfig solver;
  InitialSpec u = InitialSpec::constant(1.0);
  InitialSpec v = InitialSpec::constant(0.0);
  InitialSpec w = InitialSpec::constant(0.0);
  InitialSpec z = InitialSpec::constant(1.0);
  OracleToggles oracles;
  std::string output_dir = "out";
  bool write_snapshots = true;
  std::uint64_t seed = 0;
  std::optional<LatticeSpec> lattice;
  std::vector<SweepAxis> sweep;

  /// Re-validates every embedded type; snapshot paths must exist.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Line-oriented "key = value" under [section] headers, '#' comments.
/// Sections [model], [grid], [solver], [initial] are required; [oracles],
/// [output], [run], [lattice], [sweep] are optional. Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Text that parse_config maps back to an equal RunConfig.
std::string serialize_config(const RunConfig& cfg);

/// Sets one value by dotted key ("solver.end_time"); used by sweeps.
void apply_setting(RunConfig& cfg, const std::string& dotted_key, const std::string& value);

/// Evaluates the four initial specs on the configured grid at t = 0.
StateQuad build_initial_state(const RunConfig& cfg);

}  // namespace dcsim
